#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "skcap/random.hpp"

namespace skcap::detail {

/// Transportation polytope {Q >= 0 : Q 1 = row, 1^T Q = col} for one (x,s).
///
/// Points are parameterized by the free coordinates Q[i][j] with
/// i < rows-1, j < cols-1; the last row and column are implied.
class TransportPolytope {
 public:
  TransportPolytope(std::vector<double> row, std::vector<double> col);

  std::size_t rows() const { return row_.size(); }
  std::size_t cols() const { return col_.size(); }
  std::size_t dims() const { return (rows() - 1) * (cols() - 1); }

  /// Fills the full rows x cols matrix from free coordinates. Returns false
  /// if any implied entry is negative beyond rounding.
  bool complete(std::span<const double> free, std::span<double> full) const;

  /// Free coordinates of a full matrix.
  std::vector<double> free_of(std::span<const double> full) const;

  /// Scales rows and columns of a nonnegative matrix in place until its
  /// marginals match (iterative proportional fitting). Empty rows or columns
  /// with positive marginal are first refilled from the product coupling.
  void rescale(std::span<double> full) const;

  /// Product coupling row col^T.
  std::vector<double> product() const;

  /// North-west-corner vertex for the given row/column visiting orders.
  std::vector<double> northwest_corner(std::span<const std::size_t> row_order,
                                       std::span<const std::size_t> col_order) const;

  /// Feasible free-coordinate grid with `resolution` points per coordinate.
  /// One-dimensional polytopes are gridded over their exact interval;
  /// higher dimensions over the box [0, min(row_i, col_j)] with infeasible
  /// points dropped. The product coupling and the identity-ordered
  /// north-west vertex are always included.
  std::vector<std::vector<double>> grid(std::size_t resolution) const;

  /// Random feasible point: a random convex combination of the product
  /// coupling and random north-west vertices.
  std::vector<double> random_point(Rng& rng) const;

  /// Largest step t >= 0 such that free + t * direction stays feasible,
  /// capped at `cap`.
  double max_step(std::span<const double> free, std::span<const double> direction,
                  double cap) const;

 private:
  // Unclipped completion; the implied entries are affine in `free`.
  void fill(std::span<const double> free, std::span<double> full) const;

  std::vector<double> row_, col_;
};

}  // namespace skcap::detail
