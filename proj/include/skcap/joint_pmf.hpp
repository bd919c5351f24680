#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skcap {

/// Random variables that can label an axis of a joint distribution.
enum class Var { U, X, S, Yr, Ye };

std::string_view to_string(Var v);

/// Tolerance used when validating probability objects at construction.
inline constexpr double kMassTolerance = 1e-12;

/// Dense joint probability tensor over an ordered set of distinct variables.
///
/// Storage is row-major: the last label varies fastest. The object is
/// immutable after construction and always holds a valid distribution
/// (entries >= 0, total mass 1 within kMassTolerance).
class JointPmf {
 public:
  JointPmf(std::vector<Var> labels, std::vector<std::size_t> shape,
           std::vector<double> probs);

  const std::vector<Var>& labels() const { return labels_; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t rank() const { return labels_.size(); }

  /// Axis position of `v`; throws ShapeError if absent.
  std::size_t axis_of(Var v) const;
  bool has(Var v) const;

  /// Entry at a multi-index given in label order.
  double at(std::span<const std::size_t> index) const;

 private:
  std::vector<Var> labels_;
  std::vector<std::size_t> shape_;
  std::vector<double> probs_;
};

/// Sums out every axis not listed in `keep`. The result's axes follow the
/// order of `keep`; an empty `keep` yields a rank-0 pmf holding 1.
JointPmf marginalize(const JointPmf& joint, std::span<const Var> keep);

/// Joint entropy in bits of the listed variables.
double entropy(const JointPmf& joint, std::span<const Var> vars);

/// I(A;B) in bits, clipped at zero.
double mutual_information(const JointPmf& joint, std::span<const Var> a,
                          std::span<const Var> b);

/// I(A;B|C) in bits, clipped at zero.
double conditional_mutual_information(const JointPmf& joint,
                                      std::span<const Var> a,
                                      std::span<const Var> b,
                                      std::span<const Var> c);

// Braced-list convenience overloads.
inline double mutual_information(const JointPmf& joint,
                                 std::initializer_list<Var> a,
                                 std::initializer_list<Var> b) {
  return mutual_information(joint, std::span<const Var>(a.begin(), a.size()),
                            std::span<const Var>(b.begin(), b.size()));
}
inline double conditional_mutual_information(const JointPmf& joint,
                                             std::initializer_list<Var> a,
                                             std::initializer_list<Var> b,
                                             std::initializer_list<Var> c) {
  return conditional_mutual_information(
      joint, std::span<const Var>(a.begin(), a.size()),
      std::span<const Var>(b.begin(), b.size()),
      std::span<const Var>(c.begin(), c.size()));
}
inline JointPmf marginalize(const JointPmf& joint,
                            std::initializer_list<Var> keep) {
  return marginalize(joint, std::span<const Var>(keep.begin(), keep.size()));
}
inline double entropy(const JointPmf& joint, std::initializer_list<Var> vars) {
  return entropy(joint, std::span<const Var>(vars.begin(), vars.size()));
}

/// Entropy in bits of a probability vector (0 log 0 = 0).
double entropy_bits(std::span<const double> p);

/// Binary entropy function h2(p) in bits.
double binary_entropy(double p);

/// Mutual information in bits of a dense 2-D table laid out [rows][cols].
/// Zero-mass rows/columns are skipped; the result is clipped at zero.
double mutual_information_2d(std::span<const double> table, std::size_t rows,
                             std::size_t cols);

}  // namespace skcap
