#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "skcap/random.hpp"

namespace skcap::detail {

/// A probability simplex embedded in a flat parameter vector. Blocks listed
/// together are moved in lockstep (used to tie p(u|s) rows across states).
struct SimplexGroup {
  std::vector<std::size_t> offsets;
  std::size_t length = 0;
};

using Objective = std::function<double(std::span<const double>)>;

struct AscentStats {
  std::size_t evaluations = 0;
  std::size_t sweeps = 0;
};

/// Pairwise mass-transfer coordinate ascent over a product of simplices.
///
/// Each sweep tries moving min(step, p_i) from coordinate i to j in every
/// group; improving moves are kept and repeated while they improve. The step
/// halves after a sweep without improvement until it drops below
/// `min_step`. Returns the final objective value; `point` is updated in
/// place and its rows are renormalized after every sweep.
double coordinate_ascent(std::vector<double>& point,
                         std::span<const SimplexGroup> groups,
                         const Objective& objective, double value,
                         double initial_step, double min_step,
                         std::size_t max_sweeps, AscentStats& stats);

/// Uniformly random point of the lattice {k / resolution} on the simplex.
void sample_lattice_row(Rng& rng, std::span<double> row,
                        std::size_t resolution);

/// Uniformly random point in the interior of the simplex.
void sample_interior_row(Rng& rng, std::span<double> row);

/// Rescales each block of every group to unit mass.
void renormalize(std::vector<double>& point,
                 std::span<const SimplexGroup> groups);

}  // namespace skcap::detail
