#include "simplex_search.hpp"

#include <algorithm>
#include <cmath>

namespace skcap::detail {

void renormalize(std::vector<double>& point,
                 std::span<const SimplexGroup> groups) {
  for (const auto& g : groups) {
    for (std::size_t off : g.offsets) {
      double sum = 0.0;
      for (std::size_t i = 0; i < g.length; ++i) sum += point[off + i];
      if (sum <= 0.0) continue;
      for (std::size_t i = 0; i < g.length; ++i) point[off + i] /= sum;
    }
  }
}

double coordinate_ascent(std::vector<double>& point,
                         std::span<const SimplexGroup> groups,
                         const Objective& objective, double value,
                         double initial_step, double min_step,
                         std::size_t max_sweeps, AscentStats& stats) {
  double step = initial_step;
  std::vector<double> saved;
  while (step >= min_step && stats.sweeps < max_sweeps) {
    bool improved = false;
    for (const auto& g : groups) {
      if (g.length < 2) continue;
      saved.resize(2 * g.offsets.size());
      for (std::size_t i = 0; i < g.length; ++i) {
        for (std::size_t j = 0; j < g.length; ++j) {
          if (i == j) continue;
          // Repeat the same transfer while it keeps improving.
          while (true) {
            const double pi = point[g.offsets.front() + i];
            if (pi <= 0.0) break;
            const double delta = std::min(step, pi);
            for (std::size_t b = 0; b < g.offsets.size(); ++b) {
              const std::size_t off = g.offsets[b];
              saved[2 * b] = point[off + i];
              saved[2 * b + 1] = point[off + j];
              if (delta >= point[off + i]) {
                point[off + j] += point[off + i];
                point[off + i] = 0.0;
              } else {
                point[off + i] -= delta;
                point[off + j] += delta;
              }
            }
            const double candidate = objective(point);
            ++stats.evaluations;
            if (candidate > value + 1e-15) {
              value = candidate;
              improved = true;
              continue;
            }
            for (std::size_t b = 0; b < g.offsets.size(); ++b) {
              const std::size_t off = g.offsets[b];
              point[off + i] = saved[2 * b];
              point[off + j] = saved[2 * b + 1];
            }
            break;
          }
        }
      }
    }
    ++stats.sweeps;
    renormalize(point, groups);
    if (!improved) step *= 0.5;
  }
  // Renormalization may shift the value by rounding; report what the point
  // actually evaluates to.
  ++stats.evaluations;
  return objective(point);
}

void sample_lattice_row(Rng& rng, std::span<double> row,
                        std::size_t resolution) {
  // Stars and bars: choose (length - 1) distinct bar positions among
  // (resolution + length - 1) slots.
  const std::size_t k = row.size();
  const std::size_t slots = resolution + k - 1;
  std::vector<std::size_t> bars;
  while (bars.size() + 1 < k) {
    const std::size_t b = static_cast<std::size_t>(rng.below(slots));
    if (std::find(bars.begin(), bars.end(), b) == bars.end()) bars.push_back(b);
  }
  std::sort(bars.begin(), bars.end());
  std::size_t prev = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t end = i + 1 < k ? bars[i] : slots;
    const std::size_t stars = end - prev;
    row[i] = static_cast<double>(stars) / static_cast<double>(resolution);
    prev = end + 1;
  }
}

void sample_interior_row(Rng& rng, std::span<double> row) {
  double sum = 0.0;
  for (double& v : row) {
    v = -std::log(1.0 - rng.uniform());
    sum += v;
  }
  if (sum <= 0.0) {
    std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(row.size()));
    return;
  }
  for (double& v : row) v /= sum;
}

}  // namespace skcap::detail
