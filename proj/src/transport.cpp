#include "transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skcap::detail {

namespace {
constexpr double kNegativeSlack = 1e-13;
}

TransportPolytope::TransportPolytope(std::vector<double> row,
                                     std::vector<double> col)
    : row_(std::move(row)), col_(std::move(col)) {}

void TransportPolytope::fill(std::span<const double> free,
                             std::span<double> full) const {
  const std::size_t R = rows(), C = cols();
  for (std::size_t i = 0; i + 1 < R; ++i) {
    double used = 0.0;
    for (std::size_t j = 0; j + 1 < C; ++j) {
      full[i * C + j] = free[i * (C - 1) + j];
      used += full[i * C + j];
    }
    full[i * C + C - 1] = row_[i] - used;
  }
  for (std::size_t j = 0; j < C; ++j) {
    double used = 0.0;
    for (std::size_t i = 0; i + 1 < R; ++i) used += full[i * C + j];
    full[(R - 1) * C + j] = col_[j] - used;
  }
}

bool TransportPolytope::complete(std::span<const double> free,
                                 std::span<double> full) const {
  fill(free, full);
  bool feasible = true;
  for (double& v : full) {
    if (v < 0.0) {
      if (v < -kNegativeSlack) feasible = false;
      v = 0.0;
    }
  }
  return feasible;
}

std::vector<double> TransportPolytope::free_of(std::span<const double> full) const {
  const std::size_t R = rows(), C = cols();
  std::vector<double> free(dims());
  for (std::size_t i = 0; i + 1 < R; ++i) {
    for (std::size_t j = 0; j + 1 < C; ++j) {
      free[i * (C - 1) + j] = full[i * C + j];
    }
  }
  return free;
}

void TransportPolytope::rescale(std::span<double> full) const {
  const std::size_t R = rows(), C = cols();
  for (std::size_t i = 0; i < R; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < C; ++j) sum += full[i * C + j];
    if (sum <= 0.0 && row_[i] > 0.0)
      for (std::size_t j = 0; j < C; ++j) full[i * C + j] = row_[i] * col_[j];
  }
  for (std::size_t j = 0; j < C; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < R; ++i) sum += full[i * C + j];
    if (sum <= 0.0 && col_[j] > 0.0)
      for (std::size_t i = 0; i < R; ++i) full[i * C + j] = row_[i] * col_[j];
  }
  for (int pass = 0; pass < 500; ++pass) {
    for (std::size_t i = 0; i < R; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < C; ++j) sum += full[i * C + j];
      const double f = sum > 0.0 ? row_[i] / sum : 0.0;
      for (std::size_t j = 0; j < C; ++j) full[i * C + j] *= f;
    }
    double err = 0.0;
    for (std::size_t j = 0; j < C; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < R; ++i) sum += full[i * C + j];
      err = std::max(err, std::abs(sum - col_[j]));
      const double f = sum > 0.0 ? col_[j] / sum : 0.0;
      for (std::size_t i = 0; i < R; ++i) full[i * C + j] *= f;
    }
    if (err < 1e-15) break;
  }
}

std::vector<double> TransportPolytope::product() const {
  std::vector<double> full(rows() * cols());
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t j = 0; j < cols(); ++j) full[i * cols() + j] = row_[i] * col_[j];
  }
  return full;
}

std::vector<double> TransportPolytope::northwest_corner(
    std::span<const std::size_t> row_order,
    std::span<const std::size_t> col_order) const {
  std::vector<double> full(rows() * cols(), 0.0);
  std::vector<double> r(row_), c(col_);
  std::size_t a = 0, b = 0;
  while (a < rows() && b < cols()) {
    const std::size_t i = row_order[a], j = col_order[b];
    const double m = std::min(r[i], c[j]);
    full[i * cols() + j] = m;
    r[i] -= m;
    c[j] -= m;
    if (r[i] <= c[j]) {
      ++a;
    } else {
      ++b;
    }
  }
  return full;
}

std::vector<std::vector<double>> TransportPolytope::grid(
    std::size_t resolution) const {
  std::vector<std::vector<double>> points;
  const std::size_t d = dims();
  if (d == 0) {
    points.emplace_back();
    return points;
  }
  const std::size_t C = cols();
  std::vector<double> full(rows() * C);
  auto add = [&](std::vector<double> free, bool dedupe) {
    if (!complete(free, full)) return;
    if (dedupe && std::find(points.begin(), points.end(), free) != points.end()) {
      return;
    }
    points.push_back(std::move(free));
  };

  std::vector<double> lo(d, 0.0), hi(d);
  for (std::size_t i = 0; i + 1 < rows(); ++i) {
    for (std::size_t j = 0; j + 1 < C; ++j) {
      hi[i * (C - 1) + j] = std::min(row_[i], col_[j]);
    }
  }
  if (d == 1) {
    // 2x2: q00 in [max(0, r0 + c0 - 1), min(r0, c0)].
    lo[0] = std::max(0.0, row_[0] + col_[0] - 1.0);
  }
  std::vector<std::size_t> idx(d, 0);
  const std::size_t steps = std::max<std::size_t>(resolution, 2) - 1;
  while (true) {
    std::vector<double> free(d);
    for (std::size_t k = 0; k < d; ++k) {
      free[k] = idx[k] == steps
                    ? hi[k]
                    : lo[k] + (hi[k] - lo[k]) * static_cast<double>(idx[k]) /
                                  static_cast<double>(steps);
    }
    add(std::move(free), false);
    std::size_t k = d;
    while (k-- > 0) {
      if (++idx[k] <= steps) break;
      idx[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  add(free_of(product()), true);
  std::vector<std::size_t> ro(rows()), co(cols());
  std::iota(ro.begin(), ro.end(), 0);
  std::iota(co.begin(), co.end(), 0);
  add(free_of(northwest_corner(ro, co)), true);
  return points;
}

std::vector<double> TransportPolytope::random_point(Rng& rng) const {
  std::vector<double> full = product();
  std::vector<std::size_t> ro(rows()), co(cols());
  std::iota(ro.begin(), ro.end(), 0);
  std::iota(co.begin(), co.end(), 0);
  constexpr std::size_t kVertices = 3;
  std::vector<double> weights(kVertices + 1);
  double sum = 0.0;
  for (double& w : weights) {
    w = -std::log(1.0 - rng.uniform());
    sum += w;
  }
  for (double& v : full) v *= weights[0] / sum;
  for (std::size_t k = 1; k <= kVertices; ++k) {
    for (std::size_t i = ro.size(); i > 1; --i) {
      std::swap(ro[i - 1], ro[rng.below(i)]);
    }
    for (std::size_t j = co.size(); j > 1; --j) {
      std::swap(co[j - 1], co[rng.below(j)]);
    }
    const auto vertex = northwest_corner(ro, co);
    for (std::size_t e = 0; e < full.size(); ++e) {
      full[e] += weights[k] / sum * vertex[e];
    }
  }
  return free_of(full);
}

double TransportPolytope::max_step(std::span<const double> free,
                                   std::span<const double> direction,
                                   double cap) const {
  const std::size_t n = rows() * cols();
  std::vector<double> base(n), moved(n), shifted(free.begin(), free.end());
  for (std::size_t k = 0; k < shifted.size(); ++k) shifted[k] += direction[k];
  fill(free, base);
  fill(shifted, moved);
  double t = cap;
  for (std::size_t e = 0; e < n; ++e) {
    const double slope = moved[e] - base[e];
    if (slope < 0.0) t = std::min(t, std::max(0.0, base[e]) / -slope);
  }
  return std::max(t, 0.0);
}

}  // namespace skcap::detail
