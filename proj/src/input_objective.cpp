#include "input_objective.hpp"

#include <algorithm>
#include <cmath>

#include "simplex_search.hpp"
#include "skcap/joint_pmf.hpp"

namespace skcap::detail {

namespace {

double safe_log2(double v) { return std::log2(std::max(v, 1e-300)); }

// Frank-Wolfe gap sum_s p(s) [max_x g(x,s) - sum_x p(x|s) g(x,s)]; bounds the
// distance to the maximum of a concave objective.
double duality_gap(std::span<const double> p, std::span<const double> grad,
                   std::span<const double> ps, std::size_t nx) {
  double gap = 0.0;
  for (std::size_t s = 0; s < ps.size(); ++s) {
    if (ps[s] <= 0.0) continue;
    double top = grad[s * nx], mean = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      top = std::max(top, grad[s * nx + x]);
      mean += p[s * nx + x] * grad[s * nx + x];
    }
    gap += ps[s] * (top - mean);
  }
  return std::max(gap, 0.0);
}

}  // namespace

InputObjective::InputObjective(std::span<const double> kernel,
                               std::span<const double> state_pmf,
                               std::size_t x_size, std::size_t s_size,
                               std::size_t yr_size, std::size_t ye_size,
                               EntropyWeights weights)
    : kernel_(kernel.begin(), kernel.end()),
      state_pmf_(state_pmf.begin(), state_pmf.end()),
      nx_(x_size),
      ns_(s_size),
      nr_(yr_size),
      ne_(ye_size),
      w_(weights),
      kr_(x_size * s_size * yr_size, 0.0),
      ke_(x_size * s_size * ye_size, 0.0),
      cond_term_(x_size * s_size, 0.0),
      q_(yr_size * ye_size),
      qr_(yr_size),
      qe_(ye_size) {
  for (std::size_t xs = 0; xs < nx_ * ns_; ++xs) {
    const double* block = &kernel_[xs * nr_ * ne_];
    for (std::size_t r = 0; r < nr_; ++r) {
      for (std::size_t e = 0; e < ne_; ++e) {
        kr_[xs * nr_ + r] += block[r * ne_ + e];
        ke_[xs * ne_ + e] += block[r * ne_ + e];
      }
    }
    cond_term_[xs] =
        w_.cond_joint * entropy_bits({block, nr_ * ne_}) +
        w_.cond_yr * entropy_bits({&kr_[xs * nr_], nr_}) +
        w_.cond_ye * entropy_bits({&ke_[xs * ne_], ne_});
  }
}

void InputObjective::output_marginals(std::span<const double> p) const {
  std::fill(q_.begin(), q_.end(), 0.0);
  std::fill(qr_.begin(), qr_.end(), 0.0);
  std::fill(qe_.begin(), qe_.end(), 0.0);
  for (std::size_t x = 0; x < nx_; ++x) {
    for (std::size_t s = 0; s < ns_; ++s) {
      const double w = state_pmf_[s] * p[s * nx_ + x];
      if (w <= 0.0) continue;
      const std::size_t xs = x * ns_ + s;
      const double* block = &kernel_[xs * nr_ * ne_];
      for (std::size_t k = 0; k < nr_ * ne_; ++k) q_[k] += w * block[k];
      for (std::size_t r = 0; r < nr_; ++r) qr_[r] += w * kr_[xs * nr_ + r];
      for (std::size_t e = 0; e < ne_; ++e) qe_[e] += w * ke_[xs * ne_ + e];
    }
  }
}

double InputObjective::value(std::span<const double> p) const {
  output_marginals(p);
  double v = w_.joint * entropy_bits(q_) + w_.yr * entropy_bits(qr_) +
             w_.ye * entropy_bits(qe_);
  for (std::size_t x = 0; x < nx_; ++x) {
    for (std::size_t s = 0; s < ns_; ++s) {
      v += state_pmf_[s] * p[s * nx_ + x] * cond_term_[x * ns_ + s];
    }
  }
  return v;
}

double InputObjective::value_and_gradient(std::span<const double> p,
                                          std::span<double> grad) const {
  const double v = value(p);
  for (std::size_t x = 0; x < nx_; ++x) {
    for (std::size_t s = 0; s < ns_; ++s) {
      const std::size_t xs = x * ns_ + s;
      double g = cond_term_[xs];
      const double* block = &kernel_[xs * nr_ * ne_];
      if (w_.joint != 0.0) {
        double acc = 0.0;
        for (std::size_t k = 0; k < nr_ * ne_; ++k) {
          if (block[k] > 0.0) acc -= block[k] * safe_log2(q_[k]);
        }
        g += w_.joint * acc;
      }
      if (w_.yr != 0.0) {
        double acc = 0.0;
        for (std::size_t r = 0; r < nr_; ++r) {
          const double k = kr_[xs * nr_ + r];
          if (k > 0.0) acc -= k * safe_log2(qr_[r]);
        }
        g += w_.yr * acc;
      }
      if (w_.ye != 0.0) {
        double acc = 0.0;
        for (std::size_t e = 0; e < ne_; ++e) {
          const double k = ke_[xs * ne_ + e];
          if (k > 0.0) acc -= k * safe_log2(qe_[e]);
        }
        g += w_.ye * acc;
      }
      grad[s * nx_ + x] = g;
    }
  }
  return v;
}

InputSearchResult maximize_input(const InputObjective& objective,
                                 std::span<const double> start,
                                 const InputSearchOptions& options) {
  const std::size_t nx = objective.x_size(), ns = objective.s_size();
  const auto ps = objective.state_pmf();
  InputSearchResult result;
  result.x_given_s.assign(start.begin(), start.end());
  auto& p = result.x_given_s;

  // The multiplicative update cannot leave a face of the simplex, so start
  // from a point with full support.
  for (double& v : p) v = (1.0 - 1e-9) * v + 1e-9 / static_cast<double>(nx);

  std::vector<double> grad(nx * ns), cand(nx * ns), cand_grad(nx * ns);
  double value = objective.value_and_gradient(p, grad);
  double eta = 1.0;
  for (; result.iterations < options.max_iterations; ++result.iterations) {
    if (duality_gap(p, grad, ps, nx) < options.tolerance) break;
    for (std::size_t s = 0; s < ns; ++s) {
      if (ps[s] <= 0.0) {
        std::copy_n(&p[s * nx], nx, &cand[s * nx]);
        continue;
      }
      double top = grad[s * nx];
      for (std::size_t x = 1; x < nx; ++x) top = std::max(top, grad[s * nx + x]);
      double sum = 0.0;
      for (std::size_t x = 0; x < nx; ++x) {
        cand[s * nx + x] = p[s * nx + x] * std::exp2(eta * (grad[s * nx + x] - top));
        sum += cand[s * nx + x];
      }
      for (std::size_t x = 0; x < nx; ++x) cand[s * nx + x] /= sum;
    }
    const double cand_value = objective.value_and_gradient(cand, cand_grad);
    if (cand_value >= value - 1e-15) {
      p.swap(cand);
      grad.swap(cand_grad);
      value = cand_value;
      eta = std::min(eta * 1.5, 16.0);
    } else {
      eta *= 0.5;
      if (eta < 1e-8) break;
    }
  }

  if (options.polish) {
    std::vector<SimplexGroup> groups;
    for (std::size_t s = 0; s < ns; ++s) {
      if (ps[s] > 0.0) groups.push_back({{s * nx}, nx});
    }
    AscentStats stats;
    value = coordinate_ascent(
        p, groups, [&](std::span<const double> pt) { return objective.value(pt); },
        value, 1e-2, options.polish_min_step, options.max_iterations, stats);
    value = objective.value_and_gradient(p, grad);
  }
  result.value = value;
  result.gap = duality_gap(p, grad, ps, nx);
  return result;
}

InputSearchResult maximize_input_multistart(
    const InputObjective& objective, const InputSearchOptions& options,
    std::size_t random_starts, Rng& rng,
    std::optional<std::span<const double>> warm) {
  const std::size_t nx = objective.x_size(), ns = objective.s_size();
  std::vector<double> start(nx * ns, 1.0 / static_cast<double>(nx));
  InputSearchResult best = maximize_input(objective, start, options);
  if (warm) {
    auto r = maximize_input(objective, *warm, options);
    if (r.value > best.value) best = std::move(r);
  }
  for (std::size_t k = 0; k < random_starts; ++k) {
    for (std::size_t s = 0; s < ns; ++s) {
      sample_interior_row(rng, std::span<double>(start).subspan(s * nx, nx));
    }
    auto r = maximize_input(objective, start, options);
    if (r.value > best.value) best = std::move(r);
  }
  return best;
}

}  // namespace skcap::detail
