#include "skcap/bounds_dmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "input_objective.hpp"
#include "simplex_search.hpp"
#include "skcap/errors.hpp"
#include "skcap/random.hpp"
#include "transport.hpp"

namespace skcap {

namespace {

// Policies with I(U;Yr) - I(U;S) below -kFeasibilityTolerance are rejected.
constexpr double kFeasibilityTolerance = 1e-12;
// Score given to infeasible candidates: far below any feasible value so the
// ascent always prefers feasibility, but still graded by the violation.
constexpr double kInfeasiblePenalty = -100.0;
// Product grids over coupling blocks are enumerated exhaustively up to this
// many points; beyond it blocks are scanned one at a time.
constexpr std::size_t kExhaustiveCouplingGrid = 20000;
// Largest output alphabet for which the coupling grid is used.
constexpr std::size_t kCouplingGridAlphabet = 3;

// Largest |U|·|X|·|S|·|Yr|·|Ye| the searches accept.
constexpr double kSearchBudget = 8192;

// Stream tags keep the operations' random draws independent.
enum StreamTag : std::uint64_t {
  kTagAuxSearch = 1,
  kTagMessageSearch = 2,
  kTagCoupling = 3,
  kTagInputUpper = 4,
  kTagInputLower = 5,
};

}  // namespace

void OptimizerConfig::validate() const {
  if (restarts == 0) throw DomainError("OptimizerConfig: restarts must be >= 1");
  if (grid_resolution < 2) {
    throw DomainError("OptimizerConfig: grid_resolution must be >= 2");
  }
  if (local_steps == 0) {
    throw DomainError("OptimizerConfig: local_steps must be >= 1");
  }
  if (!(step_tolerance > 0.0)) {
    throw DomainError("OptimizerConfig: step_tolerance must be > 0");
  }
}

namespace {

void require_budget(const StateChannel& channel, const OptimizerConfig& cfg) {
  cfg.validate();
  const double atoms = static_cast<double>(cfg.effective_u_size(channel)) *
                       static_cast<double>(channel.kernel().size());
  if (atoms > kSearchBudget) {
    char count[32];
    std::snprintf(count, sizeof count, "%.3g", atoms);
    throw SizeError("search space of " + std::string(count) +
                    " atoms exceeds the optimizer budget of 8192; reduce --u-size");
  }
}

}  // namespace

std::size_t OptimizerConfig::effective_u_size(const StateChannel& channel) const {
  return u_size_max != 0 ? u_size_max : channel.x_size() * channel.s_size() + 2;
}

// ---------------------------------------------------------------------------
// CouplingFamily

CouplingFamily::CouplingFamily(std::size_t x_size, std::size_t s_size,
                               std::size_t yr_size, std::size_t ye_size,
                               std::vector<double> joint)
    : x_size_(x_size),
      s_size_(s_size),
      yr_size_(yr_size),
      ye_size_(ye_size),
      joint_(std::move(joint)) {
  validate_stochastic_rows(joint_, x_size_ * s_size_, yr_size_ * ye_size_,
                           "CouplingFamily");
}

CouplingFamily CouplingFamily::product_of(const StateChannel& channel) {
  std::vector<double> joint;
  joint.reserve(channel.kernel().size());
  for (std::size_t x = 0; x < channel.x_size(); ++x) {
    for (std::size_t s = 0; s < channel.s_size(); ++s) {
      for (std::size_t r = 0; r < channel.yr_size(); ++r) {
        for (std::size_t e = 0; e < channel.ye_size(); ++e) {
          joint.push_back(channel.yr_marginal(x, s, r) *
                          channel.ye_marginal(x, s, e));
        }
      }
    }
  }
  return CouplingFamily(channel.x_size(), channel.s_size(), channel.yr_size(),
                        channel.ye_size(), std::move(joint));
}

double CouplingFamily::marginal_error(const StateChannel& channel) const {
  if (channel.x_size() != x_size_ || channel.s_size() != s_size_ ||
      channel.yr_size() != yr_size_ || channel.ye_size() != ye_size_) {
    throw ShapeError("CouplingFamily: alphabet sizes differ from channel");
  }
  double err = 0.0;
  for (std::size_t x = 0; x < x_size_; ++x) {
    for (std::size_t s = 0; s < s_size_; ++s) {
      const double* q = &joint_[(x * s_size_ + s) * yr_size_ * ye_size_];
      for (std::size_t r = 0; r < yr_size_; ++r) {
        double row = 0.0;
        for (std::size_t e = 0; e < ye_size_; ++e) row += q[r * ye_size_ + e];
        err = std::max(err, std::abs(row - channel.yr_marginal(x, s, r)));
      }
      for (std::size_t e = 0; e < ye_size_; ++e) {
        double col = 0.0;
        for (std::size_t r = 0; r < yr_size_; ++r) col += q[r * ye_size_ + e];
        err = std::max(err, std::abs(col - channel.ye_marginal(x, s, e)));
      }
    }
  }
  return err;
}

StateChannel CouplingFamily::as_channel(const StateChannel& reference) const {
  return StateChannel(x_size_, s_size_, yr_size_, ye_size_,
                      std::vector<double>(reference.state_pmf().begin(),
                                          reference.state_pmf().end()),
                      joint_);
}

// ---------------------------------------------------------------------------
// Auxiliary-policy evaluation

namespace {

// Parameter vector layout: p(u|s) rows [s][u], then p(x|u,s) rows [u][s][x].
class AuxEvaluator {
 public:
  AuxEvaluator(const StateChannel& channel, std::size_t u_size)
      : nu_(u_size),
        nx_(channel.x_size()),
        ns_(channel.s_size()),
        nr_(channel.yr_size()),
        ne_(channel.ye_size()),
        ps_(channel.state_pmf().begin(), channel.state_pmf().end()),
        kr_(nx_ * ns_ * nr_),
        ke_(nx_ * ns_ * ne_),
        us_(nu_ * ns_),
        uyr_(nu_ * nr_),
        uye_(nu_ * ne_) {
    for (std::size_t x = 0; x < nx_; ++x) {
      for (std::size_t s = 0; s < ns_; ++s) {
        for (std::size_t r = 0; r < nr_; ++r) {
          kr_[(x * ns_ + s) * nr_ + r] = channel.yr_marginal(x, s, r);
        }
        for (std::size_t e = 0; e < ne_; ++e) {
          ke_[(x * ns_ + s) * ne_ + e] = channel.ye_marginal(x, s, e);
        }
      }
    }
  }

  std::size_t u_size() const { return nu_; }
  std::size_t point_size() const { return ns_ * nu_ + nu_ * ns_ * nx_; }
  std::size_t x_offset() const { return ns_ * nu_; }

  AuxInformation evaluate(std::span<const double> point) const {
    std::fill(uyr_.begin(), uyr_.end(), 0.0);
    std::fill(uye_.begin(), uye_.end(), 0.0);
    const double* u_given_s = point.data();
    const double* x_given_us = point.data() + x_offset();
    for (std::size_t u = 0; u < nu_; ++u) {
      for (std::size_t s = 0; s < ns_; ++s) {
        const double pus = ps_[s] * u_given_s[s * nu_ + u];
        us_[u * ns_ + s] = pus;
        if (pus <= 0.0) continue;
        for (std::size_t x = 0; x < nx_; ++x) {
          const double w = pus * x_given_us[(u * ns_ + s) * nx_ + x];
          if (w <= 0.0) continue;
          const std::size_t xs = x * ns_ + s;
          for (std::size_t r = 0; r < nr_; ++r) {
            uyr_[u * nr_ + r] += w * kr_[xs * nr_ + r];
          }
          for (std::size_t e = 0; e < ne_; ++e) {
            uye_[u * ne_ + e] += w * ke_[xs * ne_ + e];
          }
        }
      }
    }
    return {mutual_information_2d(uyr_, nu_, nr_),
            mutual_information_2d(uye_, nu_, ne_),
            mutual_information_2d(us_, nu_, ns_)};
  }

  AuxiliaryEncoderPolicy to_policy(std::span<const double> point) const {
    return AuxiliaryEncoderPolicy(
        nu_, ns_, nx_,
        std::vector<double>(point.begin(), point.begin() + x_offset()),
        std::vector<double>(point.begin() + x_offset(), point.end()));
  }

  std::vector<double> from_policy(const AuxiliaryEncoderPolicy& p) const {
    std::vector<double> point(p.u_given_s().begin(), p.u_given_s().end());
    point.insert(point.end(), p.x_given_us().begin(), p.x_given_us().end());
    return point;
  }

  std::vector<detail::SimplexGroup> groups(AuxDomain domain) const {
    std::vector<detail::SimplexGroup> g;
    if (domain == AuxDomain::restricted_u) {
      detail::SimplexGroup tied{{}, nu_};
      for (std::size_t s = 0; s < ns_; ++s) tied.offsets.push_back(s * nu_);
      g.push_back(std::move(tied));
    } else {
      for (std::size_t s = 0; s < ns_; ++s) g.push_back({{s * nu_}, nu_});
    }
    for (std::size_t us = 0; us < nu_ * ns_; ++us) {
      g.push_back({{x_offset() + us * nx_}, nx_});
    }
    return g;
  }

  // Deterministic seeds tried before the random lattice pool.
  std::vector<std::vector<double>> structured_seeds(AuxDomain domain) const {
    std::vector<std::vector<double>> seeds;
    auto blank = [&] {
      std::vector<double> p(point_size(), 0.0);
      std::fill(p.begin() + x_offset(), p.end(), 1.0 / static_cast<double>(nx_));
      return p;
    };
    auto x_row = [&](std::vector<double>& p, std::size_t u, std::size_t s) {
      return std::span<double>(p).subspan(x_offset() + (u * ns_ + s) * nx_, nx_);
    };
    {  // constant U: always feasible with value 0
      auto p = blank();
      for (std::size_t s = 0; s < ns_; ++s) p[s * nu_] = 1.0;
      seeds.push_back(std::move(p));
    }
    if (nu_ >= nx_) {  // U uniform on X's alphabet, X = U
      auto p = blank();
      for (std::size_t s = 0; s < ns_; ++s) {
        for (std::size_t u = 0; u < nx_; ++u) {
          p[s * nu_ + u] = 1.0 / static_cast<double>(nx_);
          auto row = x_row(p, u, s);
          std::fill(row.begin(), row.end(), 0.0);
          row[u] = 1.0;
        }
      }
      seeds.push_back(std::move(p));
    }
    if (domain == AuxDomain::general_u && ns_ > 1 && nu_ >= ns_) {  // U = S
      auto p = blank();
      for (std::size_t s = 0; s < ns_; ++s) p[s * nu_ + s] = 1.0;
      seeds.push_back(std::move(p));
    }
    if (domain == AuxDomain::general_u && ns_ > 1 && nu_ >= nx_ * ns_) {
      // U = (X, S) with X uniform.
      auto p = blank();
      for (std::size_t s = 0; s < ns_; ++s) {
        for (std::size_t x = 0; x < nx_; ++x) {
          const std::size_t u = x * ns_ + s;
          p[s * nu_ + u] = 1.0 / static_cast<double>(nx_);
          auto row = x_row(p, u, s);
          std::fill(row.begin(), row.end(), 0.0);
          row[x] = 1.0;
        }
      }
      seeds.push_back(std::move(p));
    }
    return seeds;
  }

  std::vector<double> lattice_point(Rng& rng, std::size_t resolution,
                                    AuxDomain domain) const {
    std::vector<double> p(point_size());
    for (std::size_t s = 0; s < ns_; ++s) {
      auto row = std::span<double>(p).subspan(s * nu_, nu_);
      if (domain == AuxDomain::restricted_u && s > 0) {
        std::copy_n(p.begin(), nu_, row.begin());
      } else {
        detail::sample_lattice_row(rng, row, resolution);
      }
    }
    for (std::size_t us = 0; us < nu_ * ns_; ++us) {
      detail::sample_lattice_row(
          rng, std::span<double>(p).subspan(x_offset() + us * nx_, nx_),
          resolution);
    }
    return p;
  }

 private:
  std::size_t nu_, nx_, ns_, nr_, ne_;
  std::vector<double> ps_, kr_, ke_;
  mutable std::vector<double> us_, uyr_, uye_;
};

struct AuxSearchOutcome {
  std::vector<double> point;
  double score = 0.0;
  AuxInformation info;
  std::map<std::string, double> diagnostics;
};

// Grid-seeded multi-start coordinate ascent of score(info) over policies.
AuxSearchOutcome search_aux(
    const StateChannel& channel, const OptimizerConfig& cfg, StreamTag tag,
    const std::function<double(const AuxInformation&)>& score,
    std::vector<std::vector<double>> extra_seeds = {}) {
  require_budget(channel, cfg);
  const AuxEvaluator eval(channel, cfg.effective_u_size(channel));
  const auto groups = eval.groups(cfg.domain);
  std::size_t evaluations = 0;
  auto objective = [&](std::span<const double> p) {
    return score(eval.evaluate(p));
  };

  Rng rng = Rng::derive(cfg.seed, 0, tag);
  auto seeds = eval.structured_seeds(cfg.domain);
  const std::size_t n_structured = seeds.size();

  // Coarse seeding: a pool of random simplex-lattice policies.
  const std::size_t pool = cfg.restarts * cfg.grid_resolution * 4;
  std::vector<std::pair<double, std::size_t>> ranked;
  std::vector<std::vector<double>> candidates;
  candidates.reserve(pool);
  for (std::size_t k = 0; k < pool; ++k) {
    candidates.push_back(eval.lattice_point(rng, cfg.grid_resolution, cfg.domain));
    ranked.emplace_back(objective(candidates.back()), k);
  }
  evaluations += pool;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  double best_grid = -std::numeric_limits<double>::infinity();
  for (const auto& s : seeds) best_grid = std::max(best_grid, objective(s));
  if (!ranked.empty()) best_grid = std::max(best_grid, ranked.front().first);
  for (std::size_t k = 0; k < std::min(cfg.restarts, ranked.size()); ++k) {
    seeds.push_back(candidates[ranked[k].second]);
  }
  for (auto& s : extra_seeds) seeds.push_back(std::move(s));

  AuxSearchOutcome best;
  best.score = -std::numeric_limits<double>::infinity();
  std::size_t sweeps = 0;
  for (auto& seed : seeds) {
    detail::AscentStats stats;
    const double v = detail::coordinate_ascent(
        seed, groups, objective, objective(seed), 0.25, cfg.step_tolerance,
        cfg.local_steps, stats);
    evaluations += stats.evaluations + 1;
    sweeps += stats.sweeps;
    if (v > best.score) {
      best.score = v;
      best.point = seed;
    }
  }
  best.info = eval.evaluate(best.point);
  best.diagnostics["u_size"] = static_cast<double>(eval.u_size());
  best.diagnostics["restarts_used"] = static_cast<double>(seeds.size());
  best.diagnostics["structured_seeds"] = static_cast<double>(n_structured);
  best.diagnostics["best_grid_value"] = best_grid;
  best.diagnostics["evaluations"] = static_cast<double>(evaluations);
  best.diagnostics["iterations"] = static_cast<double>(sweeps);
  return best;
}

AuxiliaryEncoderPolicy policy_of(const StateChannel& channel,
                                 const OptimizerConfig& cfg,
                                 std::span<const double> point) {
  return AuxEvaluator(channel, cfg.effective_u_size(channel)).to_policy(point);
}

// ---------------------------------------------------------------------------
// Input-policy objectives

detail::InputObjective input_objective(const StateChannel& channel,
                                       std::span<const double> kernel,
                                       detail::EntropyWeights weights) {
  return detail::InputObjective(kernel, channel.state_pmf(), channel.x_size(),
                                channel.s_size(), channel.yr_size(),
                                channel.ye_size(), weights);
}

detail::InputSearchOptions thorough_options(const OptimizerConfig& cfg) {
  detail::InputSearchOptions o;
  o.max_iterations = cfg.local_steps * 4;
  o.tolerance = 1e-12;
  o.polish = true;
  o.polish_min_step = cfg.step_tolerance;
  return o;
}

void require_matching(const StateChannel& channel, const InputPolicy& policy) {
  if (policy.s_size() != channel.s_size() || policy.x_size() != channel.x_size()) {
    throw ShapeError("input policy alphabets do not match channel");
  }
}

BoundResult maximize_over_inputs(const StateChannel& channel,
                                 std::span<const double> kernel,
                                 detail::EntropyWeights weights,
                                 const OptimizerConfig& cfg, StreamTag tag) {
  require_budget(channel, cfg);
  const auto objective = input_objective(channel, kernel, weights);
  Rng rng = Rng::derive(cfg.seed, 0, tag);
  auto best = detail::maximize_input_multistart(objective, thorough_options(cfg),
                                                cfg.restarts, rng);
  BoundResult result;
  result.value_bits = best.value;
  result.argmax_policy =
      InputPolicy(channel.s_size(), channel.x_size(), std::move(best.x_given_s));
  result.diagnostics["restarts_used"] = static_cast<double>(cfg.restarts + 1);
  result.diagnostics["duality_gap"] = best.gap;
  return result;
}

}  // namespace

AuxInformation aux_information(const StateChannel& channel,
                               const AuxiliaryEncoderPolicy& policy) {
  if (policy.s_size() != channel.s_size() || policy.x_size() != channel.x_size()) {
    throw ShapeError("aux_information: policy alphabets do not match channel");
  }
  const AuxEvaluator eval(channel, policy.u_size());
  return eval.evaluate(eval.from_policy(policy));
}

double input_conditional_information(const StateChannel& channel,
                                     const InputPolicy& policy) {
  require_matching(channel, policy);
  return std::max(0.0, input_objective(channel, channel.kernel(),
                                       detail::kConditionalInformation)
                           .value(policy.x_given_s()));
}

double input_discussion_rate(const StateChannel& channel,
                             const InputPolicy& policy) {
  require_matching(channel, policy);
  return input_objective(channel, channel.kernel(), detail::kDiscussionRate)
      .value(policy.x_given_s());
}

double input_receiver_information(const StateChannel& channel,
                                  const InputPolicy& policy) {
  require_matching(channel, policy);
  return std::max(0.0, input_objective(channel, channel.kernel(),
                                       detail::kReceiverInformation)
                           .value(policy.x_given_s()));
}

// ---------------------------------------------------------------------------
// No public discussion

namespace {

double message_score(const AuxInformation& i) {
  return i.u_yr - std::max(i.u_s, i.u_ye);
}

}  // namespace

BoundResult lower_bound_no_discussion(const StateChannel& channel,
                                      const OptimizerConfig& cfg) {
  // The message objective is a smooth minorant of the key objective on the
  // feasible set, so its optimum is a good seed past the constraint boundary.
  auto message = search_aux(channel, cfg, kTagMessageSearch, message_score);
  auto outcome = search_aux(
      channel, cfg, kTagAuxSearch,
      [](const AuxInformation& i) {
        const double slack = i.u_yr - i.u_s;
        if (slack < -kFeasibilityTolerance) return kInfeasiblePenalty + slack;
        return i.u_yr - i.u_ye;
      },
      {std::move(message.point)});
  BoundResult result;
  const double slack = outcome.info.u_yr - outcome.info.u_s;
  result.value_bits = std::max(0.0, outcome.info.u_yr - outcome.info.u_ye);
  result.argmax_policy = policy_of(channel, cfg, outcome.point);
  result.constraint_slack_bits = slack;
  result.diagnostics = std::move(outcome.diagnostics);
  result.diagnostics["i_u_yr"] = outcome.info.u_yr;
  result.diagnostics["i_u_ye"] = outcome.info.u_ye;
  result.diagnostics["i_u_s"] = outcome.info.u_s;
  return result;
}

BoundResult secret_message_lower_bound(const StateChannel& channel,
                                       const OptimizerConfig& cfg) {
  auto outcome = search_aux(channel, cfg, kTagMessageSearch, message_score);
  BoundResult result;
  result.value_bits = std::max(
      0.0, outcome.info.u_yr - std::max(outcome.info.u_s, outcome.info.u_ye));
  result.argmax_policy = policy_of(channel, cfg, outcome.point);
  result.diagnostics = std::move(outcome.diagnostics);
  result.diagnostics["i_u_yr"] = outcome.info.u_yr;
  result.diagnostics["i_u_ye"] = outcome.info.u_ye;
  result.diagnostics["i_u_s"] = outcome.info.u_s;
  return result;
}

namespace {

// State of the outer minimization over couplings.
class CouplingSearch {
 public:
  CouplingSearch(const StateChannel& channel, const OptimizerConfig& cfg)
      : channel_(channel), cfg_(cfg), kernel_(channel.kernel().size()) {
    const std::size_t nr = channel.yr_size(), ne = channel.ye_size();
    for (std::size_t x = 0; x < channel.x_size(); ++x) {
      for (std::size_t s = 0; s < channel.s_size(); ++s) {
        std::vector<double> row(nr), col(ne);
        for (std::size_t r = 0; r < nr; ++r) row[r] = channel.yr_marginal(x, s, r);
        for (std::size_t e = 0; e < ne; ++e) col[e] = channel.ye_marginal(x, s, e);
        blocks_.emplace_back(std::move(row), std::move(col));
      }
    }
    warm_ = std::vector<double>(channel.s_size() * channel.x_size(),
                                1.0 / static_cast<double>(channel.x_size()));
    inner_.max_iterations = cfg.local_steps;
    inner_.tolerance = 1e-9;
    inner_.polish = false;
  }

  using Point = std::vector<std::vector<double>>;  // free coords per block

  std::size_t block_count() const { return blocks_.size(); }
  const detail::TransportPolytope& block(std::size_t b) const { return blocks_[b]; }
  std::size_t evaluations() const { return evaluations_; }

  // Inner max of I(X,S;Yr|Ye) under the coupling; concave, so one
  // warm-started ascent suffices.
  double evaluate(const Point& point) {
    assemble(point);
    const auto objective =
        input_objective(channel_, kernel_, detail::kConditionalInformation);
    auto r = detail::maximize_input(objective, warm_, inner_);
    ++evaluations_;
    last_argmax_ = std::move(r.x_given_s);
    return r.value;
  }

  void accept_warm() { warm_ = last_argmax_; }
  std::span<const double> warm() const { return warm_; }

  const std::vector<double>& assemble(const Point& point) {
    const std::size_t cell = channel_.yr_size() * channel_.ye_size();
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      blocks_[b].complete(point[b],
                          std::span<double>(kernel_).subspan(b * cell, cell));
    }
    return kernel_;
  }

  // Entropic mirror step from `point`: with the input law fixed at the
  // last accepted argmax, the objective is I(X,S;Yr,Ye) minus a term fixed
  // by the marginals, whose gradient in block (x,s) is proportional to
  // log q(yr,ye|x,s) / p(yr,ye). Each block moves to q^(1-eta) p^eta and is
  // rescaled onto its marginals.
  Point mirror_step(const Point& point, double eta) {
    assemble(point);
    const std::size_t nx = channel_.x_size(), ns = channel_.s_size();
    const std::size_t nr = channel_.yr_size(), ne = channel_.ye_size();
    const std::size_t cell = nr * ne;
    std::vector<double> out(cell, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t s = 0; s < ns; ++s) {
        const double w = channel_.state_pmf()[s] * warm_[s * nx + x];
        for (std::size_t c = 0; c < cell; ++c) out[c] += w * kernel_[(x * ns + s) * cell + c];
      }
    Point next(blocks_.size());
    std::vector<double> q(cell);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      for (std::size_t c = 0; c < cell; ++c) {
        const double v = kernel_[b * cell + c];
        q[c] = v > 0.0 && out[c] > 0.0 ? std::pow(v, 1.0 - eta) * std::pow(out[c], eta) : 0.0;
      }
      blocks_[b].rescale(q);
      next[b] = blocks_[b].free_of(q);
    }
    return next;
  }

  // Mirror descent with a backtracking step; one coordinate sweep when the
  // mirror step stalls, then the sweep length halves.
  double descend_mirror(Point& point, double value, double initial_step) {
    double eta = 0.5, step = initial_step;
    const double min_step = std::max(cfg_.step_tolerance, 1e-6);
    for (std::size_t it = 0; it < cfg_.local_steps && step >= min_step; ++it) {
      bool improved = false;
      for (double e = eta; e >= 1e-4; e *= 0.25) {
        Point trial = mirror_step(point, e);
        if (!feasible(trial)) continue;
        const double v = evaluate(trial);
        if (v < value - 1e-15) {
          value = v;
          point = std::move(trial);
          accept_warm();
          improved = true;
          eta = std::min(1.0, 2.0 * e);
          break;
        }
      }
      if (!improved && !sweep(point, value, step)) step *= 0.5;
    }
    return value;
  }

  bool feasible(const Point& point) {
    const std::size_t cell = channel_.yr_size() * channel_.ye_size();
    std::vector<double> full(cell);
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      if (!blocks_[b].complete(point[b], full)) return false;
    return true;
  }

  // One pass of signed coordinate moves of length `step`.
  bool sweep(Point& point, double& value, double step) {
    bool improved = false;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const std::size_t d = blocks_[b].dims();
      for (std::size_t k = 0; k < d; ++k) {
        for (double sign : {1.0, -1.0}) {
          std::vector<double> dir(d, 0.0);
          dir[k] = sign;
          const double t = blocks_[b].max_step(point[b], dir, step);
          if (t <= 1e-15) continue;
          Point trial = point;
          trial[b][k] += sign * t;
          const double v = evaluate(trial);
          if (v < value - 1e-15) {
            value = v;
            point = std::move(trial);
            accept_warm();
            improved = true;
          }
        }
      }
    }
    return improved;
  }

 private:
  const StateChannel& channel_;
  const OptimizerConfig& cfg_;
  std::vector<detail::TransportPolytope> blocks_;
  std::vector<double> kernel_;
  std::vector<double> warm_, last_argmax_;
  detail::InputSearchOptions inner_;
  std::size_t evaluations_ = 0;
};

}  // namespace

BoundResult upper_bound_no_discussion(const StateChannel& channel,
                                      const OptimizerConfig& cfg) {
  require_budget(channel, cfg);
  CouplingSearch search(channel, cfg);
  const std::size_t nb = search.block_count();
  Rng rng = Rng::derive(cfg.seed, 0, kTagCoupling);

  CouplingSearch::Point best(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    best[b] = search.block(b).free_of(search.block(b).product());
  }
  double best_value = search.evaluate(best);
  search.accept_warm();

  const bool use_grid = std::max(channel.yr_size(), channel.ye_size()) <=
                        kCouplingGridAlphabet;
  bool exhaustive = false;
  std::size_t grid_points = 0;
  if (use_grid) {
    std::vector<std::vector<std::vector<double>>> grids(nb);
    double total = 1.0;
    for (std::size_t b = 0; b < nb; ++b) {
      grids[b] = search.block(b).grid(cfg.grid_resolution);
      total *= static_cast<double>(grids[b].size());
    }
    exhaustive = total <= static_cast<double>(kExhaustiveCouplingGrid);
    if (exhaustive) {
      std::vector<std::size_t> idx(nb, 0);
      CouplingSearch::Point point(nb);
      while (true) {
        for (std::size_t b = 0; b < nb; ++b) point[b] = grids[b][idx[b]];
        const double v = search.evaluate(point);
        ++grid_points;
        if (v < best_value) {
          best_value = v;
          best = point;
          search.accept_warm();
        }
        std::size_t k = nb;
        while (k-- > 0) {
          if (++idx[k] < grids[k].size()) break;
          idx[k] = 0;
        }
        if (k == static_cast<std::size_t>(-1)) break;
      }
    } else {
      // Block-coordinate scan of the per-block grids.
      for (std::size_t pass = 0; pass < 10; ++pass) {
        bool improved = false;
        for (std::size_t b = 0; b < nb; ++b) {
          for (const auto& g : grids[b]) {
            CouplingSearch::Point point = best;
            point[b] = g;
            const double v = search.evaluate(point);
            ++grid_points;
            if (v < best_value - 1e-15) {
              best_value = v;
              best = std::move(point);
              search.accept_warm();
              improved = true;
            }
          }
        }
        if (!improved) break;
      }
    }
  }

  // Local descent from the grid optimum and from random polytope points.
  const double initial_step =
      0.5 / static_cast<double>(std::max<std::size_t>(cfg.grid_resolution, 2) - 1);
  auto local = [&](CouplingSearch::Point& point, double value, double step) {
    return search.descend_mirror(point, value, step);
  };
  best_value = local(best, best_value, initial_step);
  for (std::size_t k = 0; k < cfg.restarts; ++k) {
    CouplingSearch::Point start(nb);
    for (std::size_t b = 0; b < nb; ++b) start[b] = search.block(b).random_point(rng);
    const double v0 = search.evaluate(start);
    search.accept_warm();
    const double v = local(start, v0, 4.0 * initial_step);
    if (v < best_value) {
      best_value = v;
      best = std::move(start);
    }
  }

  // Final value: thorough inner maximization at the minimizing coupling.
  std::vector<double> kernel = search.assemble(best);
  CouplingFamily coupling(channel.x_size(), channel.s_size(), channel.yr_size(),
                          channel.ye_size(), kernel);
  const auto objective =
      input_objective(channel, kernel, detail::kConditionalInformation);
  Rng inner_rng = Rng::derive(cfg.seed, 1, kTagCoupling);
  auto inner = detail::maximize_input_multistart(
      objective, thorough_options(cfg), cfg.restarts, inner_rng, search.warm());

  BoundResult result;
  result.value_bits = std::max(0.0, inner.value);
  result.argmax_policy =
      InputPolicy(channel.s_size(), channel.x_size(), std::move(inner.x_given_s));
  result.diagnostics["duality_gap"] = inner.gap;
  result.diagnostics["coupling_grid"] = use_grid ? 1.0 : 0.0;
  result.diagnostics["coupling_exhaustive"] = exhaustive ? 1.0 : 0.0;
  result.diagnostics["coupling_grid_points"] = static_cast<double>(grid_points);
  result.diagnostics["outer_evaluations"] = static_cast<double>(search.evaluations());
  result.diagnostics["outer_value"] = best_value;
  result.diagnostics["coupling_marginal_error"] = coupling.marginal_error(channel);
  result.coupling = std::move(coupling);
  return result;
}

// ---------------------------------------------------------------------------
// Public discussion

BoundResult upper_bound_discussion(const StateChannel& channel,
                                   const OptimizerConfig& cfg) {
  auto result = maximize_over_inputs(channel, channel.kernel(),
                                     detail::kConditionalInformation, cfg,
                                     kTagInputUpper);
  result.value_bits = std::max(0.0, result.value_bits);
  return result;
}

BoundResult discussion_rate_lower_bound(const StateChannel& channel,
                                        const OptimizerConfig& cfg) {
  return maximize_over_inputs(channel, channel.kernel(), detail::kDiscussionRate,
                              cfg, kTagInputLower);
}

BoundResult lower_bound_discussion(const StateChannel& channel,
                                   const OptimizerConfig& cfg) {
  auto branch1 = discussion_rate_lower_bound(channel, cfg);
  auto branch2 = lower_bound_no_discussion(channel, cfg);
  const double v1 = branch1.value_bits;
  const double v2 = branch2.value_bits;
  BoundResult result = v1 >= v2 ? std::move(branch1) : std::move(branch2);
  result.value_bits = std::max(v1, v2);
  result.diagnostics["branch"] = v1 >= v2 ? 1.0 : 2.0;
  result.diagnostics["branch1_value"] = v1;
  result.diagnostics["no_discussion_value"] = v2;
  return result;
}

std::optional<BoundResult> discussion_capacity_if_markov(
    const StateChannel& channel, const OptimizerConfig& cfg) {
  if (!channel.outputs_independent(kMarkovTolerance)) return std::nullopt;
  auto result = upper_bound_discussion(channel, cfg);
  result.diagnostics["capacity"] = 1.0;
  return result;
}

}  // namespace skcap
