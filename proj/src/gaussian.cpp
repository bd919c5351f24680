#include "skcap/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "skcap/errors.hpp"

namespace skcap {

namespace {

// Relative slack for the admissibility inequality, which is tight at rho*.
constexpr double kFeasibilityRelTol = 1e-12;

double half_log2(double v) { return 0.5 * std::log2(v); }

void require_p_at_least_one(const GaussianParams& gp, const char* op) {
  if (gp.p() < 1.0) {
    throw DomainError(std::string(op) +
                      ": the lower bound assumes P >= 1 (got P = " +
                      std::to_string(gp.p()) + ")");
  }
}

}  // namespace

GaussianParams::GaussianParams(double p, double q, double delta)
    : p_(p), q_(q), delta_(delta) {
  for (double v : {p, q, delta}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DomainError("GaussianParams: P, Q and Delta must be finite and >= 0");
    }
  }
}

GaussianAuxParams::GaussianAuxParams(double alpha, double rho)
    : alpha_(alpha), rho_(rho) {
  if (!std::isfinite(alpha)) throw DomainError("GaussianAuxParams: alpha must be finite");
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw DomainError("GaussianAuxParams: rho must lie in [0, 1)");
  }
}

double rho_star(const GaussianParams& gp) {
  require_p_at_least_one(gp, "rho_star");
  const double p = gp.p(), q = gp.q();
  return std::sqrt(std::max(0.0, 1.0 - (1.0 - 1.0 / (p + q + 1.0)) / p));
}

double lb_no_discussion(const GaussianParams& gp) {
  const double rho = rho_star(gp);
  const double p = gp.p(), q = gp.q(), d = gp.delta();
  const double signal = p + q + 2.0 * rho * std::sqrt(p * q);
  return half_log2(1.0 + d * signal / (signal + 1.0 + d));
}

double ub_no_discussion(const GaussianParams& gp) {
  const double p = gp.p(), q = gp.q(), d = gp.delta();
  const double signal = p + q + 2.0 * std::sqrt(p * q);
  return half_log2(1.0 + d * signal / (signal + 1.0 + d));
}

double capacity_discussion(const GaussianParams& gp) {
  const double p = gp.p(), q = gp.q(), d = gp.delta();
  const double signal = p + q + 2.0 * std::sqrt(p * q);
  return half_log2(1.0 + (1.0 + d) * signal / (signal + 1.0 + d));
}

AuxRate rate_aux_surface(const GaussianParams& gp, const GaussianAuxParams& aux) {
  const double p = gp.p(), q = gp.q(), d = gp.delta();
  const double a = aux.alpha(), rho = aux.rho();
  const double pq = std::sqrt(p * q);
  const double var_u = p + a * a * q + 2.0 * rho * a * pq;
  const double mismatch = p * q * (a - 1.0) * (a - 1.0) * (1.0 - rho * rho);
  const double ratio = var_u > 0.0 ? mismatch / var_u : 0.0;
  const double received = p + q + 1.0 + 2.0 * rho * pq;

  AuxRate out;
  out.rate_bits = half_log2(1.0 + d / (1.0 + ratio)) +
                  half_log2(received / (received + d));

  // h(u|s) >= h(u|yr):  P(1 - rho^2) >= (mismatch + var_u) / received.
  const double lhs = p * (1.0 - rho * rho);
  const double rhs = (mismatch + var_u) / received;
  out.feasible = lhs >= rhs - kFeasibilityRelTol * std::max(1.0, rhs);
  out.constraint_slack_bits =
      lhs > 0.0 && rhs > 0.0 ? half_log2(lhs / rhs)
                             : (lhs >= rhs ? 0.0 : -std::numeric_limits<double>::infinity());
  return out;
}

GapReport gap_analysis(const GaussianParams& gp) {
  require_p_at_least_one(gp, "gap_analysis");
  GapReport r;
  r.gap_bits = ub_no_discussion(gp) - lb_no_discussion(gp);
  r.half_bit_ok = r.gap_bits <= 0.5 + 1e-12;
  return r;
}

}  // namespace skcap
