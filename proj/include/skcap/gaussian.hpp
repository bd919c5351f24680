#pragma once

namespace skcap {

/// Gaussian model yr = x + s + zr, ye = x + s + ze with E[x^2] <= P,
/// s ~ N(0, Q) known to the sender, zr ~ N(0, 1) and ze ~ N(0, 1 + Delta).
/// All parameters are linear-scale powers.
class GaussianParams {
 public:
  /// Throws DomainError unless every field is finite and nonnegative.
  GaussianParams(double p, double q, double delta);

  double p() const { return p_; }
  double q() const { return q_; }
  double delta() const { return delta_; }

 private:
  double p_, q_, delta_;
};

/// Auxiliary u = x + alpha s, with x of power P correlated with s at rho.
class GaussianAuxParams {
 public:
  /// Throws DomainError unless alpha is finite and rho lies in [0, 1).
  GaussianAuxParams(double alpha, double rho);

  double alpha() const { return alpha_; }
  double rho() const { return rho_; }

 private:
  double alpha_, rho_;
};

/// Largest rho with P(1 - rho^2) >= 1 - 1/(P + Q + 1). Requires P >= 1.
double rho_star(const GaussianParams& gp);

/// Lower bound without public discussion at rho = rho_star. Requires P >= 1.
double lb_no_discussion(const GaussianParams& gp);

/// Upper bound without public discussion (degraded-noise coupling).
double ub_no_discussion(const GaussianParams& gp);

/// Secret-key capacity with public discussion.
double capacity_discussion(const GaussianParams& gp);

struct AuxRate {
  double rate_bits = 0.0;
  /// h(u|s) - h(u|yr) in bits; the policy is admissible when >= 0.
  double constraint_slack_bits = 0.0;
  bool feasible = false;
};

/// Rate I(u;yr) - I(u;ye) of the policy u = x + alpha s, together with the
/// admissibility check h(u|s) >= h(u|yr). The rate is reported even when
/// infeasible.
AuxRate rate_aux_surface(const GaussianParams& gp, const GaussianAuxParams& aux);

struct GapReport {
  double gap_bits = 0.0;
  bool half_bit_ok = false;
};

/// ub_no_discussion - lb_no_discussion and whether it is within half a bit.
/// Requires P >= 1.
GapReport gap_analysis(const GaussianParams& gp);

}  // namespace skcap
