#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "skcap/channel.hpp"

namespace skcap {

/// Which family of auxiliary encoders the no-discussion bounds search over.
enum class AuxDomain {
  restricted_u,  ///< p(u) independent of the state
  general_u,     ///< p(u | s) free
};

struct OptimizerConfig {
  /// Auxiliary alphabet size; 0 selects |X|·|S| + 2.
  std::size_t u_size_max = 0;
  std::size_t restarts = 8;
  /// Lattice points per simplex coordinate used for seeding and for the
  /// coupling grid.
  std::size_t grid_resolution = 9;
  /// Iteration cap for each local refinement.
  std::size_t local_steps = 400;
  double step_tolerance = 1e-7;
  std::uint64_t seed = 1;
  AuxDomain domain = AuxDomain::general_u;

  /// Throws DomainError if a field is out of range.
  void validate() const;
  std::size_t effective_u_size(const StateChannel& channel) const;
};

/// Per-(x, s) joint law q(yr, ye | x, s) whose single-output marginals equal
/// those of a reference channel. Laid out like StateChannel::kernel.
class CouplingFamily {
 public:
  CouplingFamily(std::size_t x_size, std::size_t s_size, std::size_t yr_size,
                 std::size_t ye_size, std::vector<double> joint);

  /// Product coupling p(yr | x, s) p(ye | x, s); always a member.
  static CouplingFamily product_of(const StateChannel& channel);

  std::size_t x_size() const { return x_size_; }
  std::size_t s_size() const { return s_size_; }
  std::size_t yr_size() const { return yr_size_; }
  std::size_t ye_size() const { return ye_size_; }
  std::span<const double> joint() const { return joint_; }

  /// Largest absolute deviation of either marginal from `channel`'s.
  double marginal_error(const StateChannel& channel) const;

  /// The channel with the same state law whose kernel is this coupling.
  StateChannel as_channel(const StateChannel& reference) const;

 private:
  std::size_t x_size_, s_size_, yr_size_, ye_size_;
  std::vector<double> joint_;
};

using BoundPolicy =
    std::variant<std::monostate, AuxiliaryEncoderPolicy, InputPolicy>;

struct BoundResult {
  double value_bits = 0.0;
  BoundPolicy argmax_policy;
  std::optional<double> constraint_slack_bits;
  std::optional<CouplingFamily> coupling;
  std::map<std::string, double> diagnostics;
};

/// Information terms of an auxiliary policy on a channel, all in bits.
struct AuxInformation {
  double u_yr = 0.0;  ///< I(U;Yr)
  double u_ye = 0.0;  ///< I(U;Ye)
  double u_s = 0.0;   ///< I(U;S)
};

/// Evaluates I(U;Yr), I(U;Ye), I(U;S) for a policy through pairwise
/// marginals (the fast path used inside the optimizers).
AuxInformation aux_information(const StateChannel& channel,
                               const AuxiliaryEncoderPolicy& policy);

/// Best found value of max I(U;Yr) - I(U;Ye) subject to
/// I(U;Yr) - I(U;S) >= 0. Never below 0 (the constant-U policy is feasible).
BoundResult lower_bound_no_discussion(const StateChannel& channel,
                                      const OptimizerConfig& cfg);

/// Best found value of max I(U;Yr) - max(I(U;S), I(U;Ye)).
BoundResult secret_message_lower_bound(const StateChannel& channel,
                                       const OptimizerConfig& cfg);

/// min over couplings of max over p(x|s) of I(X,S;Yr|Ye).
BoundResult upper_bound_no_discussion(const StateChannel& channel,
                                      const OptimizerConfig& cfg);

/// max_{p(x|s)} I(X,S;Yr) - I(Ye;Yr), the first term of the discussion
/// lower bound (not clipped at 0).
BoundResult discussion_rate_lower_bound(const StateChannel& channel,
                                        const OptimizerConfig& cfg);

/// max( max_{p(x|s)} I(X,S;Yr) - I(Ye;Yr), lower_bound_no_discussion ).
/// diagnostics["branch"] is 1 when the first term attains the maximum.
BoundResult lower_bound_discussion(const StateChannel& channel,
                                   const OptimizerConfig& cfg);

/// max_{p(x|s)} I(X,S;Yr|Ye) on the channel's own joint kernel.
BoundResult upper_bound_discussion(const StateChannel& channel,
                                   const OptimizerConfig& cfg);

/// Tolerance for the Yr - (X,S) - Ye factorization test.
inline constexpr double kMarkovTolerance = 1e-10;

/// When the outputs are conditionally independent given (x, s), the
/// discussion upper bound is the capacity; returns it flagged with
/// diagnostics["capacity"] = 1. Otherwise returns nullopt.
std::optional<BoundResult> discussion_capacity_if_markov(
    const StateChannel& channel, const OptimizerConfig& cfg);

// Objectives over input policies, exposed for tests and the simulator.

/// I(X,S;Yr|Ye) in bits.
double input_conditional_information(const StateChannel& channel,
                                     const InputPolicy& policy);
/// I(X,S;Yr) - I(Ye;Yr) in bits (not clipped).
double input_discussion_rate(const StateChannel& channel,
                             const InputPolicy& policy);
/// I(X,S;Yr) in bits.
double input_receiver_information(const StateChannel& channel,
                                  const InputPolicy& policy);

}  // namespace skcap
