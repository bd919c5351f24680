#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "skcap/joint_pmf.hpp"

namespace skcap {

/// Finite-alphabet memoryless wiretap channel controlled by an i.i.d. state.
///
/// The kernel is stored as a dense tensor indexed [x][s][yr][ye] (last axis
/// fastest) holding p(yr, ye | x, s); `state_pmf` holds p(s). Both are
/// validated on construction: entries must be non-negative and every
/// conditional distribution must sum to 1 within kMassTolerance.
class StateChannel {
 public:
  StateChannel(std::size_t x_size, std::size_t s_size, std::size_t yr_size,
               std::size_t ye_size, std::vector<double> state_pmf,
               std::vector<double> kernel);

  /// Builds a channel whose outputs are conditionally independent given
  /// (x, s): p(yr, ye | x, s) = p(yr | x, s) p(ye | x, s). The marginals are
  /// laid out [x][s][yr] and [x][s][ye].
  static StateChannel independent(std::size_t x_size, std::size_t s_size,
                                  std::size_t yr_size, std::size_t ye_size,
                                  std::vector<double> state_pmf,
                                  std::span<const double> yr_given_xs,
                                  std::span<const double> ye_given_xs);

  std::size_t x_size() const { return x_size_; }
  std::size_t s_size() const { return s_size_; }
  std::size_t yr_size() const { return yr_size_; }
  std::size_t ye_size() const { return ye_size_; }

  std::span<const double> state_pmf() const { return state_pmf_; }
  std::span<const double> kernel() const { return kernel_; }

  double kernel(std::size_t x, std::size_t s, std::size_t yr,
                std::size_t ye) const {
    return kernel_[((x * s_size_ + s) * yr_size_ + yr) * ye_size_ + ye];
  }
  /// The yr_size x ye_size block p(·,· | x, s).
  std::span<const double> block(std::size_t x, std::size_t s) const {
    return std::span<const double>(kernel_).subspan(
        (x * s_size_ + s) * yr_size_ * ye_size_, yr_size_ * ye_size_);
  }
  /// p(yr | x, s), summing the eavesdropper output out.
  double yr_marginal(std::size_t x, std::size_t s, std::size_t yr) const;
  /// p(ye | x, s), summing the receiver output out.
  double ye_marginal(std::size_t x, std::size_t s, std::size_t ye) const;

  /// Whether p(yr, ye | x, s) = p(yr | x, s) p(ye | x, s) for all entries
  /// within `tol`.
  bool outputs_independent(double tol) const;

 private:
  std::size_t x_size_, s_size_, yr_size_, ye_size_;
  std::vector<double> state_pmf_;
  std::vector<double> kernel_;
};

/// Auxiliary-variable encoder: p(u | s) laid out [s][u] and p(x | u, s)
/// laid out [u][s][x]. Every conditional row is validated.
class AuxiliaryEncoderPolicy {
 public:
  AuxiliaryEncoderPolicy(std::size_t u_size, std::size_t s_size,
                         std::size_t x_size, std::vector<double> u_given_s,
                         std::vector<double> x_given_us);

  std::size_t u_size() const { return u_size_; }
  std::size_t s_size() const { return s_size_; }
  std::size_t x_size() const { return x_size_; }
  std::span<const double> u_given_s() const { return u_given_s_; }
  std::span<const double> x_given_us() const { return x_given_us_; }

  double u_given_s(std::size_t s, std::size_t u) const {
    return u_given_s_[s * u_size_ + u];
  }
  double x_given_us(std::size_t u, std::size_t s, std::size_t x) const {
    return x_given_us_[(u * s_size_ + s) * x_size_ + x];
  }

  /// True when every row of p(u | s) is the same distribution.
  bool u_independent_of_s(double tol = kMassTolerance) const;

 private:
  std::size_t u_size_, s_size_, x_size_;
  std::vector<double> u_given_s_;
  std::vector<double> x_given_us_;
};

/// Channel input law p(x | s), laid out [s][x].
class InputPolicy {
 public:
  InputPolicy(std::size_t s_size, std::size_t x_size,
              std::vector<double> x_given_s);

  /// p(x | s) uniform over x for every state.
  static InputPolicy uniform(std::size_t s_size, std::size_t x_size);

  std::size_t s_size() const { return s_size_; }
  std::size_t x_size() const { return x_size_; }
  std::span<const double> x_given_s() const { return x_given_s_; }
  double x_given_s(std::size_t s, std::size_t x) const {
    return x_given_s_[s * x_size_ + x];
  }

 private:
  std::size_t s_size_, x_size_;
  std::vector<double> x_given_s_;
};

/// Joint law over (U, X, S, Yr, Ye) obtained by composing p(s), the policy
/// and the channel kernel; U -> (X, S) -> (Yr, Ye) holds by construction.
JointPmf induce_joint(const StateChannel& channel,
                      const AuxiliaryEncoderPolicy& policy);

/// Joint law over (X, S, Yr, Ye) for an input policy p(x | s).
JointPmf induce_joint(const StateChannel& channel, const InputPolicy& policy);

enum class SideInfo { none, full_state };

/// Receiver-output augmentation for two-sided state information. With
/// `full_state` the receiver observes (yr, s): the new receiver alphabet is
/// Yr x S indexed yr * |S| + s, and the state is routed deterministically.
StateChannel augment_receiver(const StateChannel& channel, SideInfo mode);

/// Checks that `v` is a row-stochastic matrix of `rows` x `cols` within
/// kMassTolerance; throws ProbabilityError naming `what` otherwise.
void validate_stochastic_rows(std::span<const double> v, std::size_t rows,
                              std::size_t cols, const char* what);

}  // namespace skcap
