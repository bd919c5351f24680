#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "skcap/random.hpp"

namespace skcap::detail {

/// Linear combination of output entropies defining an objective over p(x|s):
///   joint*H(Yr,Ye) + yr*H(Yr) + ye*H(Ye)
///   + sum_{x,s} w(x,s) [cond_joint*H(Yr,Ye|x,s) + cond_yr*H(Yr|x,s)
///                       + cond_ye*H(Ye|x,s)]
/// with w(x,s) = p(s) p(x|s).
struct EntropyWeights {
  double joint = 0, yr = 0, ye = 0;
  double cond_joint = 0, cond_yr = 0, cond_ye = 0;
};

/// I(X,S;Yr|Ye) = H(Yr,Ye) - H(Ye) - H(Yr,Ye|X,S) + H(Ye|X,S).
inline constexpr EntropyWeights kConditionalInformation{1, 0, -1, -1, 0, 1};
/// I(X,S;Yr) = H(Yr) - H(Yr|X,S).
inline constexpr EntropyWeights kReceiverInformation{0, 1, 0, 0, -1, 0};
/// I(X,S;Yr) - I(Ye;Yr) = H(Yr,Ye) - H(Ye) - H(Yr|X,S).
inline constexpr EntropyWeights kDiscussionRate{1, 0, -1, 0, -1, 0};

/// Evaluates an EntropyWeights objective (in bits) and its gradient with
/// respect to w(x,s) for a fixed kernel laid out [x][s][yr][ye].
class InputObjective {
 public:
  InputObjective(std::span<const double> kernel,
                 std::span<const double> state_pmf, std::size_t x_size,
                 std::size_t s_size, std::size_t yr_size, std::size_t ye_size,
                 EntropyWeights weights);

  std::size_t x_size() const { return nx_; }
  std::size_t s_size() const { return ns_; }
  std::span<const double> state_pmf() const { return state_pmf_; }

  double value(std::span<const double> x_given_s) const;

  /// Fills `grad[s*X + x]` with the derivative with respect to w(x,s),
  /// up to a per-state additive constant. Returns the value.
  double value_and_gradient(std::span<const double> x_given_s,
                            std::span<double> grad) const;

 private:
  void output_marginals(std::span<const double> x_given_s) const;

  std::vector<double> kernel_, state_pmf_;
  std::size_t nx_, ns_, nr_, ne_;
  EntropyWeights w_;
  std::vector<double> kr_, ke_;   // p(yr|x,s), p(ye|x,s)
  std::vector<double> cond_term_;  // per-(x,s) conditional entropy combination
  mutable std::vector<double> q_, qr_, qe_;
};

struct InputSearchResult {
  std::vector<double> x_given_s;  // [s][x]
  double value = 0.0;
  /// Frank-Wolfe duality gap at the result: the maximum is at most
  /// value + gap.
  double gap = 0.0;
  std::size_t iterations = 0;
};

struct InputSearchOptions {
  std::size_t max_iterations = 400;
  /// Stop once the duality gap falls below this.
  double tolerance = 1e-10;
  bool polish = true;
  double polish_min_step = 1e-7;
};

/// Exponentiated-gradient ascent from `start` until the duality gap drops
/// below the tolerance, optionally followed by coordinate polishing that can
/// reach faces of the simplex. The objectives used here are concave.
InputSearchResult maximize_input(const InputObjective& objective,
                                 std::span<const double> start,
                                 const InputSearchOptions& options);

/// Best of: uniform start, optional warm start, and `random_starts`
/// interior starts drawn from `rng`. Ties keep the earlier start.
InputSearchResult maximize_input_multistart(
    const InputObjective& objective, const InputSearchOptions& options,
    std::size_t random_starts, Rng& rng,
    std::optional<std::span<const double>> warm = std::nullopt);

}  // namespace skcap::detail
