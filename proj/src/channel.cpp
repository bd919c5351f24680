#include "skcap/channel.hpp"

#include <cmath>
#include <string>

#include "skcap/errors.hpp"

namespace skcap {

void validate_stochastic_rows(std::span<const double> v, std::size_t rows,
                              std::size_t cols, const char* what) {
  if (v.size() != rows * cols) {
    throw ShapeError(std::string(what) + ": expected " +
                     std::to_string(rows * cols) + " entries, got " +
                     std::to_string(v.size()));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double p = v[r * cols + c];
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw ProbabilityError(std::string(what) + ": row " +
                               std::to_string(r) +
                               " has a negative or non-finite entry");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kMassTolerance) {
      throw ProbabilityError(std::string(what) + ": row " + std::to_string(r) +
                             " sums to " + std::to_string(sum));
    }
  }
}

StateChannel::StateChannel(std::size_t x_size, std::size_t s_size,
                           std::size_t yr_size, std::size_t ye_size,
                           std::vector<double> state_pmf,
                           std::vector<double> kernel)
    : x_size_(x_size),
      s_size_(s_size),
      yr_size_(yr_size),
      ye_size_(ye_size),
      state_pmf_(std::move(state_pmf)),
      kernel_(std::move(kernel)) {
  if (x_size_ == 0 || s_size_ == 0 || yr_size_ == 0 || ye_size_ == 0) {
    throw ShapeError("StateChannel: alphabet sizes must be positive");
  }
  validate_stochastic_rows(state_pmf_, 1, s_size_, "StateChannel state_pmf");
  validate_stochastic_rows(kernel_, x_size_ * s_size_, yr_size_ * ye_size_,
                           "StateChannel kernel");
}

StateChannel StateChannel::independent(std::size_t x_size, std::size_t s_size,
                                       std::size_t yr_size,
                                       std::size_t ye_size,
                                       std::vector<double> state_pmf,
                                       std::span<const double> yr_given_xs,
                                       std::span<const double> ye_given_xs) {
  validate_stochastic_rows(yr_given_xs, x_size * s_size, yr_size,
                           "StateChannel::independent yr marginal");
  validate_stochastic_rows(ye_given_xs, x_size * s_size, ye_size,
                           "StateChannel::independent ye marginal");
  std::vector<double> kernel(x_size * s_size * yr_size * ye_size);
  for (std::size_t xs = 0; xs < x_size * s_size; ++xs) {
    for (std::size_t r = 0; r < yr_size; ++r) {
      for (std::size_t e = 0; e < ye_size; ++e) {
        kernel[(xs * yr_size + r) * ye_size + e] =
            yr_given_xs[xs * yr_size + r] * ye_given_xs[xs * ye_size + e];
      }
    }
  }
  return StateChannel(x_size, s_size, yr_size, ye_size, std::move(state_pmf),
                      std::move(kernel));
}

double StateChannel::yr_marginal(std::size_t x, std::size_t s,
                                 std::size_t yr) const {
  double p = 0.0;
  for (std::size_t e = 0; e < ye_size_; ++e) p += kernel(x, s, yr, e);
  return p;
}

double StateChannel::ye_marginal(std::size_t x, std::size_t s,
                                 std::size_t ye) const {
  double p = 0.0;
  for (std::size_t r = 0; r < yr_size_; ++r) p += kernel(x, s, r, ye);
  return p;
}

bool StateChannel::outputs_independent(double tol) const {
  for (std::size_t x = 0; x < x_size_; ++x) {
    for (std::size_t s = 0; s < s_size_; ++s) {
      for (std::size_t r = 0; r < yr_size_; ++r) {
        const double pr = yr_marginal(x, s, r);
        for (std::size_t e = 0; e < ye_size_; ++e) {
          if (std::abs(kernel(x, s, r, e) - pr * ye_marginal(x, s, e)) > tol) {
            return false;
          }
        }
      }
    }
  }
  return true;
}

AuxiliaryEncoderPolicy::AuxiliaryEncoderPolicy(std::size_t u_size,
                                               std::size_t s_size,
                                               std::size_t x_size,
                                               std::vector<double> u_given_s,
                                               std::vector<double> x_given_us)
    : u_size_(u_size),
      s_size_(s_size),
      x_size_(x_size),
      u_given_s_(std::move(u_given_s)),
      x_given_us_(std::move(x_given_us)) {
  if (u_size_ == 0 || s_size_ == 0 || x_size_ == 0) {
    throw ShapeError("AuxiliaryEncoderPolicy: alphabet sizes must be positive");
  }
  validate_stochastic_rows(u_given_s_, s_size_, u_size_, "policy p(u|s)");
  validate_stochastic_rows(x_given_us_, u_size_ * s_size_, x_size_,
                           "policy p(x|u,s)");
}

bool AuxiliaryEncoderPolicy::u_independent_of_s(double tol) const {
  for (std::size_t s = 1; s < s_size_; ++s) {
    for (std::size_t u = 0; u < u_size_; ++u) {
      if (std::abs(u_given_s(s, u) - u_given_s(0, u)) > tol) return false;
    }
  }
  return true;
}

InputPolicy::InputPolicy(std::size_t s_size, std::size_t x_size,
                         std::vector<double> x_given_s)
    : s_size_(s_size), x_size_(x_size), x_given_s_(std::move(x_given_s)) {
  if (s_size_ == 0 || x_size_ == 0) {
    throw ShapeError("InputPolicy: alphabet sizes must be positive");
  }
  validate_stochastic_rows(x_given_s_, s_size_, x_size_, "policy p(x|s)");
}

InputPolicy InputPolicy::uniform(std::size_t s_size, std::size_t x_size) {
  return InputPolicy(s_size, x_size,
                     std::vector<double>(s_size * x_size, 1.0 / x_size));
}

JointPmf induce_joint(const StateChannel& channel,
                      const AuxiliaryEncoderPolicy& policy) {
  if (policy.s_size() != channel.s_size() ||
      policy.x_size() != channel.x_size()) {
    throw ShapeError("induce_joint: policy alphabets do not match channel");
  }
  const std::size_t nu = policy.u_size(), nx = channel.x_size(),
                    ns = channel.s_size(), nr = channel.yr_size(),
                    ne = channel.ye_size();
  std::vector<double> probs(nu * nx * ns * nr * ne);
  std::size_t flat = 0;
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t s = 0; s < ns; ++s) {
        const double w = channel.state_pmf()[s] * policy.u_given_s(s, u) *
                         policy.x_given_us(u, s, x);
        for (double k : channel.block(x, s)) probs[flat++] = w * k;
      }
    }
  }
  return JointPmf({Var::U, Var::X, Var::S, Var::Yr, Var::Ye},
                  {nu, nx, ns, nr, ne}, std::move(probs));
}

JointPmf induce_joint(const StateChannel& channel, const InputPolicy& policy) {
  if (policy.s_size() != channel.s_size() ||
      policy.x_size() != channel.x_size()) {
    throw ShapeError("induce_joint: policy alphabets do not match channel");
  }
  const std::size_t nx = channel.x_size(), ns = channel.s_size(),
                    nr = channel.yr_size(), ne = channel.ye_size();
  std::vector<double> probs(nx * ns * nr * ne);
  std::size_t flat = 0;
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t s = 0; s < ns; ++s) {
      const double w = channel.state_pmf()[s] * policy.x_given_s(s, x);
      for (double k : channel.block(x, s)) probs[flat++] = w * k;
    }
  }
  return JointPmf({Var::X, Var::S, Var::Yr, Var::Ye}, {nx, ns, nr, ne},
                  std::move(probs));
}

StateChannel augment_receiver(const StateChannel& channel, SideInfo mode) {
  if (mode == SideInfo::none) return channel;
  const std::size_t nx = channel.x_size(), ns = channel.s_size(),
                    nr = channel.yr_size(), ne = channel.ye_size();
  const std::size_t nr_aug = nr * ns;
  std::vector<double> kernel(nx * ns * nr_aug * ne, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t r = 0; r < nr; ++r) {
        for (std::size_t e = 0; e < ne; ++e) {
          const std::size_t r_aug = r * ns + s;
          kernel[((x * ns + s) * nr_aug + r_aug) * ne + e] =
              channel.kernel(x, s, r, e);
        }
      }
    }
  }
  return StateChannel(nx, ns, nr_aug, ne,
                      std::vector<double>(channel.state_pmf().begin(),
                                          channel.state_pmf().end()),
                      std::move(kernel));
}

}  // namespace skcap
