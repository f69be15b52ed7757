#pragma once

// Pure-loss (zero-temperature) bosonic channel acting on covariance matrices.

#include <cmath>
#include <string>

#include "gaussian.hpp"

namespace lossprobe {

/// Loss channel with accumulated damping Gamma (rate times time) and
/// transmissivity eta = exp(-Gamma). Stored canonically as Gamma.
class LossChannel {
public:
  static LossChannel from_gamma(double gamma) {
    if (!std::isfinite(gamma) || gamma < 0.0)
      throw DomainError("damping Gamma must be finite and >= 0");
    return LossChannel(gamma);
  }
  static LossChannel from_eta(double eta) {
    if (!std::isfinite(eta) || eta <= 0.0 || eta > 1.0)
      throw DomainError("transmissivity eta must lie in (0, 1]");
    return LossChannel(-std::log(eta), eta);
  }
  static LossChannel identity() { return LossChannel(0.0); }

  double gamma() const { return gamma_; }
  double eta() const { return eta_; }

  /// Channel composition; damping adds.
  LossChannel then(const LossChannel& next) const { return from_gamma(gamma_ + next.gamma_); }

private:
  explicit LossChannel(double gamma) : gamma_(gamma), eta_(std::exp(-gamma)) {}
  LossChannel(double gamma, double eta) : gamma_(gamma), eta_(eta) {}

  double gamma_;
  double eta_;
};

/// sigma' = eta sigma + (1 - eta) I/2.
inline SingleModeCM evolve_single(const SingleModeCM& cm, const LossChannel& ch) {
  const double eta = ch.eta();
  return SingleModeCM(eta * cm.matrix() +
                      0.5 * (1.0 - eta) * PhaseSpaceMatrix<1>::Identity());
}

/// Loss on mode 1 only: A -> eta A + (1 - eta) I/2, C -> sqrt(eta) C, B unchanged.
inline TwoModeCM evolve_two(const TwoModeCM& cm, const LossChannel& ch) {
  const double eta = ch.eta();
  const double root = std::sqrt(eta);
  PhaseSpaceMatrix<2> m = cm.matrix();
  m.block<2, 2>(0, 0) = eta * m.block<2, 2>(0, 0) + 0.5 * (1.0 - eta) * Eigen::Matrix2d::Identity();
  m.block<2, 2>(0, 2) *= root;
  m.block<2, 2>(2, 0) *= root;
  return TwoModeCM(m);
}

inline constexpr double kClampTol = 1e-12;

namespace detail {

inline double clamp_nonnegative(double x, const char* name) {
  if (x >= 0.0) return x;
  if (x >= -kClampTol) return 0.0;
  throw NumericalError(std::string("output parameter ") + name + " is negative (" +
                       std::to_string(x) + ")");
}

}  // namespace detail

/// Squeezed thermal parameters (r_Gamma, n_Gamma) of the channel output.
inline SingleModeParams output_params_single(const SingleModeParams& p, const LossChannel& ch) {
  const SingleModeCM out = evolve_single(make_single_mode_st(p), ch);
  const double a = out(0, 0);
  const double b = out(1, 1);
  const double n = std::sqrt(a * b) - 0.5;
  const double r = 0.25 * std::log(a / b);
  return {detail::clamp_nonnegative(r, "r"), detail::clamp_nonnegative(n, "n_thermal")};
}

inline constexpr double kOutputResidualTol = 1e-9;

/// Parameters (r_Gamma, n_Gamma1, n_Gamma2) of the two-mode channel output.
///
/// The output keeps the (1/2)[[A I, C Z], [C Z, B I]] normal form. Inverting the
/// normal-form coefficients: with T = 1 + n1 + n2, (A + B)/2 = T cosh 2r,
/// C = T sinh 2r and (A - B)/2 = n1 - n2.
inline TwoModeParams output_params_two(const TwoModeParams& p, const LossChannel& ch) {
  const TwoModeCM out = evolve_two(make_two_mode_st(p), ch);
  const double a = 2.0 * out(0, 0);
  const double b = 2.0 * out(2, 2);
  const double c = 2.0 * out(0, 2);
  const double half_sum = 0.5 * (a + b);
  const double total = std::sqrt(std::max(half_sum * half_sum - c * c, 0.0));
  const double r = 0.5 * std::atanh(c / half_sum);
  const double diff = 0.5 * (a - b);
  const double thermal_sum = total - 1.0;
  TwoModeParams result{detail::clamp_nonnegative(r, "r"),
                       detail::clamp_nonnegative(0.5 * (thermal_sum + diff), "n_thermal1"),
                       detail::clamp_nonnegative(0.5 * (thermal_sum - diff), "n_thermal2")};

  const double residual =
      (make_two_mode_st(result).matrix() - out.matrix()).cwiseAbs().maxCoeff();
  if (residual > kOutputResidualTol) {
    throw NumericalError("output_params_two: normal-form inversion residual " +
                         std::to_string(residual));
  }
  return result;
}

}  // namespace lossprobe
