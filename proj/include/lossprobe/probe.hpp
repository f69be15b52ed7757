#pragma once

// Energy-constrained thermal probes for loss detection: resource-level
// parametrization, output QCBs, closed forms for squeezed-vacuum probes, the
// threshold energy above which two-mode probes win, and random sweeps.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "channel.hpp"
#include "chernoff.hpp"
#include "scalar_search.hpp"

namespace lossprobe {

/// Resource-level probe description: total mean photon number N, squeezing
/// fraction beta, and (two-mode only) the fraction gamma of thermal photons
/// placed in the probing mode.
struct ProbeSpec {
  int modes = 1;
  double n_total = 0.0;
  double beta = 0.0;
  double gamma = 1.0;
};

inline void validate(const ProbeSpec& spec) {
  if (spec.modes != 1 && spec.modes != 2) throw DomainError("probe modes must be 1 or 2");
  if (!std::isfinite(spec.n_total) || spec.n_total < 0.0) throw DomainError("probe energy N must be >= 0");
  if (!(spec.beta >= 0.0 && spec.beta <= 1.0)) throw DomainError("squeezing fraction beta must lie in [0, 1]");
  if (!(spec.gamma >= 0.0 && spec.gamma <= 1.0)) throw DomainError("thermal asymmetry gamma must lie in [0, 1]");
}

/// n_S = beta N, n_T = (1 - beta) N / (1 + 2 beta N), r = asinh sqrt(n_S).
inline SingleModeParams single_mode_params(double n_total, double beta) {
  validate(ProbeSpec{1, n_total, beta, 1.0});
  const double n_s = beta * n_total;
  return {std::asinh(std::sqrt(n_s)), (1.0 - beta) * n_total / (1.0 + 2.0 * beta * n_total)};
}

/// n_S = beta N / 2, thermal budget (1 - beta) N / (1 + beta N) split gamma : 1 - gamma.
inline TwoModeParams two_mode_params(double n_total, double beta, double gamma) {
  validate(ProbeSpec{2, n_total, beta, gamma});
  const double n_s = 0.5 * beta * n_total;
  const double thermal = (1.0 - beta) * n_total / (1.0 + beta * n_total);
  return {std::asinh(std::sqrt(n_s)), gamma * thermal, (1.0 - gamma) * thermal};
}

using ProbeParams = std::variant<SingleModeParams, TwoModeParams>;

inline ProbeParams params_from_spec(const ProbeSpec& spec) {
  validate(spec);
  if (spec.modes == 1) return single_mode_params(spec.n_total, spec.beta);
  return two_mode_params(spec.n_total, spec.beta, spec.gamma);
}

/// Output QCB of a single-mode probe: lossless vs lossy channel.
inline DiscriminationReport q1_report(double n_total, double beta, const LossChannel& ch, int copies = 1) {
  const SingleModeParams in = single_mode_params(n_total, beta);
  return qcb(in, output_params_single(in, ch), copies);
}

inline DiscriminationReport q2_report(double n_total, double beta, double gamma, const LossChannel& ch,
                                      int copies = 1) {
  const TwoModeParams in = two_mode_params(n_total, beta, gamma);
  return qcb(in, output_params_two(in, ch), copies);
}

inline double q1(double n_total, double beta, const LossChannel& ch) { return q1_report(n_total, beta, ch).q; }

inline double q2(double n_total, double beta, double gamma, const LossChannel& ch) {
  return q2_report(n_total, beta, gamma, ch).q;
}

namespace detail {

inline void check_analytic_domain(double n_total, double eta) {
  if (!std::isfinite(n_total) || n_total < 0.0) throw DomainError("N must be >= 0");
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta must lie in (0, 1]");
}

}  // namespace detail

/// QCB of the single-mode squeezed vacuum with N photons: 1/sqrt(1 + N(1 - eta^2)).
inline double q1_analytic(double n_total, double eta) {
  detail::check_analytic_domain(n_total, eta);
  return 1.0 / std::sqrt(1.0 + n_total * (1.0 - eta * eta));
}

/// QCB of the two-mode squeezed vacuum with N photons: 4/[2 + N(1 - sqrt(eta))]^2.
inline double q2_analytic(double n_total, double eta) {
  detail::check_analytic_domain(n_total, eta);
  const double denom = 2.0 + n_total * (1.0 - std::sqrt(eta));
  return 4.0 / (denom * denom);
}

struct ProbeOptimum {
  double beta;
  double gamma;  ///< equals the fixed gamma, or the optimized one for two modes
  double q;
};

inline constexpr std::size_t kProbeGridPoints = 101;
inline constexpr double kProbeTol = 1e-6;

/// Minimize the output QCB over beta in [0, 1] at fixed energy. For two modes
/// gamma is either held fixed or optimized jointly (grid over both, then
/// golden refinement of beta and gamma in turn).
inline ProbeOptimum optimize_beta(double n_total, const LossChannel& ch, int modes,
                                  std::optional<double> gamma_probe = std::nullopt) {
  if (!(n_total > 0.0)) throw DomainError("optimize_beta: N must be > 0");
  if (modes == 1) {
    const auto best = search::grid_then_golden([&](double b) { return q1(n_total, b, ch); }, 0.0, 1.0,
                                               kProbeGridPoints, kProbeTol);
    return {best.x, 1.0, best.value};
  }
  if (modes != 2) throw DomainError("optimize_beta: modes must be 1 or 2");
  if (gamma_probe) {
    const double g = *gamma_probe;
    const auto best = search::grid_then_golden([&](double b) { return q2(n_total, b, g, ch); }, 0.0, 1.0,
                                               kProbeGridPoints, kProbeTol);
    return {best.x, g, best.value};
  }
  // joint grid, coarser in gamma
  constexpr std::size_t gamma_points = 21;
  ProbeOptimum best{0.0, 0.0, 2.0};
  for (std::size_t j = 0; j < gamma_points; ++j) {
    const double g = static_cast<double>(j) / static_cast<double>(gamma_points - 1);
    for (std::size_t i = 0; i < kProbeGridPoints; ++i) {
      const double b = static_cast<double>(i) / static_cast<double>(kProbeGridPoints - 1);
      const double v = q2(n_total, b, g, ch);
      if (v < best.q) best = {b, g, v};
    }
  }
  const double g_step = 1.0 / static_cast<double>(gamma_points - 1);
  const double b_step = 1.0 / static_cast<double>(kProbeGridPoints - 1);
  const auto gr = search::golden_section([&](double g) { return q2(n_total, best.beta, g, ch); },
                                         std::max(0.0, best.gamma - g_step), std::min(1.0, best.gamma + g_step),
                                         kProbeTol);
  if (gr.value < best.q) best = {best.beta, gr.x, gr.value};
  const auto br = search::golden_section([&](double b) { return q2(n_total, b, best.gamma, ch); },
                                         std::max(0.0, best.beta - b_step), std::min(1.0, best.beta + b_step),
                                         kProbeTol);
  if (br.value < best.q) best = {br.x, best.gamma, br.value};
  return best;
}

/// Root sqrt(eta_c) of x^3 + x^2 + x - 1, obtained by equating the small-N
/// slopes (1 - eta^2)/2 and 1 - sqrt(eta) of the two closed-form QCBs.
inline double critical_root() {
  // Newton from a bracketed bisection start; the cubic is increasing on [0, 1]
  auto p = [](double x) { return ((x + 1.0) * x + 1.0) * x - 1.0; };
  double x = search::bisect(p, 0.0, 1.0, 1e-6);
  for (int i = 0; i < 50; ++i) {
    const double step = p(x) / ((3.0 * x + 2.0) * x + 1.0);
    x -= step;
    if (std::abs(step) < 1e-17) break;
  }
  return x;
}

/// Transmissivity below which the two-mode squeezed vacuum beats the
/// single-mode one at every energy.
inline double critical_transmissivity() {
  const double x = critical_root();
  return x * x;
}

/// Small-N slope difference (1 - eta^2)/2 - (1 - sqrt(eta)); zero at eta_c.
inline double small_energy_slope_gap(double eta) { return 0.5 * (1.0 - eta * eta) - (1.0 - std::sqrt(eta)); }

/// Independent check of eta_c: bisection on the small-N slope gap.
inline double critical_transmissivity_by_bisection() {
  return search::bisect(small_energy_slope_gap, 0.05, 0.9, 1e-14);
}

inline constexpr double kThresholdNMax = 1e3;
inline constexpr int kThresholdDoublings = 3;
inline constexpr double kThresholdTol = 1e-8;

/// Smallest N >= 0 at which q2_analytic(N, eta) <= q1_analytic(N, eta).
///
/// Zero for eta <= eta_c. Otherwise the sign change of (Q2 - Q1)/N is bracketed
/// in [0, N_max], N_max = 1e3 doubled up to three times; beyond that a
/// NumericalError reports that the threshold exceeds N_max.
inline double threshold_energy(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("threshold_energy: eta must lie in (0, 1)");
  const double slope = small_energy_slope_gap(eta);
  if (slope <= 0.0) return 0.0;
  auto gap = [eta, slope](double n) {
    if (n == 0.0) return slope;
    return (q2_analytic(n, eta) - q1_analytic(n, eta)) / n;
  };
  double n_max = kThresholdNMax;
  for (int i = 0; gap(n_max) > 0.0; ++i) {
    if (i == kThresholdDoublings)
      throw NumericalError("threshold_energy: threshold exceeds N_max = " + std::to_string(n_max) +
                           " at eta = " + std::to_string(eta));
    n_max *= 2.0;
  }
  return search::bisect(gap, 0.0, n_max, kThresholdTol);
}

struct ThresholdCurvePoint {
  double eta;
  double n_threshold;
};

struct QuadraticFit {
  double c1;  ///< linear coefficient
  double c2;  ///< quadratic coefficient
  double rms_residual;
  std::vector<ThresholdCurvePoint> samples;
};

/// Least-squares fit N_th ~ c1 (eta - eta_c) + c2 (eta - eta_c)^2 on
/// [eta_c, eta_c + width] using `points` equally spaced samples.
inline QuadraticFit threshold_fit_near_critical(double width = 0.05, int points = 50) {
  if (points < 3) throw DomainError("threshold_fit_near_critical: need at least 3 points");
  const double eta_c = critical_transmissivity();
  Eigen::MatrixXd design(points, 2);
  Eigen::VectorXd target(points);
  QuadraticFit fit{};
  for (int i = 0; i < points; ++i) {
    const double eta = eta_c + width * static_cast<double>(i) / static_cast<double>(points - 1);
    const double n_th = threshold_energy(eta);
    const double x = eta - eta_c;
    design(i, 0) = x;
    design(i, 1) = x * x;
    target(i) = n_th;
    fit.samples.push_back({eta, n_th});
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(target);
  fit.c1 = coef(0);
  fit.c2 = coef(1);
  fit.rms_residual = std::sqrt((design * coef - target).squaredNorm() / static_cast<double>(points));
  return fit;
}

/// QCB reduction Q1(N, beta) - Q2(N, beta, gamma).
inline double delta_q_gamma(double n_total, double beta, double gamma, const LossChannel& ch) {
  return q1(n_total, beta, ch) - q2(n_total, beta, gamma, ch);
}

/// QCB reduction with all thermal photons in the probing mode (gamma = 1).
inline double delta_q(double n_total, double beta, const LossChannel& ch) {
  return delta_q_gamma(n_total, beta, 1.0, ch);
}

struct SweepRanges {
  double n_max = 5.0;      ///< N drawn from (0, n_max]
  double beta_lo = 0.0;    ///< beta drawn from [beta_lo, beta_hi]
  double beta_hi = 1.0;
  double gamma_max = 2.0;  ///< Gamma drawn from (0, gamma_max]
};

struct SweepRecord {
  double n_total;
  double beta;
  double damping;  ///< Gamma
  double gamma;    ///< thermal asymmetry
  double delta_q;
};

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw; portable
/// across standard libraries, unlike std::uniform_real_distribution.
inline double unit_interval(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

inline void validate(const SweepRanges& ranges) {
  if (!(ranges.n_max > 0.0) || !(ranges.gamma_max > 0.0) ||
      !(ranges.beta_lo >= 0.0 && ranges.beta_lo <= ranges.beta_hi && ranges.beta_hi <= 1.0))
    throw DomainError("invalid sampling ranges");
}

struct ProbeSample {
  double n_total;
  double beta;
  double damping;  ///< Gamma
};

/// Uniform (N, beta, Gamma) draws. Sample i comes from an engine seeded by
/// (seed, i), so any subset or ordering of the indices reproduces the same values.
inline ProbeSample probe_sample(std::uint64_t seed, std::uint64_t index, const SweepRanges& ranges = {}) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index & 0xffffffffu), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 engine(seq);
  const double n = ranges.n_max * (1.0 - unit_interval(engine));
  const double beta = ranges.beta_lo + (ranges.beta_hi - ranges.beta_lo) * unit_interval(engine);
  const double damping = ranges.gamma_max * (1.0 - unit_interval(engine));
  return {n, beta, damping};
}

/// Random (N, beta, Gamma) samples with Delta Q_gamma.
inline std::vector<SweepRecord> random_sweep(std::size_t count, double gamma, std::uint64_t seed,
                                             const SweepRanges& ranges = {}) {
  if (count == 0) throw DomainError("random_sweep: sample count must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("random_sweep: gamma must lie in [0, 1]");
  validate(ranges);
  std::vector<SweepRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const ProbeSample p = probe_sample(seed, i, ranges);
    out.push_back({p.n_total, p.beta, p.damping, gamma,
                   delta_q_gamma(p.n_total, p.beta, gamma, LossChannel::from_gamma(p.damping))});
  }
  return out;
}

/// Fraction of records with Delta Q_gamma > 0.
inline double positive_fraction(const std::vector<SweepRecord>& records) {
  if (records.empty()) return 0.0;
  std::size_t positive = 0;
  for (const auto& r : records)
    if (r.delta_q > 0.0) ++positive;
  return static_cast<double>(positive) / static_cast<double>(records.size());
}

}  // namespace lossprobe
