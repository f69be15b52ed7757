#pragma once

// Oracle equivalence checks: every case builds a state pair twice, as
// covariance matrices and as truncated density matrices, and compares QCB,
// second moments and the fidelity / Helstrom / Chernoff bound chain.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "chernoff.hpp"
#include "fock.hpp"
#include "probe.hpp"

namespace lossprobe::verify {

/// One hypothesis pair. `b` is either an explicit state or, when `eta` is set,
/// the loss-channel output of `a`.
struct OracleCase {
  std::string label;
  ProbeParams a;
  std::optional<ProbeParams> b;
  std::optional<double> eta;
  int dim;
};

inline constexpr double kQcbTol = 1e-6;
inline constexpr double kMomentTol = 1e-8;
inline constexpr double kChainSlack = -1e-9;

/// Small-energy set: all r, n_T <= 1, cutoffs sized so the truncated tail is
/// far below the tolerances.
inline std::vector<OracleCase> standard_cases() {
  using S = SingleModeParams;
  using T = TwoModeParams;
  return {
      {"vacuum|thermal(1)", S{0.0, 0.0}, S{0.0, 1.0}, std::nullopt, 60},
      {"vacuum|lossy-sqz-vac(N=1,eta=0.5)", S{0.0, 0.0},
       output_params_single(single_mode_params(1.0, 1.0), LossChannel::from_eta(0.5)), std::nullopt, 60},
      {"sqz-vac(r=0.5),eta=0.5", S{0.5, 0.0}, std::nullopt, 0.5, 60},
      {"sqz-th(r=0.5,n=0.3),eta=0.6", S{0.5, 0.3}, std::nullopt, 0.6, 60},
      {"sqz-vac(r=1),eta=0.9", S{1.0, 0.0}, std::nullopt, 0.9, 100},
      {"sqz-th(r=0.2,n=1),eta=0.3", S{0.2, 1.0}, std::nullopt, 0.3, 80},
      {"thermal(0.5),eta=0.5", S{0.0, 0.5}, std::nullopt, 0.5, 60},
      {"sqz-th(r=0.8,n=0.1),eta=0.99", S{0.8, 0.1}, std::nullopt, 0.99, 80},
      {"tmsv(r=0.4),eta=0.5", T{0.4, 0.0, 0.0}, std::nullopt, 0.5, 25},
      {"tmst(r=0.3,n=0.1,0.05),eta=0.7", T{0.3, 0.1, 0.05}, std::nullopt, 0.7, 25},
      {"tmst(r=0.2,n=0.2,0),eta=0.3", T{0.2, 0.2, 0.0}, std::nullopt, 0.3, 25},
      {"thermal2(0.2,0.2),eta=0.6", T{0.0, 0.2, 0.2}, std::nullopt, 0.6, 25},
      {"tmsv(r=0.5),eta=0.9", T{0.5, 0.0, 0.0}, std::nullopt, 0.9, 25},
      {"tmst(r=0.35,n=0.05,0.1),eta=0.2", T{0.35, 0.05, 0.1}, std::nullopt, 0.2, 25},
  };
}

struct OracleResult {
  std::string label;
  int modes;
  int dim;
  double q_gaussian;
  double q_fock;
  double moment_error;  ///< max |CM_fock - CM_gaussian| over both states
  double mean_error;    ///< max |first moment| over both states
  double fidelity;
  double pe;            ///< exact Helstrom error probability, one copy
  double pe_lower;      ///< (1 - sqrt(1 - F))/2
  double chain_slack;   ///< min gap along pe_lower <= pe <= Q/2 <= sqrt(F)/2

  bool qcb_ok() const { return std::abs(q_gaussian - q_fock) <= kQcbTol; }
  bool moments_ok() const { return moment_error <= kMomentTol && mean_error <= kMomentTol; }
  bool chain_ok() const { return chain_slack >= kChainSlack; }
  bool ok() const { return qcb_ok() && moments_ok() && chain_ok(); }
};

namespace detail {

template <class Params>
auto gaussian_cm(const Params& p) {
  return lossprobe::detail::StateTraits<Params>::cm(p);
}

template <class Params>
Params channel_output(const Params& p, const LossChannel& ch) {
  if constexpr (std::is_same_v<Params, SingleModeParams>) {
    return output_params_single(p, ch);
  } else {
    return output_params_two(p, ch);
  }
}

template <class Params>
double moment_error(const fock::FockDensityMatrix& rho, const Params& p, double& mean_error) {
  const auto m = fock::fock_moments(rho);
  mean_error = std::max(mean_error, m.first.cwiseAbs().maxCoeff());
  return (m.covariance - gaussian_cm(p).matrix()).cwiseAbs().maxCoeff();
}

template <class Params>
OracleResult run_typed(const OracleCase& c, const Params& a, const fock::TruncationConfig& cfg) {
  const fock::FockDensityMatrix rho_a = fock::fock_squeezed_thermal(a, cfg);
  Params b{};
  std::optional<fock::FockDensityMatrix> rho_b;
  if (c.eta) {
    const LossChannel ch = LossChannel::from_eta(*c.eta);
    b = channel_output(a, ch);
    rho_b = fock::apply_loss_kraus(rho_a, ch, cfg);
  } else {
    b = std::get<Params>(*c.b);
    rho_b = fock::fock_squeezed_thermal(b, cfg);
  }

  OracleResult r{};
  r.label = c.label;
  r.modes = lossprobe::detail::StateTraits<Params>::modes;
  r.dim = cfg.dim;
  r.q_gaussian = qcb(a, b).q;
  r.q_fock = fock::qcb_fock(rho_a, *rho_b).q;
  r.mean_error = 0.0;
  r.moment_error = std::max(moment_error(rho_a, a, r.mean_error), moment_error(*rho_b, b, r.mean_error));
  r.fidelity = fock::fidelity_fock(rho_a, *rho_b);
  r.pe = fock::helstrom_pe_fock(rho_a, *rho_b);
  const double f = std::min(r.fidelity, 1.0);
  r.pe_lower = 0.5 * (1.0 - std::sqrt(1.0 - f));
  r.chain_slack = std::min({r.pe - r.pe_lower, 0.5 * r.q_fock - r.pe, 0.5 * std::sqrt(f) - 0.5 * r.q_fock});
  return r;
}

}  // namespace detail

/// Run one case; `dim_override` replaces the case's own cutoff.
inline OracleResult run_case(const OracleCase& c, std::optional<int> dim_override = std::nullopt,
                             double tail_tol = 1e-8) {
  const fock::TruncationConfig cfg{dim_override.value_or(c.dim), tail_tol};
  return std::visit([&](const auto& a) { return detail::run_typed(c, a, cfg); }, c.a);
}

}  // namespace lossprobe::verify
