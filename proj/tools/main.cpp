// lossprobe command-line front end.
//
// Exit codes: 0 success, 1 computation / verification / I/O failure, 2 usage error.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "lossprobe/lossprobe.hpp"
#include "table.hpp"

namespace {

using namespace lossprobe;
using cli::Cell;
using cli::Table;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Summary = std::vector<std::pair<std::string, Cell>>;

struct Output {
  std::string format = "csv";
  std::string path;  // empty: stdout
};

const CLI::Validator kUnitOpenClosed(
    [](std::string& s) -> std::string {
      double v = 0.0;
      try {
        v = std::stod(s);
      } catch (const std::exception&) {
        return "not a number: " + s;
      }
      return (v > 0.0 && v <= 1.0) ? std::string() : "value must lie in (0, 1]: " + s;
    },
    "(0,1]", "UnitOpenClosed");

const CLI::Validator kUnitOpen(
    [](std::string& s) -> std::string {
      double v = 0.0;
      try {
        v = std::stod(s);
      } catch (const std::exception&) {
        return "not a number: " + s;
      }
      return (v > 0.0 && v < 1.0) ? std::string() : "value must lie in (0, 1): " + s;
    },
    "(0,1)", "UnitOpen");

/// "lossprobe <version> <cmd> --flag=value ..." for every option of `sub`,
/// given or defaulted. Output destinations are left out so that the same
/// computation written to two places stays byte-identical.
std::string flag_record(const CLI::App& sub) {
  std::ostringstream os;
  os << "lossprobe " << kVersion << ' ' << sub.get_name();
  for (const CLI::Option* o : sub.get_options()) {
    const std::string name = o->get_name();
    if (name == "--help" || name == "--output" || name == "--output-dir") continue;
    std::string value;
    if (o->count() > 0) {
      const auto& res = o->results();
      for (std::size_t i = 0; i < res.size(); ++i) value += (i ? ";" : "") + res[i];
    } else if (o->get_items_expected_max() == 0) {
      value = "false";
    } else {
      value = o->get_default_str();
    }
    os << ' ' << name << '=' << value;
  }
  return os.str();
}

void write_table(std::ostream& out, const Output& fmt, const Table& t, const std::vector<std::string>& comments,
                 const Summary& summary) {
  if (fmt.format == "json") {
    nlohmann::ordered_json meta;
    meta["command"] = comments.empty() ? std::string() : comments.front();
    if (!summary.empty()) {
      nlohmann::ordered_json s;
      for (const auto& [k, v] : summary) s[k] = cli::cell_json(v);
      meta["summary"] = s;
    }
    cli::write_json(out, t, meta);
    return;
  }
  std::vector<std::string> lines = comments;
  for (const auto& [k, v] : summary) lines.push_back(k + "=" + cli::render_cell(v));
  cli::write_csv(out, t, lines);
}

void emit(const Output& fmt, const Table& t, const std::vector<std::string>& comments, const Summary& summary = {}) {
  if (fmt.path.empty()) {
    write_table(std::cout, fmt, t, comments, summary);
    std::cout.flush();
    return;
  }
  std::ofstream f(fmt.path, std::ios::binary);
  if (!f) throw IoError("cannot open " + fmt.path + " for writing");
  write_table(f, fmt, t, comments, summary);
  if (!f) throw IoError("write failed: " + fmt.path);
}

void add_output_options(CLI::App* sub, Output& out) {
  sub->add_option("--format", out.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("--output,-o", out.path, "write to FILE instead of stdout");
}

/// Resolve --eta / --damping into a channel; exactly one is expected unless
/// `optional` is set, in which case the identity channel is the default.
LossChannel channel_from(const CLI::Option* eta_opt, double eta, const CLI::Option* damping_opt, double damping,
                         bool optional) {
  if (eta_opt->count()) return LossChannel::from_eta(eta);
  if (damping_opt->count()) return LossChannel::from_gamma(damping);
  if (optional) return LossChannel::identity();
  throw UsageError("one of --eta or --damping is required");
}

Cell opt_cell(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

// ---------------------------------------------------------------- qcb

struct QcbArgs {
  int modes = 1;
  double n = 0.0;
  double beta = 1.0;
  double gamma = 1.0;
  double eta = 1.0;
  double damping = 0.0;
  int copies = 1;
  bool optimize = false;
  Output out;
  CLI::Option* eta_opt = nullptr;
  CLI::Option* damping_opt = nullptr;
  CLI::Option* gamma_opt = nullptr;
};

void setup_qcb(CLI::App* sub, QcbArgs& a) {
  sub->add_option("--modes", a.modes, "1 (single-mode) or 2 (two-mode) probe")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  sub->add_option("--n,-N", a.n, "mean photon number N")->required()->check(CLI::NonNegativeNumber);
  sub->add_option("--beta", a.beta, "squeezing fraction of N")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  a.gamma_opt = sub->add_option("--gamma", a.gamma, "share of thermal photons in the probing mode (two modes)")
                    ->check(CLI::Range(0.0, 1.0))
                    ->capture_default_str();
  a.eta_opt = sub->add_option("--eta", a.eta, "channel transmissivity")->check(kUnitOpenClosed);
  a.damping_opt = sub->add_option("--damping,--Gamma", a.damping, "channel damping Gamma = -ln eta")
                      ->check(CLI::NonNegativeNumber)
                      ->excludes(a.eta_opt);
  sub->add_option("--copies,-M", a.copies, "number of probe copies")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_flag("--optimize", a.optimize, "minimize Q over beta (and gamma unless given) at fixed N");
  add_output_options(sub, a.out);
}

int run_qcb(const CLI::App& sub, const QcbArgs& a) {
  const LossChannel ch = channel_from(a.eta_opt, a.eta, a.damping_opt, a.damping, false);
  double beta = a.beta;
  double gamma = a.modes == 2 ? a.gamma : 1.0;
  if (a.optimize) {
    std::optional<double> fixed;
    if (a.modes == 2 && a.gamma_opt->count()) fixed = a.gamma;
    const ProbeOptimum best = optimize_beta(a.n, ch, a.modes, fixed);
    beta = best.beta;
    gamma = best.gamma;
  }
  const DiscriminationReport r =
      a.modes == 1 ? q1_report(a.n, beta, ch, a.copies) : q2_report(a.n, beta, gamma, ch, a.copies);
  Table t{{"modes", "N", "beta", "gamma", "eta", "Gamma", "copies", "Q", "s_star", "fidelity", "pe_upper",
           "pe_lower", "pe_fidelity_upper"},
          {}};
  t.add({Cell{static_cast<long long>(a.modes)}, a.n, beta, a.modes == 2 ? Cell{gamma} : Cell{}, ch.eta(), ch.gamma(),
         static_cast<long long>(r.copies), r.q, r.s_star, opt_cell(r.fidelity), r.pe_upper, opt_cell(r.pe_lower),
         opt_cell(r.pe_fidelity_upper)});
  emit(a.out, t, {flag_record(sub)});
  return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  double gamma = 1.0;
  std::size_t samples = 1000;
  std::uint64_t seed = 7;
  SweepRanges ranges;
  Output out;
};

void add_sampling_options(CLI::App* sub, SweepRanges& r) {
  sub->add_option("--n-max", r.n_max, "N drawn from (0, n-max]")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--beta-lo", r.beta_lo, "lower end of beta range")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  sub->add_option("--beta-hi", r.beta_hi, "upper end of beta range")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  sub->add_option("--damping-max", r.gamma_max, "Gamma drawn from (0, damping-max]")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void setup_sweep(CLI::App* sub, SweepArgs& a) {
  sub->add_option("--gamma", a.gamma, "thermal asymmetry of the two-mode probe")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_option("--samples", a.samples, "number of random samples")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--seed", a.seed, "RNG seed")->capture_default_str();
  add_sampling_options(sub, a.ranges);
  add_output_options(sub, a.out);
}

Table sweep_table(const std::vector<SweepRecord>& records) {
  Table t{{"N", "beta", "Gamma", "gamma", "deltaQ"}, {}};
  for (const auto& r : records) t.add({r.n_total, r.beta, r.damping, r.gamma, r.delta_q});
  return t;
}

int run_sweep(const CLI::App& sub, const SweepArgs& a) {
  if (a.ranges.beta_lo > a.ranges.beta_hi) throw UsageError("--beta-lo must not exceed --beta-hi");
  const auto records = random_sweep(a.samples, a.gamma, a.seed, a.ranges);
  emit(a.out, sweep_table(records), {flag_record(sub)}, {{"positive_fraction", positive_fraction(records)}});
  return 0;
}

// ---------------------------------------------------------------- threshold / critical

struct ThresholdArgs {
  double eta = 0.5;
  double eta_min = 0.05;
  double eta_max = 0.99;
  int points = 95;
  Output out;
  CLI::Option* eta_opt = nullptr;
};

void setup_threshold(CLI::App* sub, ThresholdArgs& a) {
  a.eta_opt = sub->add_option("--eta", a.eta, "single transmissivity (overrides the grid)")->check(kUnitOpen);
  sub->add_option("--eta-min", a.eta_min, "grid start")->check(kUnitOpen)->capture_default_str();
  sub->add_option("--eta-max", a.eta_max, "grid end")->check(kUnitOpen)->capture_default_str();
  sub->add_option("--points", a.points, "grid points")->check(CLI::Range(2, 100000))->capture_default_str();
  add_output_options(sub, a.out);
}

Summary critical_summary(bool with_fit) {
  const double eta_c = critical_transmissivity();
  Summary s{{"eta_c", eta_c}, {"Gamma_c", -std::log(eta_c)}};
  if (with_fit) {
    const QuadraticFit fit = threshold_fit_near_critical();
    s.emplace_back("fit_c1", fit.c1);
    s.emplace_back("fit_c2", fit.c2);
    s.emplace_back("fit_rms", fit.rms_residual);
  }
  return s;
}

int run_threshold(const CLI::App& sub, const ThresholdArgs& a) {
  Table t{{"eta", "N_th"}, {}};
  if (a.eta_opt->count()) {
    t.add({a.eta, threshold_energy(a.eta)});
  } else {
    if (!(a.eta_min < a.eta_max)) throw UsageError("--eta-min must be below --eta-max");
    for (int i = 0; i < a.points; ++i) {
      const double eta = a.eta_min + (a.eta_max - a.eta_min) * i / (a.points - 1);
      t.add({eta, threshold_energy(eta)});
    }
  }
  const Summary s = critical_summary(true);
  for (const auto& [k, v] : s) std::cerr << k << " = " << cli::render_cell(v) << '\n';
  emit(a.out, t, {flag_record(sub)}, s);
  return 0;
}

int run_critical(const CLI::App& sub, const Output& out) {
  const double x = critical_root();
  const double eta_c = critical_transmissivity();
  Table t{{"eta_c", "Gamma_c", "sqrt_eta_c", "residual"}, {}};
  t.add({eta_c, -std::log(eta_c), x, ((x + 1.0) * x + 1.0) * x - 1.0});
  emit(out, t, {flag_record(sub)});
  return 0;
}

// ---------------------------------------------------------------- correlations

struct CorrelationArgs {
  double r = 0.0, n1 = 0.0, n2 = 0.0;
  double n = 0.0, beta = 1.0, gamma = 0.999;
  double eta = 1.0, damping = 0.0;
  bool bits = false;
  Output out;
  CLI::Option *n_opt = nullptr, *eta_opt = nullptr, *damping_opt = nullptr;
};

void setup_correlations(CLI::App* sub, CorrelationArgs& a) {
  auto* r = sub->add_option("--r", a.r, "two-mode squeezing")->check(CLI::NonNegativeNumber)->capture_default_str();
  auto* n1 = sub->add_option("--n1", a.n1, "thermal photons, mode 1")->check(CLI::NonNegativeNumber)->capture_default_str();
  auto* n2 = sub->add_option("--n2", a.n2, "thermal photons, mode 2")->check(CLI::NonNegativeNumber)->capture_default_str();
  a.n_opt = sub->add_option("--n,-N", a.n, "probe energy N (probe family; replaces --r/--n1/--n2)")
                ->check(CLI::NonNegativeNumber)
                ->excludes(r)
                ->excludes(n1)
                ->excludes(n2);
  sub->add_option("--beta", a.beta, "probe squeezing fraction")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  sub->add_option("--gamma", a.gamma, "probe thermal asymmetry")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  a.eta_opt = sub->add_option("--eta", a.eta, "loss on mode 1 before evaluating")->check(kUnitOpenClosed);
  a.damping_opt =
      sub->add_option("--damping,--Gamma", a.damping, "loss on mode 1 as damping")->check(CLI::NonNegativeNumber)->excludes(a.eta_opt);
  sub->add_flag("--bits", a.bits, "report E, D, I in bits instead of nats");
  add_output_options(sub, a.out);
}

int run_correlations(const CLI::App& sub, const CorrelationArgs& a) {
  const TwoModeParams p = a.n_opt->count() ? two_mode_params(a.n, a.beta, a.gamma) : TwoModeParams{a.r, a.n1, a.n2};
  const LossChannel ch = channel_from(a.eta_opt, a.eta, a.damping_opt, a.damping, true);
  const TwoModeCM cm = evolve_two(make_two_mode_st(p), ch);
  const CorrelationReport rep = correlation_report(cm);
  const double vn = mutual_information(cm, MutualInfoConvention::kVonNeumann);
  const auto unit = [&](double nats) { return a.bits ? to_bits(nats) : nats; };
  Table t{{"r", "n1", "n2", "eta", "E", "D", "I", "I_vN", "d_tilde_minus"}, {}};
  t.add({p.r, p.n_thermal1, p.n_thermal2, ch.eta(), unit(rep.entanglement), unit(rep.discord),
         unit(rep.mutual_information), unit(vn), rep.d_tilde_minus});
  emit(a.out, t, {flag_record(sub)}, {{"unit", std::string(a.bits ? "bits" : "nats")}});
  return 0;
}

// ---------------------------------------------------------------- figure

struct FigureArgs {
  int id = 0;
  std::string dir;
  std::string format = "csv";
  int points = 0;       // N grid points; 0 = per-figure default
  int beta_points = 51;
  std::size_t samples = 0;  // 0 = per-figure default
  std::uint64_t seed = 7;
  double gamma = 0.0;
  double beta = 0.0;
  bool gnuplot = false;
  SweepRanges ranges;
  CLI::Option *gamma_opt = nullptr, *beta_opt = nullptr;
};

void setup_figure(CLI::App* sub, FigureArgs& a) {
  sub->add_option("id", a.id, "figure number (2-6)")->required()->check(CLI::IsMember({2, 3, 4, 5, 6}));
  sub->add_option("--output-dir,-d", a.dir, "directory for the CSV files (default: $LOSSPROBE_OUTPUT_DIR or .)");
  sub->add_option("--format", a.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_option("--points", a.points, "points along N (default 101; 51 for figure 4)")->check(CLI::Range(2, 100000));
  sub->add_option("--beta-points", a.beta_points, "points along beta (figures 4 and 6)")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  sub->add_option("--samples", a.samples, "random samples (default 1000 for figure 5, 10000 for figure 6)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", a.seed, "RNG seed (figures 5 and 6)")->capture_default_str();
  a.gamma_opt = sub->add_option("--gamma", a.gamma, "figure 5: single thermal asymmetry instead of the default set")
                    ->check(CLI::Range(0.0, 1.0));
  a.beta_opt = sub->add_option("--beta", a.beta, "figure 6: only the upper panels with this beta")
                   ->check(CLI::Range(0.0, 1.0));
  add_sampling_options(sub, a.ranges);
  sub->add_flag("--gnuplot", a.gnuplot, "also write a gnuplot script");
}

struct FigureFile {
  std::string name;  // without extension
  Table table;
  Summary summary;
};

std::string tag(double v) { return cli::format_number(v); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

/// (0, hi] with n points: hi/n, 2 hi/n, ..., hi.
std::vector<double> open_grid(double hi, int n) {
  std::vector<double> v;
  for (int i = 1; i <= n; ++i) v.push_back(hi * i / n);
  return v;
}

constexpr double kFig6Gamma = 0.999;

std::vector<FigureFile> figure2(int points) {
  std::vector<FigureFile> files;
  const std::vector<double> betas{0.1, 0.5, 1.0};
  const auto ns = linspace(0.0, 10.0, points);
  for (double eta : {0.1, 0.5, 0.9}) {
    const auto ch = LossChannel::from_eta(eta);
    FigureFile f{"fig2_q1_eta" + tag(eta), {{"N"}, {}}, {}};
    for (double b : betas) f.table.columns.push_back("Q1_beta" + tag(b));
    for (double n : ns) {
      std::vector<Cell> row{n};
      for (double b : betas) row.emplace_back(q1(n, b, ch));
      f.table.add(std::move(row));
    }
    files.push_back(std::move(f));
    for (double g : {0.0, 0.5, 1.0}) {
      FigureFile h{"fig2_q2_eta" + tag(eta) + "_gamma" + tag(g), {{"N"}, {}}, {}};
      for (double b : betas) h.table.columns.push_back("Q2_beta" + tag(b));
      for (double n : ns) {
        std::vector<Cell> row{n};
        for (double b : betas) row.emplace_back(q2(n, b, g, ch));
        h.table.add(std::move(row));
      }
      files.push_back(std::move(h));
    }
  }
  return files;
}

std::vector<FigureFile> figure3(int points) {
  FigureFile f{"fig3", {{"N", "Gamma", "Q1", "Q2"}, {}}, {}};
  for (double damping : {0.1, 0.3, 1.0}) {
    const auto ch = LossChannel::from_gamma(damping);
    for (double n : linspace(0.0, 10.0, points)) f.table.add({n, damping, q1(n, 1.0, ch), q2(n, 1.0, 1.0, ch)});
    const double eta = ch.eta();
    f.summary.emplace_back("N_th_Gamma" + tag(damping), threshold_energy(eta));
  }
  return {f};
}

std::vector<FigureFile> figure4(int points, int beta_points, double n_max) {
  std::vector<FigureFile> files;
  for (double damping : {0.1, 0.9}) {
    const auto ch = LossChannel::from_gamma(damping);
    FigureFile f{"fig4_Gamma" + tag(damping), {{"N", "beta", "Gamma", "deltaQ"}, {}}, {}};
    for (double n : open_grid(n_max, points))
      for (double b : linspace(0.0, 1.0, beta_points)) f.table.add({n, b, damping, delta_q(n, b, ch)});
    files.push_back(std::move(f));
  }
  return files;
}

std::vector<FigureFile> figure5(const FigureArgs& a, std::size_t samples) {
  std::vector<double> gammas{0.99, 0.9, 0.8, 0.7};
  if (a.gamma_opt->count()) gammas = {a.gamma};
  std::vector<FigureFile> files;
  for (double g : gammas) {
    const auto records = random_sweep(samples, g, a.seed, a.ranges);
    files.push_back({"fig5_gamma" + tag(g), sweep_table(records), {{"positive_fraction", positive_fraction(records)}}});
  }
  return files;
}

std::vector<Cell> correlation_cells(double n, double beta, const LossChannel& ch) {
  const auto rep = correlation_report(make_two_mode_st(two_mode_params(n, beta, kFig6Gamma)));
  return {rep.entanglement, rep.discord, rep.mutual_information, delta_q_gamma(n, beta, kFig6Gamma, ch)};
}

std::vector<FigureFile> figure6(const FigureArgs& a, int points, std::size_t samples) {
  std::vector<FigureFile> files;
  std::vector<double> betas{0.1, 0.9};
  if (a.beta_opt->count()) betas = {a.beta};
  for (double b : betas)
    for (double damping : {0.1, 0.5, 0.9}) {
      const auto ch = LossChannel::from_gamma(damping);
      FigureFile f{"fig6_beta" + tag(b) + "_Gamma" + tag(damping), {{"N", "E", "D", "I", "deltaQ"}, {}}, {}};
      for (double n : open_grid(a.ranges.n_max, points)) {
        std::vector<Cell> row{n};
        for (auto& c : correlation_cells(n, b, ch)) row.push_back(std::move(c));
        f.table.add(std::move(row));
      }
      files.push_back(std::move(f));
    }
  if (a.beta_opt->count()) return files;

  for (double damping : {0.2, 0.8}) {
    const auto ch = LossChannel::from_gamma(damping);
    FigureFile f{"fig6_grid_Gamma" + tag(damping), {{"N", "beta", "E", "D", "I", "deltaQ"}, {}}, {}};
    for (double n : open_grid(a.ranges.n_max, points))
      for (double b : linspace(0.0, 1.0, a.beta_points)) {
        std::vector<Cell> row{n, b};
        for (auto& c : correlation_cells(n, b, ch)) row.push_back(std::move(c));
        f.table.add(std::move(row));
      }
    files.push_back(std::move(f));
  }

  FigureFile f{"fig6_random", {{"N", "beta", "Gamma", "E", "D", "I", "deltaQ"}, {}}, {}};
  std::vector<double> e, d, i;
  for (std::size_t k = 0; k < samples; ++k) {
    const ProbeSample s = probe_sample(a.seed, k, a.ranges);
    const auto rep = correlation_report(make_two_mode_st(two_mode_params(s.n_total, s.beta, kFig6Gamma)));
    e.push_back(rep.entanglement);
    d.push_back(rep.discord);
    i.push_back(rep.mutual_information);
    f.table.add({s.n_total, s.beta, s.damping, rep.entanglement, rep.discord, rep.mutual_information,
                 delta_q_gamma(s.n_total, s.beta, kFig6Gamma, LossChannel::from_gamma(s.damping))});
  }
  f.summary = {{"spearman_E_I", spearman(e, i)}, {"spearman_D_I", spearman(d, i)}};
  files.push_back(std::move(f));
  return files;
}

/// Plot commands per figure; data columns are addressed by number.
std::string gnuplot_script(int id, const std::vector<FigureFile>& files) {
  std::ostringstream os;
  os << "# gnuplot script for figure " << id << "\n"
     << "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n"
     << "set terminal pngcairo size 800,600\n";
  for (const auto& f : files) {
    const std::string data = "'" + f.name + ".csv'";
    os << "set output '" << f.name << ".png'\n";
    const auto& cols = f.table.columns;
    if (id == 2) {
      os << "set xlabel 'N'\nplot";
      for (std::size_t c = 1; c < cols.size(); ++c)
        os << (c > 1 ? "," : "") << ' ' << data << " using 1:" << c + 1 << " with lines";
      os << '\n';
    } else if (id == 3) {
      os << "set xlabel 'N'\nplot";
      bool first = true;
      for (double g : {0.1, 0.3, 1.0})
        for (int c : {3, 4}) {
          os << (first ? "" : ",") << ' ' << data << " using 1:(abs($2-" << tag(g) << ")<1e-9?$" << c
             << ":1/0) with lines title '" << cols[c - 1] << " Gamma=" << tag(g) << "'";
          first = false;
        }
      os << '\n';
    } else if (id == 4) {
      os << "set xlabel 'N'\nset ylabel 'beta'\nplot " << data << " using 1:2:4 with image\n";
    } else if (id == 5) {
      os << "set xlabel 'sample'\nset ylabel 'deltaQ'\nplot " << data << " using 0:5 with points pt 7 ps 0.4\n";
    } else if (f.name.rfind("fig6_random", 0) == 0) {
      os << "set xlabel 'I'\nplot " << data << " using 6:4 with dots title 'E', " << data
         << " using 6:5 with dots title 'D'\n";
    } else {
      const int dq = static_cast<int>(cols.size());
      const int first_q = dq - 3;
      os << "set ylabel 'deltaQ'\nplot";
      for (int c = first_q; c < dq; ++c)
        os << (c > first_q ? "," : "") << ' ' << data << " using " << c << ':' << dq << " with "
           << (f.name.rfind("fig6_grid", 0) == 0 ? "dots" : "lines") << " title '" << cols[c - 1] << "'";
      os << '\n';
    }
  }
  return os.str();
}

int run_figure(const CLI::App& sub, FigureArgs& a) {
  if (a.ranges.beta_lo > a.ranges.beta_hi) throw UsageError("--beta-lo must not exceed --beta-hi");
  if (a.gnuplot && a.format != "csv") throw UsageError("--gnuplot needs --format csv");
  if (a.gamma_opt->count() && a.id != 5) throw UsageError("--gamma applies to figure 5 only");
  if (a.beta_opt->count() && a.id != 6) throw UsageError("--beta applies to figure 6 only");
  std::string dir = a.dir;
  if (dir.empty()) {
    const char* env = std::getenv("LOSSPROBE_OUTPUT_DIR");
    dir = env && *env ? env : ".";
  }
  // figures 2-3 span N in [0, 10]; 4-6 use the sampling range (0, n-max]
  const int points = a.points ? a.points : (a.id == 4 ? 51 : 101);
  const std::size_t samples = a.samples ? a.samples : (a.id == 6 ? 10000 : 1000);

  std::vector<FigureFile> files;
  switch (a.id) {
    case 2: files = figure2(points); break;
    case 3: files = figure3(points); break;
    case 4: files = figure4(points, a.beta_points, a.ranges.n_max); break;
    case 5: files = figure5(a, samples); break;
    default: files = figure6(a, points, samples); break;
  }

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  const std::string record = flag_record(sub);
  std::ostringstream resolved;
  resolved << "resolved points=" << points << " samples=" << samples;
  for (const auto& f : files) {
    const Output out{a.format, (std::filesystem::path(dir) / (f.name + "." + a.format)).string()};
    emit(out, f.table, {record, resolved.str()}, f.summary);
    std::cout << out.path << '\n';
  }
  if (a.gnuplot) {
    const std::string path = (std::filesystem::path(dir) / ("fig" + std::to_string(a.id) + ".gp")).string();
    std::ofstream gp(path, std::ios::binary);
    if (!gp) throw IoError("cannot open " + path + " for writing");
    gp << gnuplot_script(a.id, files);
    if (!gp) throw IoError("write failed: " + path);
    std::cout << path << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  int dim = 0;
  double tail_tol = 1e-8;
  Output out;
  CLI::Option* dim_opt = nullptr;
};

void setup_verify(CLI::App* sub, VerifyArgs& a) {
  a.dim_opt = sub->add_option("--dim", a.dim, "Fock cutoff per mode for every case")->check(CLI::Range(2, 400));
  sub->add_option("--tail-tol", a.tail_tol, "maximum discarded probability mass")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_output_options(sub, a.out);
}

int run_verify(const CLI::App& sub, const VerifyArgs& a) {
  Table t{{"case", "dim", "check", "value", "relation", "limit", "status"}, {}};
  bool all = true;
  auto row = [&](const std::string& label, int dim, const std::string& check, Cell value, const std::string& rel,
                 double limit, bool ok) {
    all = all && ok;
    t.add({label, static_cast<long long>(dim), check, std::move(value), rel, limit, std::string(ok ? "PASS" : "FAIL")});
  };
  for (const auto& c : verify::standard_cases()) {
    const int dim = a.dim_opt->count() ? a.dim : c.dim;
    try {
      const auto r = verify::run_case(c, dim, a.tail_tol);
      const double f = std::min(r.fidelity, 1.0);
      row(c.label, dim, "qcb_gaussian_vs_fock", std::abs(r.q_gaussian - r.q_fock), "<=", verify::kQcbTol, r.qcb_ok());
      row(c.label, dim, "second_moments", r.moment_error, "<=", verify::kMomentTol, r.moment_error <= verify::kMomentTol);
      row(c.label, dim, "first_moments", r.mean_error, "<=", verify::kMomentTol, r.mean_error <= verify::kMomentTol);
      const double g1 = r.pe - r.pe_lower, g2 = 0.5 * r.q_fock - r.pe, g3 = 0.5 * std::sqrt(f) - 0.5 * r.q_fock;
      row(c.label, dim, "pe_lower<=pe", g1, ">=", verify::kChainSlack, g1 >= verify::kChainSlack);
      row(c.label, dim, "pe<=q/2", g2, ">=", verify::kChainSlack, g2 >= verify::kChainSlack);
      row(c.label, dim, "q/2<=sqrt(F)/2", g3, ">=", verify::kChainSlack, g3 >= verify::kChainSlack);
    } catch (const TruncationError& e) {
      std::cerr << c.label << ": " << e.what() << '\n';
      row(c.label, dim, "truncation", std::string("truncation error"), "<=", a.tail_tol, false);
    }
  }
  emit(a.out, t, {flag_record(sub)});
  std::cerr << (all ? "verify: all checks passed\n" : "verify: FAILED\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lossy-channel discrimination with squeezed thermal probes"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  QcbArgs qcb_args;
  SweepArgs sweep_args;
  ThresholdArgs threshold_args;
  Output critical_out;
  CorrelationArgs corr_args;
  FigureArgs figure_args;
  VerifyArgs verify_args;

  auto* qcb_cmd = app.add_subcommand("qcb", "quantum Chernoff bound for one probe configuration");
  setup_qcb(qcb_cmd, qcb_args);
  auto* sweep_cmd = app.add_subcommand("sweep", "random (N, beta, Gamma) samples of the two-mode QCB reduction");
  setup_sweep(sweep_cmd, sweep_args);
  auto* threshold_cmd = app.add_subcommand("threshold", "threshold energy N_th(eta)");
  setup_threshold(threshold_cmd, threshold_args);
  auto* critical_cmd = app.add_subcommand("critical", "critical transmissivity eta_c and damping Gamma_c");
  add_output_options(critical_cmd, critical_out);
  auto* corr_cmd = app.add_subcommand("correlations", "entanglement, discord and mutual information");
  setup_correlations(corr_cmd, corr_args);
  auto* figure_cmd = app.add_subcommand("figure", "write figure data (2-6) as CSV");
  setup_figure(figure_cmd, figure_args);
  auto* verify_cmd = app.add_subcommand("verify", "Gaussian vs truncated Fock equivalence suite");
  setup_verify(verify_cmd, verify_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (qcb_cmd->parsed()) return run_qcb(*qcb_cmd, qcb_args);
    if (sweep_cmd->parsed()) return run_sweep(*sweep_cmd, sweep_args);
    if (threshold_cmd->parsed()) return run_threshold(*threshold_cmd, threshold_args);
    if (critical_cmd->parsed()) return run_critical(*critical_cmd, critical_out);
    if (corr_cmd->parsed()) return run_correlations(*corr_cmd, corr_args);
    if (figure_cmd->parsed()) return run_figure(*figure_cmd, figure_args);
    if (verify_cmd->parsed()) return run_verify(*verify_cmd, verify_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
