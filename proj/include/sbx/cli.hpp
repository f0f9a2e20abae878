#pragma once

// Command-line front end: eval, sweep, figure, validate.
//
// Exit codes: 0 success, 1 failed validation check (or unexpected error),
// 2 invalid arguments or parameter domain, 3 numerical non-convergence.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbx/channel.hpp"
#include "sbx/effcap.hpp"
#include "sbx/errors.hpp"
#include "sbx/figures.hpp"
#include "sbx/oracle.hpp"
#include "sbx/sweep.hpp"
#include "sbx/validation.hpp"

namespace sbx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitConvergence = 3;

/// Seed from SBX_EC_SEED, or the built-in default.
inline std::uint64_t default_seed() {
  const char* env = std::getenv("SBX_EC_SEED");
  if (!env || !*env) return kDefaultSeed;
  try {
    std::size_t pos = 0;
    const std::string s(env);
    const unsigned long long v = std::stoull(s, &pos, 0);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError("SBX_EC_SEED must be an unsigned 64-bit integer, got '" + std::string(env) + "'");
  }
}

struct EvalArgs {
  SbxParams p{2.0, 2.0, 10.0, 10.0};
  double snr_db = 10.0;
  std::optional<double> a;
  std::optional<double> theta;
  double block_T = 1.0;
  double bandwidth_B = 1.0;
  double tol = specfun::EvalControl{}.rel_tol;
  int max_terms = specfun::EvalControl{}.max_terms;
  std::uint64_t seed = 0;
  std::uint64_t mc_samples = 0;
  std::vector<std::string> methods;
};

inline int cmd_eval(const EvalArgs& args, std::ostream& out) {
  validate(args.p);
  if (args.a && args.theta) throw DomainError("give either --A or --theta, not both");
  if (!args.a && !args.theta) throw DomainError("one of --A or --theta is required");
  const DelaySpec ds = args.a ? DelaySpec::from_a(*args.a)
                              : DelaySpec::from_theta(*args.theta, args.block_T, args.bandwidth_B);
  const LinkBudget lb = LinkBudget::from_db(args.snr_db);
  validate(lb);
  specfun::EvalControl ctl;
  ctl.rel_tol = args.tol;
  ctl.max_terms = args.max_terms;
  ctl.validate();

  std::vector<Output> methods;
  if (args.methods.empty()) {
    methods = {Output::exact, Output::quadrature};
    if (args.mc_samples > 0) methods.push_back(Output::mc);
  } else {
    for (const auto& m : args.methods)
      for (Output o : parse_outputs(m)) methods.push_back(o);
  }

  // Everything is computed before anything is printed, so a failing method
  // leaves no partial output.
  std::ostringstream os;
  for (Output o : methods) {
    os << "method=" << to_string(o);
    switch (o) {
      case Output::exact: {
        const EcResult r = effective_capacity_exact(args.p, lb, ds, ctl);
        os << " ec_bits_per_s_per_hz=" << format_value(r.ec_bits) << " terms_used=" << r.terms_used
           << " trunc_bound=" << format_value(r.trunc_bound);
        break;
      }
      case Output::quadrature:
        os << " ec_bits_per_s_per_hz=" << format_value(ec_quadrature(args.p, lb, ds, ctl)) << " terms_used=NA"
           << " trunc_bound=NA";
        break;
      case Output::high_snr:
        os << " ec_bits_per_s_per_hz=" << format_value(effective_capacity_high_snr(args.p, lb, ds, ctl))
           << " terms_used=NA trunc_bound=NA";
        break;
      case Output::mc: {
        const std::uint64_t n = args.mc_samples > 0 ? args.mc_samples : 1000000;
        const McEstimate m = ec_monte_carlo(args.p, lb, ds, args.seed, n);
        os << " ec_bits_per_s_per_hz=" << format_value(m.value) << " terms_used=NA trunc_bound=NA"
           << " std_err=" << format_value(m.std_err) << " n=" << m.n << " seed=" << m.seed;
        break;
      }
      case Output::low_snr: {
        const LowSnrChar ch = low_snr_characterization(args.p, ds, ctl);
        os << " s0=" << format_value(ch.s0) << " ebn0_min_db=" << format_value(ch.ebn0_min_db());
        break;
      }
    }
    os << '\n';
  }
  out << os.str();
  return kExitOk;
}

inline int cmd_sweep(const SweepConfig& cfg, const std::string& out_path, bool emit_plot, std::ostream& out) {
  if (out_path.empty()) throw DomainError("--out is required");
  const std::string csv = render_sweep_csv(cfg);
  write_file_atomically(out_path, csv);
  if (emit_plot) {
    const std::filesystem::path csv_path(out_path);
    std::ostringstream gp;
    gp << "set datafile separator ','\nset key autotitle columnhead\nset grid\n"
       << "set terminal pngcairo size 900,600\nset output '" << csv_path.stem().string() << ".png'\n"
       << "set xlabel '" << to_string(cfg.axis) << "'\nset ylabel 'effective capacity (bits/s/Hz)'\nplot ";
    const std::size_t columns = csv_columns(cfg).size();
    for (std::size_t c = 2; c <= columns; ++c)
      gp << (c > 2 ? ", " : "") << "'" << csv_path.filename().string() << "' using 1:" << c << " with lines";
    gp << '\n';
    write_file_atomically(out_path + ".gp", gp.str());
  }
  out << "wrote " << cfg.point_count() << " rows to " << out_path << '\n';
  return kExitOk;
}

inline int cmd_figure(int id, const std::string& out_dir, std::uint64_t seed, std::uint64_t mc_samples, double tb,
                      bool emit_plot, std::ostream& out) {
  if (id < 1 || id > 5) throw DomainError("figure id must be 1..5");
  if (out_dir.empty()) throw DomainError("--out is required");
  if (!(tb > 0.0)) throw DomainError("tb > 0 required");
  const auto curves = figures::figure_curves(id, seed, mc_samples, tb);

  // Render everything first; files are only written once all succeeded.
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& c : curves) files.push_back({c.name + ".csv", render_sweep_csv(c.config)});
  files.push_back({"claims.txt", figures::claims_text(id, tb)});
  if (emit_plot) files.push_back({"fig" + std::to_string(id) + ".gp", figures::plot_script(id, curves)});

  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  try {
    for (const auto& [name, content] : files) {
      const auto path = std::filesystem::path(out_dir) / name;
      write_file_atomically(path.string(), content);
      written.push_back(path);
    }
  } catch (...) {
    for (const auto& p : written) std::filesystem::remove(p);
    throw;
  }
  out << "figure " << id << ": wrote " << files.size() << " files to " << out_dir << '\n';
  return kExitOk;
}

inline void print_check(std::ostream& out, const validation::CheckResult& r, const char* status) {
  out << std::left << std::setw(5) << status << "  " << r.name << "  measured=" << format_value(r.measured)
      << "  threshold=" << format_value(r.threshold);
  if (!r.detail.empty()) out << "  (" << r.detail << ")";
  out << '\n';
}

inline int cmd_validate(std::uint64_t seed, std::uint64_t n, bool break_tolerance, std::ostream& out) {
  if (n < 10000) throw DomainError("validate: n >= 10000 required");
  const double scale = break_tolerance ? 0.0 : 1.0;
  const auto results = validation::run_suite(seed, n, scale);
  int failed = 0;
  for (const auto& r : results) {
    print_check(out, r, r.pass ? "PASS" : "FAIL");
    if (!r.pass) ++failed;
  }
  // Reported for reference only: the closed form that assumes U is
  // nonincreasing in its shift, which fails when beta < 1.
  print_check(out, validation::check_bound_soundness(validation::BoundForm::at_z), "INFO");
  if (failed) {
    out << failed << " of " << results.size() << " checks failed:\n";
    for (const auto& r : results)
      if (!r.pass)
        out << "  " << r.name << ": measured " << format_value(r.measured) << " vs threshold "
            << format_value(r.threshold) << '\n';
    return kExitCheckFailed;
  }
  out << "all " << results.size() << " checks passed\n";
  return kExitOk;
}

/// Parses argv and dispatches. Never throws.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Effective capacity of the shadowed Beaulieu-Xie fading channel"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  bool seed_given = false;

  // eval
  EvalArgs ev;
  double a_value = 0.0, theta_value = 0.0;
  auto* eval = app.add_subcommand("eval", "Effective capacity at a single operating point");
  eval->add_option("--mx", ev.p.m_x, "Nakagami m of the LoS component")->capture_default_str();
  eval->add_option("--omega-x", ev.p.omega_x, "LoS power")->capture_default_str();
  eval->add_option("--my", ev.p.m_y, "Nakagami m of the scatter component")->capture_default_str();
  eval->add_option("--omega-y", ev.p.omega_y, "scatter power")->capture_default_str();
  eval->add_option("--snr-db", ev.snr_db, "average SNR in dB")->capture_default_str();
  auto* opt_a = eval->add_option("--A", a_value, "delay constraint A = theta T B / ln 2");
  auto* opt_theta = eval->add_option("--theta", theta_value, "QoS exponent theta");
  eval->add_option("--T", ev.block_T, "block duration")->capture_default_str();
  eval->add_option("--B", ev.bandwidth_B, "bandwidth")->capture_default_str();
  eval->add_option("--tol", ev.tol, "relative tolerance")->capture_default_str();
  eval->add_option("--max-terms", ev.max_terms, "series term limit")->capture_default_str();
  auto* eval_seed = eval->add_option("--seed", seed, "Monte-Carlo seed (default: SBX_EC_SEED)");
  eval->add_option("--mc-samples", ev.mc_samples, "Monte-Carlo sample count (adds an mc line)");
  eval->add_option("--method", ev.methods, "exact, quadrature, high-snr, low-snr, mc (repeatable or comma list)");

  // sweep
  SweepConfig sw;
  std::string sweep_config_path, sweep_out, sweep_axis, sweep_outputs;
  bool sweep_plot = false;
  auto* sweep = app.add_subcommand("sweep", "Sweep one axis and write CSV");
  sweep->add_option("--config", sweep_config_path, "key=value config file");
  sweep->add_option("--out", sweep_out, "output CSV path")->required();
  sweep->add_flag("--emit-plot", sweep_plot, "also write a gnuplot script next to the CSV");
  auto* sw_axis = sweep->add_option("--axis", sweep_axis, "snr_db, theta, a_constraint or ebn0_db");
  auto* sw_from = sweep->add_option("--from", sw.from);
  auto* sw_to = sweep->add_option("--to", sw.to);
  auto* sw_step = sweep->add_option("--step", sw.step);
  auto* sw_mx = sweep->add_option("--mx", sw.params.m_x);
  auto* sw_ox = sweep->add_option("--omega-x", sw.params.omega_x);
  auto* sw_my = sweep->add_option("--my", sw.params.m_y);
  auto* sw_oy = sweep->add_option("--omega-y", sw.params.omega_y);
  auto* sw_snr = sweep->add_option("--snr-db", sw.snr_db);
  auto* sw_a = sweep->add_option("--A", sw.a_constraint);
  auto* sw_tb = sweep->add_option("--tb", sw.tb, "T*B for the theta axis");
  auto* sw_outs = sweep->add_option("--outputs", sweep_outputs, "comma list of exact, high_snr, low_snr, mc, quadrature");
  auto* sw_seed = sweep->add_option("--seed", sw.seed);
  auto* sw_n = sweep->add_option("--n-samples", sw.n_samples);
  auto* sw_tol = sweep->add_option("--tol", sw.ctl.rel_tol);
  auto* sw_max_terms = sweep->add_option("--max-terms", sw.ctl.max_terms);

  // figure
  int fig_id = 0;
  std::string fig_out;
  std::uint64_t fig_mc = 0;
  double fig_tb = 1.0;
  bool fig_plot = false;
  auto* figure = app.add_subcommand("figure", "Reproduce a figure's curves and claims");
  figure->add_option("--id", fig_id, "figure number 1..5")->required();
  figure->add_option("--out", fig_out, "output directory")->required();
  figure->add_option("--mc-samples", fig_mc, "Monte-Carlo samples per point (0 disables)")->capture_default_str();
  figure->add_option("--tb", fig_tb, "T*B used to map theta to A")->capture_default_str();
  auto* fig_seed = figure->add_option("--seed", seed);
  figure->add_flag("--emit-plot", fig_plot, "also write a gnuplot script");

  // validate
  std::uint64_t val_n = 1000000;
  bool break_tol = false;
  auto* val = app.add_subcommand("validate", "Run the invariant suite");
  auto* val_seed = val->add_option("--seed", seed);
  val->add_option("--n", val_n, "Monte-Carlo samples per estimate (>= 10000)")->capture_default_str();
  val->add_flag("--break-tolerance", break_tol, "corrupt every threshold (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitDomain;
  }

  try {
    seed_given = eval_seed->count() || fig_seed->count() || val_seed->count();
    if (!seed_given) seed = default_seed();

    if (eval->parsed()) {
      if (opt_a->count()) ev.a = a_value;
      if (opt_theta->count()) ev.theta = theta_value;
      ev.seed = seed;
      return cmd_eval(ev, out);
    }
    if (sweep->parsed()) {
      SweepConfig cfg;
      if (!sw_seed->count()) cfg.seed = default_seed();
      if (!sweep_config_path.empty()) {
        std::ifstream in(sweep_config_path);
        if (!in) throw DomainError("cannot read config file '" + sweep_config_path + "'");
        cfg = parse_sweep_config(in, cfg);
      }
      // Flags override the config file.
      if (sw_axis->count()) cfg.axis = parse_axis(sweep_axis);
      if (sw_from->count()) cfg.from = sw.from;
      if (sw_to->count()) cfg.to = sw.to;
      if (sw_step->count()) cfg.step = sw.step;
      if (sw_mx->count()) cfg.params.m_x = sw.params.m_x;
      if (sw_ox->count()) cfg.params.omega_x = sw.params.omega_x;
      if (sw_my->count()) cfg.params.m_y = sw.params.m_y;
      if (sw_oy->count()) cfg.params.omega_y = sw.params.omega_y;
      if (sw_snr->count()) cfg.snr_db = sw.snr_db;
      if (sw_a->count()) cfg.a_constraint = sw.a_constraint;
      if (sw_tb->count()) cfg.tb = sw.tb;
      if (sw_outs->count()) cfg.outputs = parse_outputs(sweep_outputs);
      if (sw_seed->count()) cfg.seed = sw.seed;
      if (sw_n->count()) cfg.n_samples = sw.n_samples;
      if (sw_tol->count()) cfg.ctl.rel_tol = sw.ctl.rel_tol;
      if (sw_max_terms->count()) cfg.ctl.max_terms = sw.ctl.max_terms;
      return cmd_sweep(cfg, sweep_out, sweep_plot, out);
    }
    if (figure->parsed()) return cmd_figure(fig_id, fig_out, seed, fig_mc, fig_tb, fig_plot, out);
    if (val->parsed()) return cmd_validate(seed, val_n, break_tol, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitDomain;
}

}  // namespace sbx::cli
