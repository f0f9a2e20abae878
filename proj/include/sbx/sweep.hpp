#pragma once

// Declarative parameter sweeps and their CSV rendering.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sbx/channel.hpp"
#include "sbx/effcap.hpp"
#include "sbx/errors.hpp"
#include "sbx/oracle.hpp"

namespace sbx {

enum class Axis { snr_db, theta, a_constraint, ebn0_db };
enum class Output { exact, high_snr, low_snr, mc, quadrature };

inline constexpr std::uint64_t kDefaultSeed = 20240601;
inline constexpr const char* kCsvMagic = "# sbx-effcap v1";
inline constexpr const char* kNotApplicable = "NA";

inline std::string to_string(Axis a) {
  switch (a) {
    case Axis::snr_db: return "snr_db";
    case Axis::theta: return "theta";
    case Axis::a_constraint: return "a_constraint";
    case Axis::ebn0_db: return "ebn0_db";
  }
  return "?";
}

inline Axis parse_axis(const std::string& s) {
  if (s == "snr_db") return Axis::snr_db;
  if (s == "theta") return Axis::theta;
  if (s == "a_constraint") return Axis::a_constraint;
  if (s == "ebn0_db") return Axis::ebn0_db;
  throw DomainError("unknown axis '" + s + "' (expected snr_db, theta, a_constraint or ebn0_db)");
}

inline std::string to_string(Output o) {
  switch (o) {
    case Output::exact: return "exact";
    case Output::high_snr: return "high_snr";
    case Output::low_snr: return "low_snr";
    case Output::mc: return "mc";
    case Output::quadrature: return "quadrature";
  }
  return "?";
}

inline Output parse_output(const std::string& s) {
  if (s == "exact") return Output::exact;
  if (s == "high_snr" || s == "high-snr") return Output::high_snr;
  if (s == "low_snr" || s == "low-snr") return Output::low_snr;
  if (s == "mc") return Output::mc;
  if (s == "quadrature") return Output::quadrature;
  throw DomainError("unknown output '" + s + "' (expected exact, high_snr, low_snr, mc or quadrature)");
}

inline std::vector<Output> parse_outputs(const std::string& list) {
  std::vector<Output> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(parse_output(item));
  }
  if (out.empty()) throw DomainError("outputs: at least one output required");
  return out;
}

struct SweepConfig {
  Axis axis = Axis::snr_db;
  double from = 0.0;
  double to = 30.0;
  double step = 1.0;
  SbxParams params{2.0, 2.0, 10.0, 10.0};
  double snr_db = 10.0;        // used unless the axis is snr_db
  double a_constraint = 1.0;   // used unless the axis is theta or a_constraint
  double tb = 1.0;             // T*B product for the theta axis
  std::vector<Output> outputs{Output::exact};
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t n_samples = 1000000;
  unsigned shards = kDefaultShards;
  specfun::EvalControl ctl{};

  std::size_t point_count() const { return static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1; }

  double point(std::size_t i) const { return from + static_cast<double>(i) * step; }

  void validate() const {
    if (!std::isfinite(from) || !std::isfinite(to) || !std::isfinite(step))
      throw DomainError("sweep range must be finite");
    if (!(from < to)) throw DomainError("sweep range empty: from < to required");
    if (!(step > 0.0)) throw DomainError("sweep step > 0 required");
    if ((to - from) / step > 1e6) throw DomainError("sweep too large: (to - from) / step <= 1e6 required");
    sbx::validate(params);
    if (!(tb > 0.0)) throw DomainError("tb > 0 required");
    if (!(a_constraint > 0.0)) throw DomainError("A > 0 violated (A must be positive)");
    if (outputs.empty()) throw DomainError("outputs: at least one output required");
    if (std::find(outputs.begin(), outputs.end(), Output::mc) != outputs.end() && n_samples < 1000)
      throw DomainError("n_samples >= 1000 required for mc output");
    if (axis == Axis::theta && !(from > 0.0)) throw DomainError("theta axis must start above 0");
    if (axis == Axis::a_constraint && !(from > 0.0)) throw DomainError("a_constraint axis must start above 0");
    ctl.validate();
  }
};

/// Parses the flat key=value format. Lines starting with '#' are comments.
inline SweepConfig parse_sweep_config(std::istream& in, SweepConfig cfg = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    auto num = [&] {
      try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        throw DomainError("config line " + std::to_string(lineno) + ": '" + key + "' expects a number");
      }
    };
    auto count = [&] {
      try {
        std::size_t used = 0;
        const auto v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return static_cast<std::uint64_t>(v);
      } catch (const std::exception&) {
        throw DomainError("config line " + std::to_string(lineno) + ": '" + key + "' expects an integer");
      }
    };
    if (key == "axis") cfg.axis = parse_axis(value);
    else if (key == "from") cfg.from = num();
    else if (key == "to") cfg.to = num();
    else if (key == "step") cfg.step = num();
    else if (key == "mx" || key == "m_x") cfg.params.m_x = num();
    else if (key == "omega_x") cfg.params.omega_x = num();
    else if (key == "my" || key == "m_y") cfg.params.m_y = num();
    else if (key == "omega_y") cfg.params.omega_y = num();
    else if (key == "snr_db") cfg.snr_db = num();
    else if (key == "A" || key == "a_constraint") cfg.a_constraint = num();
    else if (key == "tb") cfg.tb = num();
    else if (key == "outputs") cfg.outputs = parse_outputs(value);
    else if (key == "seed") cfg.seed = count();
    else if (key == "n_samples") cfg.n_samples = count();
    else if (key == "shards") cfg.shards = static_cast<unsigned>(count());
    else if (key == "tol") cfg.ctl.rel_tol = num();
    else if (key == "max_terms") cfg.ctl.max_terms = static_cast<int>(std::min<std::uint64_t>(count(), 1u << 30));
    else throw DomainError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return cfg;
}

/// Fixed 15-significant-digit rendering used by every CSV and eval line.
inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline std::vector<std::string> csv_columns(const SweepConfig& cfg) {
  std::vector<std::string> cols{to_string(cfg.axis)};
  for (Output o : cfg.outputs) {
    cols.push_back("ec_" + to_string(o) + "_bits_per_s_per_hz");
    if (o == Output::mc) cols.push_back("ec_mc_std_err_bits_per_s_per_hz");
  }
  return cols;
}

/// Operating point for axis value x.
struct SweepPoint {
  LinkBudget lb;
  DelaySpec ds;
  double ebn0_db = 0.0;
};

inline SweepPoint sweep_point(const SweepConfig& cfg, double x) {
  SweepPoint pt{LinkBudget::from_db(cfg.snr_db), DelaySpec::from_a(cfg.a_constraint), 0.0};
  switch (cfg.axis) {
    case Axis::snr_db: pt.lb = LinkBudget::from_db(x); break;
    case Axis::theta: pt.ds = DelaySpec::from_theta(x, cfg.tb, 1.0); break;
    case Axis::a_constraint: pt.ds = DelaySpec::from_a(x); break;
    case Axis::ebn0_db: pt.ebn0_db = x; break;
  }
  return pt;
}

/// One CSV row's cells (without the axis cell).
inline std::vector<std::string> evaluate_row(const SweepConfig& cfg, std::size_t index) {
  const double x = cfg.point(index);
  const SweepPoint pt = sweep_point(cfg, x);
  const bool ebn0_axis = cfg.axis == Axis::ebn0_db;
  std::vector<std::string> cells;
  for (Output o : cfg.outputs) {
    switch (o) {
      case Output::exact:
        cells.push_back(ebn0_axis ? kNotApplicable
                                  : format_value(effective_capacity_exact(cfg.params, pt.lb, pt.ds, cfg.ctl).ec_bits));
        break;
      case Output::quadrature:
        cells.push_back(ebn0_axis ? kNotApplicable : format_value(ec_quadrature(cfg.params, pt.lb, pt.ds, cfg.ctl)));
        break;
      case Output::high_snr:
        if (ebn0_axis || !(cfg.params.m_x > pt.ds.a_constraint))
          cells.push_back(kNotApplicable);
        else
          cells.push_back(format_value(effective_capacity_high_snr(cfg.params, pt.lb, pt.ds, cfg.ctl)));
        break;
      case Output::low_snr:
        if (!ebn0_axis) {
          cells.push_back(kNotApplicable);
        } else {
          const LowSnrChar ch = low_snr_characterization(cfg.params, pt.ds, cfg.ctl);
          cells.push_back(format_value(ec_low_snr_approx(ch, std::pow(10.0, pt.ebn0_db / 10.0))));
        }
        break;
      case Output::mc:
        if (ebn0_axis) {
          cells.push_back(kNotApplicable);
          cells.push_back(kNotApplicable);
        } else {
          const McEstimate m = ec_monte_carlo(cfg.params, pt.lb, pt.ds, detail::derive_seed(cfg.seed, index),
                                              cfg.n_samples, cfg.shards);
          cells.push_back(format_value(m.value));
          cells.push_back(format_value(m.std_err));
        }
        break;
    }
  }
  return cells;
}

/// Evaluates every axis point, spread over worker threads; rows come back
/// in axis order.
inline std::string render_sweep_csv(const SweepConfig& cfg, unsigned workers = 0) {
  cfg.validate();
  const std::size_t n = cfg.point_count();
  std::vector<std::vector<std::string>> rows(n);
  std::vector<std::exception_ptr> failures(n);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        rows[i] = evaluate_row(cfg, i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);

  std::ostringstream out;
  out << kCsvMagic << '\n';
  const auto cols = csv_columns(cfg);
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out << format_value(cfg.point(i));
    for (const auto& cell : rows[i]) out << ',' << cell;
    out << '\n';
  }
  return out.str();
}

/// Writes via a temporary file so a failed sweep leaves nothing behind.
inline void write_file_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".partial";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw DomainError("cannot open output file '" + path + "'");
    f << content;
    if (!f) {
      std::remove(tmp.c_str());
      throw DomainError("failed writing output file '" + path + "'");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw DomainError("cannot move output into place at '" + path + "'");
  }
}

}  // namespace sbx
