#pragma once

// Invariant checks shared by `sbx_effcap validate` and the acceptance suite.
// Each check returns what it measured and the threshold it applied.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sbx/channel.hpp"
#include "sbx/effcap.hpp"
#include "sbx/oracle.hpp"
#include "sbx/sweep.hpp"

namespace sbx::validation {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct GridPoint {
  SbxParams p;
  double a = 1.0;
  double gamma_bar = 1.0;
};

inline constexpr double kGridMx[] = {1.0, 2.0, 3.0};
inline constexpr double kGridMy[] = {2.0, 5.0, 10.0};
inline constexpr double kGridA[] = {0.5, 1.0, 5.0};
inline constexpr double kGridSnr[] = {1.0, 10.0, 100.0};
inline constexpr double kGridOmega = 2.0;

/// m_x x m_y x A x gamma_bar, Omega_x = Omega_y = 2: 81 points.
inline std::vector<GridPoint> acceptance_grid() {
  std::vector<GridPoint> g;
  for (double mx : kGridMx)
    for (double my : kGridMy)
      for (double a : kGridA)
        for (double gb : kGridSnr) g.push_back({{mx, kGridOmega, my, kGridOmega}, a, gb});
  return g;
}

/// Random but reproducible valid parameter sets.
inline std::vector<std::pair<SbxParams, double>> random_parameter_sets(std::uint64_t seed, int count) {
  detail::Variates rng(seed);
  std::vector<std::pair<SbxParams, double>> out;
  for (int i = 0; i < count; ++i) {
    SbxParams p{0.5 + 4.5 * rng.uniform(), 0.1 + 9.9 * rng.uniform(), 0.5 + 19.5 * rng.uniform(),
                0.1 + 9.9 * rng.uniform()};
    out.push_back({p, std::pow(10.0, -1.0 + 4.0 * rng.uniform())});
  }
  return out;
}

inline CheckResult make(std::string name, double measured, double threshold, std::string detail = {}) {
  return {std::move(name), measured, threshold, measured <= threshold, std::move(detail)};
}

inline CheckResult check_normalization(double tol_scale = 1.0) {
  double worst = 0.0;
  for (double mx : kGridMx)
    for (double my : kGridMy)
      for (double gb : kGridSnr) {
        const double mass = snr_pdf_mass({mx, kGridOmega, my, kGridOmega}, {gb});
        worst = std::max(worst, std::abs(mass - 1.0));
      }
  return make("normalization: max |int f_gamma - 1| (27 points)", worst, 1e-8 * tol_scale);
}

inline CheckResult check_mean_identity(std::uint64_t seed, double tol_scale = 1.0) {
  double worst = 0.0;
  for (const auto& [p, gb] : random_parameter_sets(seed, 20))
    worst = std::max(worst, std::abs(moment1(p, {gb}) / gb - 1.0));
  return make("mean identity: max |E[gamma]/gamma_bar - 1| (20 random sets)", worst, 1e-12 * tol_scale);
}

inline CheckResult check_ebn0_invariance(double tol_scale = 1.0) {
  double worst = 0.0;
  for (double mx : kGridMx)
    for (double my : kGridMy) {
      const SbxParams p{mx, kGridOmega, my, kGridOmega};
      const double e1 = low_snr_characterization(p, DelaySpec::from_a(1.0)).ebn0_min;
      const double e5 = low_snr_characterization(p, DelaySpec::from_a(5.0)).ebn0_min;
      worst = std::max(worst, std::abs(e5 / e1 - 1.0));
    }
  return make("Eb/N0_min invariance A=1 vs A=5: max relative change", worst, 1e-12 * tol_scale);
}

inline CheckResult check_oracle_equivalence(double tol_scale = 1.0) {
  double worst = 0.0;
  std::string where;
  for (const GridPoint& g : acceptance_grid()) {
    const DelaySpec ds = DelaySpec::from_a(g.a);
    const double exact = effective_capacity_exact(g.p, {g.gamma_bar}, ds).ec_bits;
    const double quad = ec_quadrature(g.p, {g.gamma_bar}, ds);
    const double rel = std::abs(exact - quad) / std::abs(quad);
    if (rel > worst) {
      worst = rel;
      where = "m_x=" + format_value(g.p.m_x) + " m_y=" + format_value(g.p.m_y) + " A=" + format_value(g.a) +
              " snr=" + format_value(g.gamma_bar);
    }
  }
  return make("oracle equivalence: max |exact - quadrature| / quadrature (81 points)", worst, 1e-6 * tol_scale,
              "worst at " + where);
}

inline CheckResult check_quadrature_refinement(double tol_scale = 1.0) {
  double worst = 0.0;
  specfun::EvalControl fine;
  fine.quad_nodes *= 2;
  for (const GridPoint& g : acceptance_grid()) {
    const DelaySpec ds = DelaySpec::from_a(g.a);
    const double q1 = ec_quadrature(g.p, {g.gamma_bar}, ds);
    const double q2 = ec_quadrature(g.p, {g.gamma_bar}, ds, fine);
    const double e1 = effective_capacity_exact(g.p, {g.gamma_bar}, ds).ec_bits;
    const double e2 = effective_capacity_exact(g.p, {g.gamma_bar}, ds, fine).ec_bits;
    worst = std::max({worst, std::abs(q1 - q2) / std::abs(q1), std::abs(e1 - e2) / std::abs(e1)});
  }
  return make("quadrature refinement: max relative change on doubling resolution (exact and oracle routes)", worst,
              1e-9 * tol_scale);
}

/// Largest |exact - MC| in units of the MC standard error over the grid.
inline CheckResult check_mc_corroboration(std::uint64_t seed, std::uint64_t n, double tol_scale = 1.0) {
  double worst = 0.0;
  int failures = 0;
  const auto grid = acceptance_grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const GridPoint& g = grid[i];
    const DelaySpec ds = DelaySpec::from_a(g.a);
    const double exact = effective_capacity_exact(g.p, {g.gamma_bar}, ds).ec_bits;
    const McEstimate mc = ec_monte_carlo(g.p, {g.gamma_bar}, ds, detail::derive_seed(seed, i), n);
    const double zscore = std::abs(exact - mc.value) / mc.std_err;
    worst = std::max(worst, zscore);
    if (zscore > 3.0 * tol_scale) ++failures;
  }
  return make("Monte-Carlo corroboration: max |exact - MC| / std_err (81 points, n=" + std::to_string(n) + ")", worst,
              3.0 * tol_scale, std::to_string(failures) + " points beyond threshold");
}

enum class BoundForm { at_z, at_max_z_w };

/// Counts (grid point, D) pairs with z < 1 where the bound falls below the
/// brute-force tail sum_{d=D}^{D+500} series_term(d).
inline CheckResult check_bound_soundness(BoundForm form) {
  int violations = 0, cases = 0;
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (const GridPoint& g : acceptance_grid()) {
    const LinkBudget lb{g.gamma_bar};
    if (!(derive(g.p, lb).z_arg < 1.0)) continue;
    std::vector<double> terms(20 + 501);
    for (int d = 1; d < static_cast<int>(terms.size()); ++d) terms[d] = series_term(d, g.p, lb, g.a);
    for (int D : {1, 2, 5, 10, 20}) {
      double tail = 0.0;
      for (int d = D; d <= D + 500; ++d) tail += terms[d];
      const double bound = form == BoundForm::at_z ? truncation_bound(D, g.p, lb, g.a)
                                                      : truncation_bound_sound(D, g.p, lb, g.a);
      ++cases;
      worst_ratio = std::min(worst_ratio, bound / tail);
      if (bound < tail) ++violations;
    }
  }
  const std::string name = form == BoundForm::at_z ? "truncation bound (2F1 factor at z): violations"
                                                      : "truncation bound (2F1 factor at max(z, w)): violations";
  return make(name, violations, 0.0, std::to_string(cases) + " cases, min bound/tail = " + format_value(worst_ratio));
}

inline CheckResult check_monotone_in_a() {
  int violations = 0;
  for (double mx : kGridMx)
    for (double my : kGridMy)
      for (double gb : kGridSnr) {
        double prev = std::numeric_limits<double>::infinity();
        for (double a : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
          const double ec = effective_capacity_exact({mx, kGridOmega, my, kGridOmega}, {gb}, DelaySpec::from_a(a)).ec_bits;
          if (!(ec < prev)) ++violations;
          prev = ec;
        }
      }
  return make("EC strictly decreasing in A: violations", violations, 0.0);
}

inline CheckResult check_monotone_in_snr() {
  int violations = 0;
  for (double mx : kGridMx)
    for (double my : kGridMy)
      for (double a : kGridA) {
        double prev = -1.0;
        for (double gb : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
          const double ec = effective_capacity_exact({mx, kGridOmega, my, kGridOmega}, {gb}, DelaySpec::from_a(a)).ec_bits;
          if (!(ec > prev)) ++violations;
          prev = ec;
        }
      }
  return make("EC strictly increasing in gamma_bar: violations", violations, 0.0);
}

/// EC(A) <= ergodic capacity + 3 std_err at every grid point.
inline CheckResult check_jensen(std::uint64_t seed, std::uint64_t n, double tol_scale = 1.0) {
  int violations = 0;
  std::size_t k = 0;
  for (double mx : kGridMx)
    for (double my : kGridMy)
      for (double gb : kGridSnr) {
        const SbxParams p{mx, kGridOmega, my, kGridOmega};
        const McEstimate erg = ergodic_capacity_mc(p, {gb}, detail::derive_seed(seed, 1000 + k++), n);
        for (double a : kGridA) {
          const double ec = effective_capacity_exact(p, {gb}, DelaySpec::from_a(a)).ec_bits;
          if (ec > erg.value + 3.0 * tol_scale * erg.std_err) ++violations;
        }
      }
  return make("EC <= ergodic capacity (Jensen): violations", violations, 0.0);
}

/// Relative gap between exact and high-SNR EC at 40 dB, and strict decrease
/// of the gap along 10, 20, 30, 40 dB, for grid points with m_x > A.
inline CheckResult check_high_snr(double tol_scale = 1.0) {
  double worst = 0.0;
  int order_violations = 0;
  for (double mx : kGridMx)
    for (double my : kGridMy)
      for (double a : kGridA) {
        if (!(mx > a)) continue;
        const SbxParams p{mx, kGridOmega, my, kGridOmega};
        const DelaySpec ds = DelaySpec::from_a(a);
        double prev = std::numeric_limits<double>::infinity();
        for (double db : {10.0, 20.0, 30.0, 40.0}) {
          const LinkBudget lb = LinkBudget::from_db(db);
          const double exact = effective_capacity_exact(p, lb, ds).ec_bits;
          const double gap = std::abs(exact - effective_capacity_high_snr(p, lb, ds));
          if (!(gap < prev)) ++order_violations;
          prev = gap;
          if (db == 40.0) worst = std::max(worst, gap / exact);
        }
      }
  CheckResult r = make("high-SNR asymptote: max relative gap at 40 dB", worst, 0.01 * tol_scale,
                       std::to_string(order_violations) + " ordering violations along 10/20/30/40 dB");
  r.pass = r.pass && order_violations == 0;
  return r;
}

/// EC at A = 1e-4 against Monte-Carlo ergodic capacity on the Fig. 1 channels.
inline CheckResult check_ergodic_limit(std::uint64_t seed, std::uint64_t n, double tol_scale = 1.0) {
  double worst = 0.0;
  std::size_t k = 0;
  for (auto [mx, ox] : std::vector<std::pair<double, double>>{{1, 2}, {2, 2}, {3, 2}, {2, 1}, {2, 5}})
    for (double db : {0.0, 10.0, 20.0, 30.0}) {
      const SbxParams p{mx, ox, 10.0, 10.0};
      const LinkBudget lb = LinkBudget::from_db(db);
      const double ec = effective_capacity_exact(p, lb, DelaySpec::from_a(1e-4)).ec_bits;
      const McEstimate erg = ergodic_capacity_mc(p, lb, detail::derive_seed(seed, 2000 + k++), n);
      worst = std::max(worst, std::abs(ec - erg.value) / erg.value);
    }
  return make("ergodic limit: max |EC(A=1e-4) - ergodic MC| / ergodic (Fig. 1 set, n=" + std::to_string(n) + ")",
              worst, 0.005 * tol_scale);
}

/// The suite run by `validate`.
inline std::vector<CheckResult> run_suite(std::uint64_t seed, std::uint64_t n, double tol_scale = 1.0) {
  std::vector<CheckResult> out;
  out.push_back(check_normalization(tol_scale));
  out.push_back(check_mean_identity(seed, tol_scale));
  out.push_back(check_ebn0_invariance(tol_scale));
  out.push_back(check_oracle_equivalence(tol_scale));
  out.push_back(check_quadrature_refinement(tol_scale));
  out.push_back(check_mc_corroboration(seed, n, tol_scale));
  out.push_back(check_bound_soundness(BoundForm::at_max_z_w));
  out.push_back(check_monotone_in_a());
  out.push_back(check_monotone_in_snr());
  out.push_back(check_jensen(seed, n, tol_scale));
  out.push_back(check_high_snr(tol_scale));
  out.push_back(check_ergodic_limit(seed, n, tol_scale));
  return out;
}

}  // namespace sbx::validation
