#pragma once

// Independent routes to the effective capacity, used to check the series:
// direct quadrature of E[(1+gamma)^-A] against the SNR density, and
// Monte-Carlo estimation from channel samples.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "sbx/channel.hpp"
#include "sbx/effcap.hpp"
#include "sbx/errors.hpp"

namespace sbx {

struct McEstimate {
  double value = 0.0;
  double std_err = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  unsigned shard_count = 1;
};

inline constexpr unsigned kDefaultShards = 8;

namespace detail {

/// integral_0^inf h(gamma) f_gamma(gamma) d gamma, split into a body
/// [0, cut] and an exponentially mapped tail gamma = cut - ln(u) / rate.
template <class H>
double integrate_against_snr_pdf(const SbxParams& p, const LinkBudget& lb, H h, const specfun::EvalControl& ctl,
                                 double* abs_err = nullptr) {
  const DerivedConstants dc = derive(p, lb, ctl);
  // The density is summed to full double precision; a looser series
  // tolerance shows up as jitter that the quadrature error estimate sees.
  specfun::EvalControl pdf_ctl = ctl;
  pdf_ctl.rel_tol = 1e-17;
  const double rate = dc.beta * (1.0 - dc.w_frac);  // decay rate of f_gamma
  auto integrand = [&](double g) {
    if (g <= 0.0) return 0.0;
    return h(g) * std::exp(detail::log_power_density(p, dc.beta, dc.w_frac, g, pdf_ctl));
  };

  // Locate the peak on a log grid, then walk out until the integrand is
  // negligible relative to it.
  const double scale = 1.0 / rate;
  double peak_at = scale, peak = 0.0;
  for (double g = 1e-10 * scale; g < 200.0 * scale; g *= 1.25) {
    const double v = integrand(g);
    if (v > peak) peak = v, peak_at = g;
  }
  double cut = std::max(2.0 * peak_at, scale);
  while (integrand(cut) > 1e-16 * peak) cut += 0.5 * scale + 0.1 * cut;

  const unsigned depth = static_cast<unsigned>(std::ceil(std::log2(std::max(ctl.quad_nodes, 2))));
  double err = 0.0, total = 0.0;

  // Each piece is mapped onto [0, 1] so boost's (unscaled) refinement test
  // sees the same scale everywhere. The error is the spread between two
  // Kronrod orders.
  auto piece = [&](auto&& f, double lo, double hi) {
    auto unit = [&](double t) { return f(lo + (hi - lo) * t) * (hi - lo); };
    using boost::math::quadrature::gauss_kronrod;
    const double fine = gauss_kronrod<double, 61>::integrate(unit, 0.0, 1.0, depth, 1e-14);
    const double coarse = gauss_kronrod<double, 31>::integrate(unit, 0.0, 1.0, depth, 1e-14);
    total += fine;
    err += std::abs(fine - coarse);
  };

  // The body near the origin may carry a gamma^(m_x - 1) endpoint
  // singularity; tanh-sinh clusters nodes at the endpoints.
  const double first = std::min(std::max(0.5 * peak_at, 0.05 * scale), cut);
  {
    boost::math::quadrature::tanh_sinh<double> ts(std::max(depth + 6, 15u));
    double e = 0.0;
    total += ts.integrate(integrand, 0.0, first, 1e-14, &e);
    err += e;
  }
  std::vector<double> edges{first};
  for (double x = std::max(first, peak_at); x < cut; x *= 2.0) edges.push_back(x);
  edges.push_back(cut);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] > edges[i]) piece(integrand, edges[i], edges[i + 1]);
  }
  auto tail = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double g = cut - std::log(u) / rate;
    return integrand(g) / (rate * u);
  };
  piece(tail, 0.0, 1.0);
  if (abs_err) *abs_err = err;
  return total;
}

/// Mean and standard error of fn(gamma) over n SNR draws split across
/// shards. Shard s uses seed derive_seed(seed, s); results are merged in
/// shard order, so the output depends on (seed, n, shards) only.
template <class Fn>
std::pair<double, double> mc_mean(const SbxParams& p, const LinkBudget& lb, std::uint64_t seed, std::uint64_t n,
                                  unsigned shards, Fn fn) {
  shards = std::max(1u, shards);
  struct Acc {
    double n = 0, mean = 0, m2 = 0;
  };
  std::vector<Acc> acc(shards);
  auto run = [&](unsigned s) {
    const std::uint64_t count = n / shards + (s < n % shards ? 1 : 0);
    SnrSampler sampler(p, lb, derive_seed(seed, s));
    Acc a;
    for (std::uint64_t i = 0; i < count; ++i) {
      const double x = fn(sampler());
      a.n += 1.0;
      const double delta = x - a.mean;
      a.mean += delta / a.n;
      a.m2 += delta * (x - a.mean);
    }
    acc[s] = a;
  };
  std::vector<std::thread> workers;
  workers.reserve(shards);
  for (unsigned s = 0; s < shards; ++s) workers.emplace_back(run, s);
  for (auto& t : workers) t.join();

  Acc total;
  for (const Acc& a : acc) {
    if (a.n == 0) continue;
    const double nn = total.n + a.n;
    const double delta = a.mean - total.mean;
    total.mean += delta * a.n / nn;
    total.m2 += a.m2 + delta * delta * total.n * a.n / nn;
    total.n = nn;
  }
  const double var = total.m2 / (total.n - 1.0);
  return {total.mean, std::sqrt(var / total.n)};
}

}  // namespace detail

/// E[(1+gamma)^-A] by quadrature of the SNR density.
inline double ec_expectation_quadrature(const SbxParams& p, const LinkBudget& lb, const DelaySpec& ds,
                                        const specfun::EvalControl& ctl = {}) {
  validate(ds);
  const double a = ds.a_constraint;
  double err = 0.0;
  const double e = detail::integrate_against_snr_pdf(
      p, lb, [a](double g) { return std::exp(-a * std::log1p(g)); }, ctl, &err);
  if (!(err <= 1e-12)) throw ConvergenceError("ec_quadrature: absolute error estimate above 1e-12");
  return e;
}

/// Effective capacity by direct quadrature of its definition.
inline double ec_quadrature(const SbxParams& p, const LinkBudget& lb, const DelaySpec& ds,
                            const specfun::EvalControl& ctl = {}) {
  const double e = std::min(ec_expectation_quadrature(p, lb, ds, ctl), 1.0);
  return -std::log2(e) / ds.a_constraint;
}

/// integral_0^inf f_gamma, for normalization checks.
inline double snr_pdf_mass(const SbxParams& p, const LinkBudget& lb, const specfun::EvalControl& ctl = {}) {
  return detail::integrate_against_snr_pdf(p, lb, [](double) { return 1.0; }, ctl);
}

/// integral_0^inf gamma^k f_gamma.
inline double snr_pdf_moment(const SbxParams& p, const LinkBudget& lb, int k, const specfun::EvalControl& ctl = {}) {
  return detail::integrate_against_snr_pdf(p, lb, [k](double g) { return std::pow(g, k); }, ctl);
}

inline McEstimate ec_monte_carlo(const SbxParams& p, const LinkBudget& lb, const DelaySpec& ds, std::uint64_t seed,
                                 std::uint64_t n, unsigned shards = kDefaultShards) {
  validate(ds);
  validate(p);
  validate(lb);
  if (n < 1000) throw DomainError("ec_monte_carlo: n >= 1000 required");
  const double a = ds.a_constraint;
  auto [mean, se] = detail::mc_mean(p, lb, seed, n, shards, [a](double g) { return std::exp(-a * std::log1p(g)); });
  McEstimate est;
  est.value = -std::log2(mean) / a;
  est.std_err = se / (a * mean * std::numbers::ln2);
  est.n = n;
  est.seed = seed;
  est.shard_count = std::max(1u, shards);
  return est;
}

inline McEstimate ergodic_capacity_mc(const SbxParams& p, const LinkBudget& lb, std::uint64_t seed, std::uint64_t n,
                                      unsigned shards = kDefaultShards) {
  validate(p);
  validate(lb);
  if (n < 1000) throw DomainError("ergodic_capacity_mc: n >= 1000 required");
  auto [mean, se] = detail::mc_mean(p, lb, seed, n, shards, [](double g) { return std::log2(1.0 + g); });
  return {mean, se, n, seed, std::max(1u, shards)};
}

}  // namespace sbx
