#pragma once

// Effective capacity R(theta) = -(1/A) log2 E[(1 + gamma)^-A] of the SBX channel.
//
// The exact route expands the 1F1 in the SNR density and integrates term by
// term, giving
//
//   E[(1+gamma)^-A] = (1-w)^m_y beta^m_x / Gamma(m_y)
//                     * sum_d Gamma(m_y + d) z^d / d! * U(m_x + d; m_x + d + 1 - A; beta)
//
// with beta = m_x C / (gamma_bar Omega_x), w the mixing fraction and z = beta w.
// Internally each summand is evaluated as NB(d) * J_d, where NB(d) is the
// negative-binomial weight Gamma(m_y+d)/(Gamma(m_y) d!) w^d (1-w)^m_y and
// J_d = beta^(m_x+d) U(...) lies in (0, 1]; both factors stay in range for
// any d, which the raw product does not.

#include <cmath>
#include <numbers>
#include <string>

#include "sbx/channel.hpp"
#include "sbx/errors.hpp"
#include "sbx/specfun.hpp"

namespace sbx {

/// QoS delay requirement. A = theta T B / ln 2 is what the formulas consume.
struct DelaySpec {
  double theta = std::numbers::ln2;
  double block_T = 1.0;
  double bandwidth_B = 1.0;
  double a_constraint = 1.0;

  static DelaySpec from_theta(double theta, double block_T, double bandwidth_B) {
    if (!(theta > 0.0)) throw DomainError("DelaySpec: theta > 0 violated");
    if (!(block_T > 0.0)) throw DomainError("DelaySpec: block_T > 0 violated");
    if (!(bandwidth_B > 0.0)) throw DomainError("DelaySpec: bandwidth_B > 0 violated");
    return {theta, block_T, bandwidth_B, theta * block_T * bandwidth_B / std::numbers::ln2};
  }

  /// A given directly; represented as theta = A ln 2 with T = B = 1.
  static DelaySpec from_a(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("DelaySpec: A > 0 violated (A must be positive)");
    return {a * std::numbers::ln2, 1.0, 1.0, a};
  }
};

inline const DelaySpec& validate(const DelaySpec& ds) {
  if (!(ds.a_constraint > 0.0) || !std::isfinite(ds.a_constraint))
    throw DomainError("DelaySpec: A > 0 violated (A must be positive)");
  if (!(ds.theta > 0.0 && ds.block_T > 0.0 && ds.bandwidth_B > 0.0))
    throw DomainError("DelaySpec: theta, T and B must be positive");
  const double recomputed = ds.theta * ds.block_T * ds.bandwidth_B / std::numbers::ln2;
  if (std::abs(recomputed - ds.a_constraint) > 1e-15 * 4.0 * ds.a_constraint)
    throw DomainError("DelaySpec: A does not match theta T B / ln 2");
  return ds;
}

struct EcResult {
  double ec_bits = 0.0;       // bits/s/Hz
  int terms_used = 0;         // series terms summed (D)
  double trunc_bound = 0.0;   // bound on the truncation error of E[(1+gamma)^-A]
  bool bound_certified = false;
  bool clamped = false;       // the partial sum exceeded 1 and was clamped
};

struct LowSnrChar {
  double s0 = 0.0;        // wideband slope, bits/s/Hz per 3 dB
  double ebn0_min = 0.0;  // linear

  double ebn0_min_db() const { return 10.0 * std::log10(ebn0_min); }
};

namespace detail {

struct SeriesSetup {
  SbxParams p;
  DerivedConstants dc;
  double a = 0.0;  // delay constraint A
};

inline SeriesSetup setup(const SbxParams& p, const LinkBudget& lb, double a, const specfun::EvalControl& ctl) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("A > 0 violated (A must be positive)");
  return {p, derive(p, lb, ctl), a};
}

/// ln of the d-th normalized summand NB(d) * J_d.
inline double log_normalized_term(const SeriesSetup& s, int d, const specfun::EvalControl& ctl) {
  const double dd = static_cast<double>(d);
  const double m = s.p.m_x + dd;
  const double log_nb = std::lgamma(s.p.m_y + dd) - std::lgamma(s.p.m_y) - std::lgamma(dd + 1.0) +
                        (d == 0 ? 0.0 : dd * std::log(s.dc.w_frac)) + s.dc.prefactor_log;
  return log_nb + specfun::detail::log_gamma_weighted_mean(m, -s.a, s.dc.beta, ctl);
}

/// ln of the series prefactor (1-w)^m_y beta^m_x / Gamma(m_y).
inline double log_prefactor(const SeriesSetup& s) {
  return s.dc.prefactor_log + s.p.m_x * std::log(s.dc.beta) - std::lgamma(s.p.m_y);
}

/// Index past which the summands decrease: the negative-binomial mode
/// (J_d is nonincreasing in d).
inline double decay_start(const SeriesSetup& s) {
  return std::max(0.0, (s.p.m_y - 1.0) * s.dc.w_frac / (1.0 - s.dc.w_frac));
}

/// Tail bound on the normalized scale for sum_{d >= D}, with the 2F1 factor
/// evaluated at `arg`.
inline double tail_factor(const SeriesSetup& s, int D, double arg, const specfun::EvalControl& ctl) {
  return specfun::gauss_2f1(1.0, s.p.m_y + D, D + 1.0, arg, ctl);
}

}  // namespace detail

/// d-th summand Gamma(m_y+d) z^d / d! * U(m_x+d; m_x+d+1-A; beta) of the
/// bracketed series, evaluated in the log domain.
inline double series_term(int d, const SbxParams& p, const LinkBudget& lb, double a,
                          const specfun::EvalControl& ctl = {}) {
  if (d < 0) throw DomainError("series_term: d >= 0 required");
  const auto s = detail::setup(p, lb, a, ctl);
  return std::exp(detail::log_normalized_term(s, d, ctl) - detail::log_prefactor(s));
}

/// Closed-form bound on sum_{d >= D} series_term(d):
///   z^D Gamma(m_y+D)/D! U(m_x+D; m_x+D+1-A; beta) 2F1(1, m_y+D; D+1; z).
/// Relies on U(m_x+D+g; ...; beta) being nonincreasing in g, which holds for
/// beta >= 1 only; see truncation_bound_sound for a form valid for any beta.
inline double truncation_bound(int D, const SbxParams& p, const LinkBudget& lb, double a,
                               const specfun::EvalControl& ctl = {}) {
  if (D < 1) throw DomainError("truncation_bound: D >= 1 required");
  const auto s = detail::setup(p, lb, a, ctl);
  if (!(s.dc.z_arg < 1.0)) throw DomainError("truncation_bound: bound inapplicable, requires z < 1");
  return std::exp(detail::log_normalized_term(s, D, ctl) - detail::log_prefactor(s)) *
         detail::tail_factor(s, D, s.dc.z_arg, ctl);
}

/// Same bound with the 2F1 argument raised to max(z, w). Since
/// U(a+1; b+1; beta) <= U(a; b; beta) / beta, the shift g contributes at most
/// max(1, 1/beta)^g, which turns z^g into max(z, w)^g. Equals
/// truncation_bound when beta >= 1.
inline double truncation_bound_sound(int D, const SbxParams& p, const LinkBudget& lb, double a,
                                     const specfun::EvalControl& ctl = {}) {
  if (D < 1) throw DomainError("truncation_bound_sound: D >= 1 required");
  const auto s = detail::setup(p, lb, a, ctl);
  if (!(s.dc.z_arg < 1.0)) throw DomainError("truncation_bound_sound: bound inapplicable, requires z < 1");
  const double arg = std::max(s.dc.z_arg, s.dc.w_frac);
  return std::exp(detail::log_normalized_term(s, D, ctl) - detail::log_prefactor(s)) *
         detail::tail_factor(s, D, arg, ctl);
}

/// Exact effective capacity by the truncated series.
///
/// Stopping rule: when z < 1 the series stops at the first D whose certified
/// tail bound is below rel_tol times the partial sum. When z >= 1 no closed
/// bound exists and the series stops after three consecutive summands below
/// rel_tol times the partial sum, once past the point where the summands
/// start to decrease.
inline EcResult effective_capacity_exact(const SbxParams& p, const LinkBudget& lb, const DelaySpec& ds,
                                         const specfun::EvalControl& ctl = {}) {
  ctl.validate();
  validate(ds);
  const auto s = detail::setup(p, lb, ds.a_constraint, ctl);
  const bool certified = s.dc.z_arg < 1.0;
  const double bound_arg = std::max(s.dc.z_arg, s.dc.w_frac);
  const double peak = detail::decay_start(s);

  EcResult res;
  res.bound_certified = certified;
  double sum = 0.0;
  int small_run = 0;
  for (int d = 0; d < ctl.max_terms; ++d) {
    const double term = std::exp(detail::log_normalized_term(s, d, ctl));
    const bool decaying = d > peak;
    if (d >= 1 && decaying && term <= ctl.rel_tol * sum) {
      if (certified) {
        const double bound = term * detail::tail_factor(s, d, bound_arg, ctl);
        if (bound <= ctl.rel_tol * sum) {
          res.terms_used = d;
          res.trunc_bound = bound;
          break;
        }
      } else if (++small_run == 3) {
        sum += term;
        res.terms_used = d + 1;
        res.trunc_bound = term;
        break;
      }
    } else {
      small_run = 0;
    }
    sum += term;
  }
  if (res.terms_used == 0)
    throw ConvergenceError("effective_capacity_exact: series did not converge within max_terms=" +
                           std::to_string(ctl.max_terms));
  if (sum > 1.0) {
    sum = 1.0;
    res.clamped = true;
  }
  res.ec_bits = std::max(0.0, -std::log2(sum) / ds.a_constraint);
  return res;
}

/// High-SNR asymptote from (1 + gamma)^-A ~ gamma^-A. Requires m_x > A.
inline double effective_capacity_high_snr(const SbxParams& p, const LinkBudget& lb, const DelaySpec& ds,
                                          const specfun::EvalControl& ctl = {}) {
  validate(ds);
  const double a = ds.a_constraint;
  if (!(p.m_x - a > 0.0)) throw DomainError("high-SNR asymptote requires m_x > A");
  const DerivedConstants dc = derive(p, lb, ctl);
  const double log_e = std::lgamma(p.m_x - a) - std::lgamma(p.m_x) + dc.prefactor_log + a * std::log(dc.beta) +
                       std::log(specfun::gauss_2f1(p.m_y, p.m_x - a, p.m_x, dc.w_frac, ctl));
  return -log_e / (a * std::numbers::ln2);
}

/// Wideband slope and minimum Eb/N0 from the first two SNR moments at unit
/// average SNR.
inline LowSnrChar low_snr_characterization(const SbxParams& p, const DelaySpec& ds,
                                           const specfun::EvalControl& ctl = {}) {
  validate(ds);
  const double a = ds.a_constraint;
  const LinkBudget unit{1.0};
  const double e1 = moment1(p, unit, ctl);
  const double e2 = moment2(p, unit, ctl);
  const double denom = (a + 1.0) * e2 - a * e1 * e1;
  if (!(denom > 0.0)) throw DomainError("low-SNR characterization degenerate: (A+1)E[g^2] - A E[g]^2 <= 0");
  const double r1 = e1 / std::numbers::ln2;
  const double r2 = (a * e1 * e1 - (a + 1.0) * e2) / std::numbers::ln2;
  return {-2.0 * r1 * r1 * std::numbers::ln2 / r2, 1.0 / r1};
}

/// Low-SNR linear approximation S0 log2(Eb/N0 / Eb/N0_min), clamped at 0.
inline double ec_low_snr_approx(const LowSnrChar& ch, double ebn0) {
  if (!(ebn0 > 0.0)) throw DomainError("ec_low_snr_approx: ebn0 > 0 required");
  return std::max(0.0, ch.s0 * std::log2(ebn0 / ch.ebn0_min));
}

}  // namespace sbx
