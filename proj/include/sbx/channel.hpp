#pragma once

// Shadowed Beaulieu-Xie (SBX) channel: Beaulieu-Xie multipath fading whose
// LOS amplitude is Nakagami-m shadowed.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sbx/errors.hpp"
#include "sbx/specfun.hpp"

namespace sbx {

struct SbxParams {
  double m_x = 1.0;      // multipath fading
  double omega_x = 1.0;  // multipath spread
  double m_y = 1.0;      // shadowing fading
  double omega_y = 1.0;  // shadowing spread
};

/// Average received SNR, linear.
struct LinkBudget {
  double gamma_bar = 1.0;

  static LinkBudget from_db(double snr_db) { return {std::pow(10.0, snr_db / 10.0)}; }
};

inline SbxParams validate(const SbxParams& p) {
  if (!(p.m_x >= 0.5)) throw DomainError("SbxParams: m_x >= 0.5 violated (m_x = " + std::to_string(p.m_x) + ")");
  if (!(p.m_y >= 0.5)) throw DomainError("SbxParams: m_y >= 0.5 violated (m_y = " + std::to_string(p.m_y) + ")");
  if (!(p.omega_x > 0.0) || !std::isfinite(p.omega_x)) throw DomainError("SbxParams: omega_x > 0 violated");
  if (!(p.omega_y > 0.0) || !std::isfinite(p.omega_y)) throw DomainError("SbxParams: omega_y > 0 violated");
  if (!std::isfinite(p.m_x) || !std::isfinite(p.m_y)) throw DomainError("SbxParams: parameters must be finite");
  return p;
}

inline LinkBudget validate(const LinkBudget& lb) {
  if (!(lb.gamma_bar > 0.0) || !std::isfinite(lb.gamma_bar)) throw DomainError("LinkBudget: gamma_bar > 0 violated");
  return lb;
}

/// m_x Omega_y / (m_x Omega_y + m_y Omega_x), the shadowing mixing fraction.
inline double mixing_fraction(const SbxParams& p) {
  return p.m_x * p.omega_y / (p.m_x * p.omega_y + p.m_y * p.omega_x);
}

/// Mean-square envelope C = Omega_x (1-w)^m_y 2F1(m_x+1, m_y; m_x; w).
inline double normalization_c(const SbxParams& p, const specfun::EvalControl& ctl = {}) {
  validate(p);
  const double w = mixing_fraction(p);
  const double log_pref = p.m_y * std::log1p(-w);
  return p.omega_x * std::exp(log_pref) * specfun::gauss_2f1(p.m_x + 1.0, p.m_y, p.m_x, w, ctl);
}

struct DerivedConstants {
  double c_norm = 0.0;
  double beta = 0.0;           // m_x C / (gamma_bar Omega_x)
  double w_frac = 0.0;         // mixing fraction
  double z_arg = 0.0;          // beta * w_frac
  double prefactor_log = 0.0;  // m_y ln(1 - w_frac)
};

inline DerivedConstants derive(const SbxParams& p, const LinkBudget& lb, const specfun::EvalControl& ctl = {}) {
  validate(p);
  validate(lb);
  DerivedConstants dc;
  dc.c_norm = normalization_c(p, ctl);
  dc.w_frac = mixing_fraction(p);
  dc.beta = p.m_x * dc.c_norm / (lb.gamma_bar * p.omega_x);
  dc.z_arg = dc.beta * dc.w_frac;
  dc.prefactor_log = p.m_y * std::log1p(-dc.w_frac);
  return dc;
}

/// Density of the SNR-scale variable t = r^2 with rate `beta`, in the log
/// domain. Shared by the envelope and SNR densities.
namespace detail {
inline double log_power_density(const SbxParams& p, double beta, double w, double t,
                                const specfun::EvalControl& ctl) {
  return p.m_y * std::log1p(-w) + p.m_x * std::log(beta) - std::lgamma(p.m_x) + (p.m_x - 1.0) * std::log(t) -
         beta * t + specfun::log_kummer_1f1(p.m_y, p.m_x, beta * w * t, ctl);
}

/// Value at the origin: 0 for m_x > 1, the finite limit for m_x = 1, +inf below.
inline double power_density_at_zero(const SbxParams& p, double beta, double w) {
  if (p.m_x > 1.0) return 0.0;
  if (p.m_x < 1.0) return std::numeric_limits<double>::infinity();
  return std::exp(p.m_y * std::log1p(-w) + std::log(beta));
}
}  // namespace detail

/// Composite envelope density f_R(r).
inline double pdf_envelope(const SbxParams& p, double r, const specfun::EvalControl& ctl = {}) {
  validate(p);
  if (r < 0.0) throw DomainError("pdf_envelope: r >= 0 required");
  const double w = mixing_fraction(p);
  const double beta = p.m_x / p.omega_x;
  // f_R(r) = 2 r f_T(r^2), with the exponent 2 m_x - 1 on r.
  if (r == 0.0) {
    if (2.0 * p.m_x - 1.0 > 0.0) return 0.0;
    return 2.0 * std::exp(p.m_y * std::log1p(-w) + p.m_x * std::log(beta) - std::lgamma(p.m_x));
  }
  return 2.0 * r * std::exp(detail::log_power_density(p, beta, w, r * r, ctl));
}

/// Instantaneous SNR density f_gamma.
inline double pdf_snr(const SbxParams& p, const LinkBudget& lb, double gamma, const specfun::EvalControl& ctl = {}) {
  if (gamma < 0.0) throw DomainError("pdf_snr: gamma >= 0 required");
  validate(p);
  validate(lb);
  const double w = mixing_fraction(p);
  const double beta = p.m_x * normalization_c(p, ctl) / (lb.gamma_bar * p.omega_x);
  if (gamma == 0.0) return detail::power_density_at_zero(p, beta, w);
  return std::exp(detail::log_power_density(p, beta, w, gamma, ctl));
}

/// E[gamma] in closed form; equals gamma_bar since C is the mean-square envelope.
inline double moment1(const SbxParams& p, const LinkBudget& lb, const specfun::EvalControl& ctl = {}) {
  validate(lb);
  const double c = normalization_c(p, ctl);
  const double w = mixing_fraction(p);
  return std::exp(p.m_y * std::log1p(-w)) * (lb.gamma_bar * p.omega_x / c) *
         specfun::gauss_2f1(p.m_y, p.m_x + 1.0, p.m_x, w, ctl);
}

/// E[gamma^2] in closed form.
inline double moment2(const SbxParams& p, const LinkBudget& lb, const specfun::EvalControl& ctl = {}) {
  validate(lb);
  const double c = normalization_c(p, ctl);
  const double w = mixing_fraction(p);
  const double s = lb.gamma_bar * p.omega_x / c;
  return (p.m_x + 1.0) / p.m_x * std::exp(p.m_y * std::log1p(-w)) * s * s *
         specfun::gauss_2f1(p.m_y, p.m_x + 2.0, p.m_x, w, ctl);
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Child seed for shard/point `index` of a run seeded with `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ (0xD1B54A32D192ED03ULL * (index + 1)));
}

/// Random variates with a platform-independent bit stream: only the engine
/// (fully specified by the standard) comes from <random>.
class Variates {
 public:
  explicit Variates(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1).
  double uniform() {
    std::uint64_t bits;
    do {
      bits = engine_() >> 11;
    } while (bits == 0);
    return static_cast<double>(bits) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  /// Gamma(shape, 1), Marsaglia-Tsang squeeze; shape < 1 via the boost
  /// Gamma(shape + 1) * U^(1/shape).
  double gamma(double shape) {
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// Poisson(mean): inversion below 10, Hormann's PTRS transformed rejection above.
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 10.0) {
      const double limit = std::exp(-mean);
      std::uint64_t k = 0;
      double prod = uniform();
      while (prod > limit) {
        ++k;
        prod *= uniform();
      }
      return k;
    }
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::abs(u);
      const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
      if (k < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
          -mean + k * loglam - std::lgamma(k + 1.0))
        return static_cast<std::uint64_t>(k);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace detail

/// Draws SNR realizations. A value type: copy it to fork the stream, give
/// each thread its own instance.
///
/// Y^2 ~ Gamma(m_y, Omega_y / m_y) is the shadowed LOS power. Given y, the
/// envelope power is sigma^2 X with X noncentral chi-square on 2 m_x degrees
/// of freedom and noncentrality y^2 / sigma^2, drawn as the Poisson mixture
/// X = 2 Gamma(m_x + K), K ~ Poisson(y^2 / (2 sigma^2)), sigma^2 = Omega_x / (2 m_x).
class SnrSampler {
 public:
  SnrSampler(const SbxParams& p, const LinkBudget& lb, std::uint64_t seed, const specfun::EvalControl& ctl = {})
      : p_(validate(p)), rng_(seed) {
    validate(lb);
    snr_scale_ = lb.gamma_bar / normalization_c(p, ctl);
  }

  double operator()() {
    const double y2 = rng_.gamma(p_.m_y) * p_.omega_y / p_.m_y;
    const double half_noncentrality = p_.m_x * y2 / p_.omega_x;
    const auto k = rng_.poisson(half_noncentrality);
    const double r2 = p_.omega_x / p_.m_x * rng_.gamma(p_.m_x + static_cast<double>(k));
    return snr_scale_ * r2;
  }

 private:
  SbxParams p_;
  detail::Variates rng_;
  double snr_scale_ = 1.0;
};

inline std::vector<double> sample_snr(const SbxParams& p, const LinkBudget& lb, std::uint64_t seed, std::size_t n) {
  if (n < 1) throw DomainError("sample_snr: n >= 1 required");
  SnrSampler s(p, lb, seed);
  std::vector<double> out(n);
  for (auto& g : out) g = s();
  return out;
}

}  // namespace sbx
