#pragma once

// Special functions needed by the SBX effective-capacity formulas:
// log-gamma, Pochhammer, Kummer 1F1, Tricomi U and Gauss 2F1.
//
// Everything here is a pure function of its arguments. Hypergeometric series
// are summed with a running log scale so that intermediate terms far beyond
// the double range (Gamma(m_y + d) for large d, for instance) do not overflow.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "sbx/errors.hpp"

namespace sbx::specfun {

/// Work limits for series and quadrature evaluation.
struct EvalControl {
  double rel_tol = 1e-12;
  int max_terms = 10000;
  /// Initial subinterval budget for adaptive quadrature; doubled on
  /// refinement up to kMaxQuadNodes.
  int quad_nodes = 512;

  static constexpr int kMaxQuadNodes = 4096;

  void validate() const {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw DomainError("EvalControl: rel_tol must lie in (0, 1)");
    if (max_terms < 1) throw DomainError("EvalControl: max_terms must be >= 1");
    if (quad_nodes < 1) throw DomainError("EvalControl: quad_nodes must be >= 1");
  }
};

inline double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: x must be > 0");
  return std::lgamma(x);
}

/// Rising factorial a (a+1) ... (a+d-1).
inline double pochhammer(double a, unsigned d) {
  double p = 1.0;
  for (unsigned k = 0; k < d; ++k) p *= a + static_cast<double>(k);
  return p;
}

namespace detail {

inline constexpr double kRescaleAt = 1e290;
inline constexpr double kNonposIntTol = 1e-12;

/// True when x is within kNonposIntTol of 0, -1, -2, ...
inline bool is_nonpositive_integer(double x) {
  const double r = std::round(x);
  return r <= 0.0 && std::abs(x - r) <= kNonposIntTol;
}

inline double snap_nonpositive_integer(double x) { return is_nonpositive_integer(x) ? std::round(x) : x; }

/// A real number stored as sign * exp(log_abs).
struct LogValue {
  double log_abs = 0.0;
  int sign = 1;

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

/// Sums 1 + t1 + t2 + ... where t_{k+1} = t_k * ratio(k). `ratio_limit` is the
/// magnitude the term ratio tends to as k grows; it is used to bound the tail.
template <class Ratio>
LogValue sum_series(Ratio ratio, double ratio_limit, const EvalControl& ctl, const char* what) {
  double sum = 1.0;
  double term = 1.0;
  double log_scale = 0.0;
  auto finish = [&] {
    if (sum == 0.0) return LogValue{-std::numeric_limits<double>::infinity(), 0};
    return LogValue{std::log(std::abs(sum)) + log_scale, sum > 0.0 ? 1 : -1};
  };
  double r = ratio(0);
  for (int k = 0; k < ctl.max_terms; ++k) {
    if (r == 0.0) return finish();  // terminating (polynomial) series
    term *= r;
    sum += term;
    const double big = std::max(std::abs(term), std::abs(sum));
    if (big > kRescaleAt) {
      const double s = std::log(big);
      const double f = std::exp(-s);
      term *= f;
      sum *= f;
      log_scale += s;
    }
    const double r_next = ratio(k + 1);
    const double rn = std::abs(r_next);
    // Once the ratio is below 1 and either falling or still rising towards
    // its limit, every later ratio is at most q.
    if (rn < 1.0 && (rn <= std::abs(r) || rn <= ratio_limit)) {
      const double q = std::max(rn, ratio_limit);
      if (q < 1.0 && std::abs(term) * q / (1.0 - q) <= ctl.rel_tol * std::abs(sum)) return finish();
    }
    r = r_next;
  }
  throw ConvergenceError(std::string(what) + ": series did not converge within max_terms=" +
                         std::to_string(ctl.max_terms));
}

/// Direct Kummer series sum_k (a)_k / (b)_k x^k / k!.
inline LogValue kummer_series(double a, double b, double x, const EvalControl& ctl) {
  return sum_series(
      [=](int k) {
        const double kk = static_cast<double>(k);
        return (a + kk) / (b + kk) * x / (kk + 1.0);
      },
      0.0, ctl, "kummer_1f1");
}

/// Large-argument expansion
///   1F1(a; b; x) ~ Gamma(b)/Gamma(a) e^x x^(a-b) sum_k (b-a)_k (1-a)_k / k! x^-k,
/// for a, b > 0. The omitted term is smaller by a factor e^-x. Empty when
/// the terms start growing before reaching rel_tol.
inline std::optional<LogValue> kummer_asymptotic(double a, double b, double x, const EvalControl& ctl) {
  double sum = 1.0, term = 1.0;
  for (int k = 0; k < ctl.max_terms; ++k) {
    const double kk = static_cast<double>(k);
    const double next = term * (b - a + kk) * (1.0 - a + kk) / ((kk + 1.0) * x);
    if (next == 0.0 || std::abs(next) <= ctl.rel_tol * std::abs(sum)) {
      sum += next;
      if (!(sum > 0.0)) return std::nullopt;
      return LogValue{std::lgamma(b) - std::lgamma(a) + x + (a - b) * std::log(x) + std::log(sum), 1};
    }
    if (std::abs(next) > std::abs(term)) return std::nullopt;
    term = next;
    sum += term;
  }
  return std::nullopt;
}

inline constexpr double kAsymptoticFrom = 700.0;

inline LogValue kummer_log(double a, double b, double x, const EvalControl& ctl) {
  ctl.validate();
  if (is_nonpositive_integer(b)) throw DomainError("kummer_1f1: b must not be a nonpositive integer");
  a = snap_nonpositive_integer(a);
  if (x == 0.0) return {0.0, 1};
  if (x > kAsymptoticFrom && a > 0.0 && b > 0.0)
    if (auto v = kummer_asymptotic(a, b, x, ctl)) return *v;
  if (x > 0.0) return kummer_series(a, b, x, ctl);
  // Kummer transformation keeps the summed series at a positive argument.
  LogValue t = kummer_log(b - a, b, -x, ctl);
  t.log_abs += x;
  return t;
}

// 15-point Gauss-Kronrod rule with its embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo, hi, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {lo, hi, kron * h, std::abs((kron - gauss) * h)};
}

/// Globally adaptive Gauss-Kronrod over consecutive panels given by
/// `breaks`. Stops when the summed error estimate is below rel_tol times the
/// integral. The panel budget starts at ctl.quad_nodes and doubles up to
/// EvalControl::kMaxQuadNodes.
template <class F>
double adaptive_gk15(F f, const std::vector<double>& breaks, const EvalControl& ctl, const char* what) {
  std::priority_queue<Panel> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    Panel p = gk15(f, breaks[i], breaks[i + 1]);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  std::size_t budget = static_cast<std::size_t>(std::max(ctl.quad_nodes, 1));
  const std::size_t cap = std::max<std::size_t>(budget, EvalControl::kMaxQuadNodes);
  double frozen_err = 0.0;  // panels too narrow to split further
  while (!heap.empty()) {
    if (total_err <= ctl.rel_tol * std::abs(total) || total_err <= 1e-300) return total;
    if (heap.size() >= budget) {
      if (budget >= cap) break;
      budget = std::min(budget * 2, cap);
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      frozen_err += worst.error;
      total_err -= worst.error;
      total_err = std::max(total_err, 0.0);
      if (frozen_err > ctl.rel_tol * std::abs(total)) break;
      continue;
    }
    const Panel left = gk15(f, worst.lo, mid);
    const Panel right = gk15(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    total_err = std::max(total_err, 0.0);
    heap.push(left);
    heap.push(right);
  }
  if (total_err <= ctl.rel_tol * std::abs(total)) return total;
  throw ConvergenceError(std::string(what) + ": quadrature did not converge within " + std::to_string(cap) +
                         " panels");
}

/// log of J(a, c, z) = Gamma(a)^-1 * integral_0^inf e^-u u^(a-1) (1 + u/z)^c du,
/// i.e. the mean of (1 + u/z)^c under a unit-scale Gamma(a) variate.
/// Then U(a, b, z) = z^-a * J(a, b - a - 1, z).
inline double log_gamma_weighted_mean(double a, double c, double z, const EvalControl& ctl) {
  const double lga = std::lgamma(a);
  auto log_kernel = [=](double u) { return -u - lga + c * std::log1p(u / z); };

  // Mass of e^-u u^(a-1) (1+u/z)^c sits near u = a - 1 + c (clamped at 0),
  // with spread ~ sqrt(a).
  const double spread = std::sqrt(a + std::abs(c)) + 1.0;
  const double centre = std::max(a - 1.0 + c, 0.0);
  const double lo = std::max(0.0, std::min(a - 1.0, centre) - 40.0 * spread);
  const double hi = std::max(a, centre) + std::max(c, 0.0) + 40.0 * spread + 50.0;

  // Reference level so that the integrand stays O(1) near its peak.
  double ref = -std::numeric_limits<double>::infinity();
  for (double u : {lo, centre, std::min(z, hi), 1.0, a, 0.5 * (lo + hi)}) {
    if (u <= 0.0) continue;
    ref = std::max(ref, log_kernel(u) + (a - 1.0) * std::log(u));
  }
  if (!std::isfinite(ref)) ref = 0.0;

  double total = 0.0;
  double start = lo;
  if (lo == 0.0 && a < 2.0) {
    // u = s^(1/a) on [0, 1] absorbs the u^(a-1) endpoint behaviour.
    const double top = std::min(1.0, hi);
    auto g = [&](double s) {
      if (s <= 0.0) return std::exp(log_kernel(0.0) - ref) / a;
      return std::exp(log_kernel(std::pow(s, 1.0 / a)) - ref) / a;
    };
    std::vector<double> br{0.0};
    const double zs = std::pow(z, a);
    if (z < top) br.push_back(zs * 0.1), br.push_back(zs), br.push_back(std::min(1.0, 10.0 * zs));
    br.push_back(std::pow(top, a));
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    total += adaptive_gk15(g, br, ctl, "tricomi_u");
    start = top;
  }
  if (hi > start) {
    auto f = [&](double u) {
      if (u <= 0.0) return 0.0;
      return std::exp(log_kernel(u) + (a - 1.0) * std::log(u) - ref);
    };
    std::vector<double> br{start};
    for (double p : {0.1 * z, z, 10.0 * z, centre, centre - 5.0 * spread, centre + 5.0 * spread}) {
      if (p > start && p < hi) br.push_back(p);
    }
    br.push_back(hi);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    total += adaptive_gk15(f, br, ctl, "tricomi_u");
  }
  if (!(total > 0.0)) throw ConvergenceError("tricomi_u: integral vanished or underflowed");
  return std::log(total) + ref;
}

}  // namespace detail

/// Kummer confluent hypergeometric 1F1(a; b; x). Negative arguments go
/// through 1F1(a; b; x) = e^x 1F1(b - a; b; -x).
inline double kummer_1f1(double a, double b, double x, const EvalControl& ctl = {}) {
  return detail::kummer_log(a, b, x, ctl).value();
}

/// ln 1F1(a; b; x) for arguments where the function is positive.
/// Accumulates in the log domain, so it stays finite where 1F1 overflows.
inline double log_kummer_1f1(double a, double b, double x, const EvalControl& ctl = {}) {
  const detail::LogValue v = detail::kummer_log(a, b, x, ctl);
  if (v.sign <= 0) throw DomainError("log_kummer_1f1: function value is not positive");
  return v.log_abs;
}

/// ln U(a, b, z) from the integral representation
/// U(a, b, z) = Gamma(a)^-1 int_0^inf e^(-z t) t^(a-1) (1+t)^(b-a-1) dt.
inline double log_tricomi_u(double a, double b, double z, const EvalControl& ctl = {}) {
  ctl.validate();
  if (!(a > 0.0)) throw DomainError("tricomi_u: a must be > 0");
  if (!(z > 0.0)) throw DomainError("tricomi_u: z must be > 0");
  return -a * std::log(z) + detail::log_gamma_weighted_mean(a, b - a - 1.0, z, ctl);
}

inline double tricomi_u(double a, double b, double z, const EvalControl& ctl = {}) {
  return std::exp(log_tricomi_u(a, b, z, ctl));
}

/// Gauss hypergeometric 2F1(a, b; c; w), |w| < 1. Terminates exactly when a
/// or b is a nonpositive integer. Otherwise the Euler transformation
///   2F1(a, b; c; w) = (1-w)^(c-a-b) 2F1(c-a, c-b; c; w)
/// is applied when it terminates the series or lowers a + b, which shortens
/// the series near w = 1.
inline double gauss_2f1(double a, double b, double c, double w, const EvalControl& ctl = {}) {
  ctl.validate();
  if (!(std::abs(w) < 1.0)) throw DomainError("gauss_2f1: requires |w| < 1");
  if (detail::is_nonpositive_integer(c)) throw DomainError("gauss_2f1: c must not be a nonpositive integer");
  a = detail::snap_nonpositive_integer(a);
  b = detail::snap_nonpositive_integer(b);
  if (b < a) std::swap(a, b);
  if (w == 0.0) return 1.0;
  double log_pref = 0.0;
  const bool terminates = detail::is_nonpositive_integer(a) || detail::is_nonpositive_integer(b);
  if (!terminates) {
    const double ea = detail::snap_nonpositive_integer(c - a);
    const double eb = detail::snap_nonpositive_integer(c - b);
    if (detail::is_nonpositive_integer(ea) || detail::is_nonpositive_integer(eb) || ea + eb < a + b) {
      log_pref = (c - a - b) * std::log1p(-w);
      a = std::min(ea, eb);
      b = std::max(ea, eb);
    }
  }
  detail::LogValue v = detail::sum_series(
      [=](int k) {
        const double kk = static_cast<double>(k);
        return (a + kk) * (b + kk) / ((c + kk) * (kk + 1.0)) * w;
      },
      std::abs(w), ctl, "gauss_2f1");
  v.log_abs += log_pref;
  return v.value();
}

}  // namespace sbx::specfun
