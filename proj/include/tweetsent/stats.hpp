#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "tweetsent/error.hpp"

namespace tweetsent {

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace detail {

// Continued fraction for the incomplete beta function, modified Lentz
// iteration. Converges quickly for x < (a+1)/(a+b+2).
inline double incomplete_beta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double result = d;
  for (int m = 1; m <= 300; ++m) {
    const double dm = static_cast<double>(m);
    // even step
    double numer = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
    d = 1.0 + numer * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + numer / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    result *= d * c;
    // odd step
    numer = -(a + dm) * (a + b + dm) * x / ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
    d = 1.0 + numer * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + numer / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    result *= delta;
    if (std::fabs(delta - 1.0) < eps) break;
  }
  return result;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta_reg(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error("incomplete_beta_reg: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::incomplete_beta_cf(x, a, b) / a;
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                   detail::incomplete_beta_cf(1.0 - x, b, a) / b;
}

// Two-sided p-value for a t statistic: P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
inline double student_t_two_sided_p(double t, double df) {
  if (df <= 0.0) throw Error("student_t_two_sided_p: df must be positive");
  if (t == 0.0) return 1.0;
  const double x = df / (df + t * t);
  return incomplete_beta_reg(x, 0.5 * df, 0.5);
}

struct TTestResult {
  bool applicable = false;  // false when a sample is too small or variance degenerate
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

// Pooled-variance two-sample Student's t-test, df = n_a + n_b - 2.
// Degenerate inputs (sample size < 2, zero pooled variance) yield a
// not-applicable result instead of a crash.
inline TTestResult students_t_test(std::span<const double> a, std::span<const double> b) {
  TTestResult r;
  const std::size_t na = a.size(), nb = b.size();
  if (na < 2 || nb < 2) return r;
  double mean_a = 0.0, mean_b = 0.0;
  for (double v : a) mean_a += v;
  for (double v : b) mean_b += v;
  mean_a /= static_cast<double>(na);
  mean_b /= static_cast<double>(nb);
  double ss = 0.0;
  for (double v : a) ss += (v - mean_a) * (v - mean_a);
  for (double v : b) ss += (v - mean_b) * (v - mean_b);
  const double df = static_cast<double>(na + nb - 2);
  const double pooled_var = ss / df;
  if (!(pooled_var > 0.0)) return r;
  const double se = std::sqrt(pooled_var * (1.0 / static_cast<double>(na) +
                                            1.0 / static_cast<double>(nb)));
  r.applicable = true;
  r.t = (mean_a - mean_b) / se;
  r.df = df;
  r.p = student_t_two_sided_p(r.t, df);
  return r;
}

inline TTestResult students_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  return students_t_test(std::span<const double>(a), std::span<const double>(b));
}

}  // namespace tweetsent
