#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace urnmix {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

inline double log_binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return neg_inf;
  return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
         std::lgamma(double(n - k) + 1.0);
}

// log(sum exp(x_i)) over nonnegative-weight terms; two-pass max shift.
inline double log_sum_exp(const std::vector<double>& logs) {
  double mx = neg_inf;
  for (double v : logs) mx = std::max(mx, v);
  if (mx == neg_inf) return neg_inf;
  double s = 0.0, comp = 0.0;  // Kahan
  for (double v : logs) {
    double term = std::exp(v - mx);
    double y = term - comp;
    double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return mx + std::log(s);
}

// log(exp(a) - exp(b)) for a > b.
inline double log_diff_exp(double a, double b) {
  if (b == neg_inf) return a;
  return a + std::log1p(-std::exp(b - a));
}

// A real number carried as sign * exp(log_abs).
struct SignedLog {
  int sign = 0;  // -1, 0, +1
  double log_abs = neg_inf;

  static SignedLog from(double v) {
    if (v == 0.0) return {};
    return {v > 0 ? 1 : -1, std::log(std::fabs(v))};
  }
  SignedLog operator*(const SignedLog& o) const {
    if (sign == 0 || o.sign == 0) return {};
    return {sign * o.sign, log_abs + o.log_abs};
  }
  SignedLog pow(long e) const {
    if (sign == 0) return e == 0 ? SignedLog{1, 0.0} : SignedLog{};
    return {(e % 2 == 0) ? 1 : sign, log_abs * double(e)};
  }
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

}  // namespace urnmix
