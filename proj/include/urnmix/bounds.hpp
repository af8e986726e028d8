#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "urnmix/hahn.hpp"
#include "urnmix/rational.hpp"

// Closed-form evaluation of the chain's bounds: the spectral upper bound,
// the near-half-exchange theorem, the path-coupling mixing bound, and the
// second-moment lower bound.
namespace urnmix::bounds {

enum class BoundKind { spectral, theorem1, theorem2, theorem3 };
enum class Meaning { upper_on_tv, upper_on_4tv_squared, lower_on_tv, upper_on_mixing_time };

inline const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::spectral: return "spectral";
    case BoundKind::theorem1: return "theorem1";
    case BoundKind::theorem2: return "theorem2";
    case BoundKind::theorem3: return "theorem3";
  }
  return "?";
}
inline const char* to_string(Meaning m) {
  switch (m) {
    case Meaning::upper_on_tv: return "upper_on_tv";
    case Meaning::upper_on_4tv_squared: return "upper_on_4tv_squared";
    case Meaning::lower_on_tv: return "lower_on_tv";
    case Meaning::upper_on_mixing_time: return "upper_on_mixing_time";
  }
  return "?";
}

struct BoundReport {
  BoundKind kind = BoundKind::spectral;
  Meaning meaning = Meaning::upper_on_4tv_squared;
  double value = 0.0;
  std::vector<std::pair<std::string, double>> inputs;
  std::vector<std::pair<std::string, double>> extras;

  double extra(const std::string& name) const {
    for (auto& [k, v] : extras)
      if (k == name) return v;
    throw std::domain_error("BoundReport: no extra named " + name);
  }
};

enum class Precision { exact, floating };

// sum_{i>=1} d_i beta_i(k)^{2t} s_i(start)^2, an upper bound on
// 4 TV(P_start^{*t}, pi)^2; s_i here is normalised so that the start = 0
// case reduces to sum d_i beta_i^{2t}.
inline BoundReport spectral_upper(int n, int k, long t, int start,
                                  Precision mode = Precision::exact) {
  if (n < 1 || k <= 0 || k >= n) throw std::domain_error("spectral_upper: need 0 < k < n");
  if (t < 1) throw std::domain_error("spectral_upper: t >= 1");
  if (start < 0 || start > n) throw std::domain_error("spectral_upper: bad start");

  double value = 0.0;
  if (mode == Precision::exact) {
    Rational sum(0);
    for (int i = 1; i <= n; ++i) {
      const Rational beta = hahn::eigenvalue(i, k, n);
      if (beta == 0) continue;
      const Rational s = hahn::eigenfunction(i, start, n);
      sum += Rational(hahn::multiplicity(i, n)) * pow_rational(beta, 2 * t) *
             s * s;
    }
    value = to_double(sum);
  } else {
    const auto beta = hahn::eigenvalues_double(k, n);
    const auto sfun = hahn::eigenvalues_double(start, n);  // s_i(start) over i
    std::vector<double> logs;
    for (int i = 1; i <= n; ++i) {
      const double b = std::fabs(beta[std::size_t(i)]);
      const double s = std::fabs(sfun[std::size_t(i)]);
      if (b == 0.0 || s == 0.0) continue;
      logs.push_back(hahn::log_multiplicity(i, n) + 2.0 * double(t) * std::log(b) +
                     2.0 * std::log(s));
    }
    value = logs.empty() ? 0.0 : std::exp(log_sum_exp(logs));
  }

  BoundReport r;
  r.kind = BoundKind::spectral;
  r.meaning = Meaning::upper_on_4tv_squared;
  r.value = value;
  r.inputs = {{"n", double(n)}, {"k", double(k)}, {"t", double(t)}, {"start", double(start)}};
  r.extras = {{"tv_upper", std::min(1.0, std::sqrt(value) / 2.0)}};
  return r;
}

// B pi^2 n^2 (A/n)^{2t-2} with (A, B) = (1, 1/6) at c = 0, (1, 1/3) at
// c = 1, (6^{c-1}, 12) otherwise; bounds 4 TV^2 from the all-left start.
inline BoundReport theorem3_bound(int n, int c, long t) {
  if (n < 2 || n % 2 != 0) throw std::domain_error("theorem3_bound: n must be even");
  if (t < 1) throw std::domain_error("theorem3_bound: t >= 1");
  if (c < 0) throw std::domain_error("theorem3_bound: c >= 0");
  double sixc = 1.0;
  for (int j = 0; j < c; ++j) sixc *= 6.0;
  if (sixc > double(n)) throw std::domain_error("theorem3_bound: c > log_6 n");
  const int k = n / 2 - c;
  if (k < 1) throw std::domain_error("theorem3_bound: k = n/2 - c below 1");

  double A = 1.0, B = 1.0 / 6.0;
  if (c == 1) {
    B = 1.0 / 3.0;
  } else if (c >= 2) {
    A = sixc / 6.0;
    B = 12.0;
  }
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double value =
      B * pi2 * double(n) * double(n) * std::pow(A / double(n), 2.0 * double(t) - 2.0);

  BoundReport r;
  r.kind = BoundKind::theorem3;
  r.meaning = Meaning::upper_on_4tv_squared;
  r.value = value;
  r.inputs = {{"n", double(n)}, {"c", double(c)}, {"k", double(k)}, {"t", double(t)}};
  r.extras = {{"A", A}, {"B", B}, {"tv_upper", std::min(1.0, std::sqrt(value) / 2.0)}};
  return r;
}

// Path-coupling mixing bound. The exact pre-asymptotic form is
// (log n - log eps) / (-log(1 - 2k(n-k)/n^2)); the two asymptotic
// simplifications are reported alongside.
inline BoundReport theorem1_bound(int n, int k, double eps) {
  if (n < 1) throw std::domain_error("theorem1_bound: n must be positive");
  if (k <= 0 || k >= n)
    throw std::domain_error("theorem1_bound: k in {0, n} gives no contraction");
  if (eps <= 0.0 || eps >= 1.0) throw std::domain_error("theorem1_bound: eps in (0,1)");

  const double contraction = 1.0 - 2.0 * double(k) * double(n - k) / (double(n) * n);
  const double exact_form = (std::log(double(n)) - std::log(eps)) / (-std::log(contraction));
  const double log_n_over_eps = std::log(double(n) / eps);
  const double small_k_form = double(n) / (2.0 * k) * log_n_over_eps;
  const double b = double(k) / double(n);
  const double constant_ratio_form = log_n_over_eps / (2.0 * b * (1.0 - b));

  BoundReport r;
  r.kind = BoundKind::theorem1;
  r.meaning = Meaning::upper_on_mixing_time;
  r.value = exact_form;
  r.inputs = {{"n", double(n)}, {"k", double(k)}, {"eps", eps}};
  r.extras = {{"small_k_form", small_k_form},
              {"constant_ratio_form", constant_ratio_form},
              {"contraction", contraction}};
  return r;
}

// Mean and variance of f(Z_t) for f(x) = sqrt(n-1)(1 - 2x/n) under the
// chain started at state 0, from the eigenfunction expansion of f^2.
inline Rational second_moment_mean_sq_exact(int n, int k, long t) {
  // E[f(Z_t)]^2 = (n-1) beta_1^{2t}
  const Rational b1 = hahn::eigenvalue(1, k, n);
  return Rational(n - 1) * pow_rational(b1, 2 * t);
}

inline Rational second_moment_var_exact(int n, int k, long t) {
  const Rational b1 = hahn::eigenvalue(1, k, n);
  const Rational b2 = hahn::eigenvalue(2, k, n);
  const Rational first(n - 1, 2L * n - 1);
  const Rational second = Rational(Integer(n - 1) * Integer(2L * n - 2), Integer(2L * n - 1)) *
                          pow_rational(b2, t);
  const Rational third = Rational(n - 1) * pow_rational(b1, 2 * t);
  Rational v = first + second - third;
  v.canonicalize();
  return v;
}

// Chebyshev lower bound 1 - 1/alpha^2 - Var/(|E| - alpha)^2 on TV at time
// t, clamped to 0 and reported vacuous when |E| <= alpha.
inline BoundReport second_moment_lower(int n, int k, long t, double alpha) {
  if (n < 2) throw std::domain_error("second_moment_lower: n >= 2");
  if (k <= 0 || k >= n) throw std::domain_error("second_moment_lower: need 0 < k < n");
  if (t < 0) throw std::domain_error("second_moment_lower: t >= 0");
  if (alpha <= 0.0) throw std::domain_error("second_moment_lower: alpha > 0");

  const double b1 = to_double(hahn::eigenvalue(1, k, n));
  const double mag = std::sqrt(double(n - 1)) * std::pow(std::fabs(b1), double(t));
  const double mean = (b1 < 0.0 && t % 2 == 1) ? -mag : mag;
  const double var = to_double(second_moment_var_exact(n, k, t));

  double value = 0.0;
  bool vacuous = true;
  if (std::fabs(mean) > alpha) {
    vacuous = false;
    const double gap = std::fabs(mean) - alpha;
    value = std::max(0.0, 1.0 - 1.0 / (alpha * alpha) - var / (gap * gap));
  }

  BoundReport r;
  r.kind = BoundKind::theorem2;
  r.meaning = Meaning::lower_on_tv;
  r.value = value;
  r.inputs = {{"n", double(n)}, {"k", double(k)}, {"t", double(t)}, {"alpha", alpha}};
  r.extras = {{"mean", mean}, {"variance", var}, {"vacuous", vacuous ? 1.0 : 0.0}};
  return r;
}

// the canonical window choice alpha = |E|/2
inline BoundReport second_moment_lower_default_alpha(int n, int k, long t) {
  const double b1 = to_double(hahn::eigenvalue(1, k, n));
  const double mean = std::sqrt(double(n - 1)) * std::pow(std::fabs(b1), double(t));
  const double alpha = mean / 2.0;
  if (alpha <= 0.0) {
    BoundReport r;
    r.kind = BoundKind::theorem2;
    r.meaning = Meaning::lower_on_tv;
    r.value = 0.0;
    r.inputs = {{"n", double(n)}, {"k", double(k)}, {"t", double(t)}, {"alpha", alpha}};
    r.extras = {{"mean", mean}, {"variance", 0.0}, {"vacuous", 1.0}};
    return r;
  }
  return second_moment_lower(n, k, t, alpha);
}

// f_1^2 = (1/(2n-1)) f_0 + ((2n-2)/(2n-1)) f_2, exactly, at every state
inline bool eigenfunction_square_identity_check(int n) {
  if (n < 2) throw std::domain_error("eigenfunction_square_identity_check: n >= 2");
  const Rational w0(1, 2L * n - 1);
  const Rational w2(2L * n - 2, 2L * n - 1);
  for (int x = 0; x <= n; ++x) {
    const Rational f1 = hahn::eigenfunction(1, x, n);
    const Rational f2 = hahn::eigenfunction(2, x, n);
    if (f1 * f1 != w0 + w2 * f2) return false;
  }
  return true;
}

}  // namespace urnmix::bounds
