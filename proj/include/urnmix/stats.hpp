#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace urnmix {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// mean and standard error from sum / sum-of-squares over n samples
inline MeanSe mean_se(double sum, double sumsq, long n) {
  if (n <= 0) return {};
  const double m = sum / double(n);
  if (n == 1) return {m, 0.0};
  double var = (sumsq - double(n) * m * m) / double(n - 1);
  var = std::max(0.0, var);
  return {m, std::sqrt(var / double(n))};
}

// Ratio estimator rho = sum(a)/sum(b) over i.i.d. per-trial pairs, with
// delta-method standard error from Var(a - rho b).
struct RatioEstimate {
  double ratio = 0.0;
  double se = 0.0;
};

inline RatioEstimate ratio_estimate(double sum_a, double sum_b, double sum_aa,
                                    double sum_bb, double sum_ab, long n) {
  RatioEstimate r;
  if (n <= 1 || sum_b == 0.0) return r;
  const double rho = sum_a / sum_b;
  const double mean_b = sum_b / double(n);
  // sum of (a - rho b)^2 = sum aa - 2 rho sum ab + rho^2 sum bb; residual mean is 0
  double ss = sum_aa - 2.0 * rho * sum_ab + rho * rho * sum_bb;
  ss = std::max(0.0, ss);
  r.ratio = rho;
  r.se = std::sqrt(ss / double(n - 1) / double(n)) / std::fabs(mean_b);
  return r;
}

// ---- regularized incomplete gamma, for the chi-square tail ----

namespace detail {

inline double gamma_p_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// P(a, x): lower regularized incomplete gamma
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_contfrac(a, x);
}

inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

// chi-square survival function
inline double chi_square_pvalue(double stat, double dof) {
  if (dof <= 0.0) return 1.0;
  return gamma_q(dof / 2.0, stat / 2.0);
}

struct ChiSquareReport {
  double statistic = 0.0;
  long dof = 0;
  double p_value = 1.0;
  long trials = 0;
  std::uint64_t seed = 0;
  long cells = 0;         // cells used after pooling
  long pooled_cells = 0;  // original cells merged into the pooled bucket
  bool pass(double significance) const { return p_value >= significance; }
};

// Pearson chi-square of observed counts against expected probabilities.
// Cells with expected count < min_expected are pooled (ascending expected
// order) into a single bucket; pooling order is deterministic.
inline ChiSquareReport chi_square_test(const std::vector<long>& observed,
                                       const std::vector<double>& expected_probs,
                                       double min_expected = 5.0) {
  if (observed.size() != expected_probs.size())
    throw std::domain_error("chi_square_test: size mismatch");
  const long n = std::accumulate(observed.begin(), observed.end(), 0L);
  ChiSquareReport rep;
  rep.trials = n;
  if (n == 0) return rep;

  std::vector<std::size_t> order(observed.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return expected_probs[a] < expected_probs[b];
  });

  double pool_exp = 0.0;
  long pool_obs = 0;
  std::vector<std::pair<long, double>> cells;  // observed, expected count
  std::size_t idx = 0;
  while (idx < order.size()) {
    const double e = expected_probs[order[idx]] * double(n);
    const bool under = e < min_expected;
    const bool pool_open = pool_exp > 0.0 && pool_exp < min_expected;
    if (!under && !pool_open) break;
    pool_exp += e;
    pool_obs += observed[order[idx]];
    ++idx;
  }
  rep.pooled_cells = long(idx);
  if (pool_exp == 0.0 && pool_obs > 0) {
    // observed mass on impossible states
    rep.statistic = std::numeric_limits<double>::infinity();
    rep.cells = 1;
    rep.dof = 1;
    rep.p_value = 0.0;
    return rep;
  }
  if (pool_exp > 0.0) cells.emplace_back(pool_obs, pool_exp);
  for (; idx < order.size(); ++idx)
    cells.emplace_back(observed[order[idx]], expected_probs[order[idx]] * double(n));

  double stat = 0.0;
  for (auto& [obs, exp] : cells) {
    if (exp <= 0.0) {
      if (obs != 0) stat = std::numeric_limits<double>::infinity();
      continue;
    }
    const double d = double(obs) - exp;
    stat += d * d / exp;
  }
  rep.statistic = stat;
  rep.cells = long(cells.size());
  rep.dof = std::max(1L, long(cells.size()) - 1);
  rep.p_value = std::isinf(stat) ? 0.0 : chi_square_pvalue(stat, double(rep.dof));
  return rep;
}

}  // namespace urnmix
