#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "urnmix/errors.hpp"
#include "urnmix/logspace.hpp"
#include "urnmix/rational.hpp"

// The two-urn Bernoulli-Laplace chain: n balls per urn, n red + n black in
// total, k balls exchanged both ways each step. State i = number of red
// balls in the right urn.
namespace urnmix::two_urn {

struct TwoUrnParams {
  int n = 1;
  int k = 0;

  TwoUrnParams(int n_, int k_) : n(n_), k(k_) {
    if (n < 1) throw std::domain_error("two_urn: n must be positive");
    if (k < 0 || k > n) throw std::domain_error("two_urn: k out of [0, n]");
  }
};

template <typename T>
struct Kernel {
  int n = 0;
  int k = 0;
  std::vector<T> entries;  // (n+1) x (n+1), row-major

  const T& operator()(int i, int j) const {
    return entries[std::size_t(i) * (n + 1) + std::size_t(j)];
  }
  T& operator()(int i, int j) {
    return entries[std::size_t(i) * (n + 1) + std::size_t(j)];
  }
};

using KernelQ = Kernel<Rational>;
using KernelD = Kernel<double>;

// Exact kernel by convolving the two independent hypergeometric draws:
// x reds leave the right urn, y reds leave the left urn, j = i - x + y.
inline KernelQ kernel(const TwoUrnParams& p) {
  const int n = p.n, k = p.k;
  KernelQ K{n, k, std::vector<Rational>(std::size_t(n + 1) * (n + 1), Rational(0))};
  const Integer cnk = binomial(n, k);
  for (int i = 0; i <= n; ++i) {
    for (int x = std::max(0, k - (n - i)); x <= std::min(k, i); ++x) {
      Rational px(binomial(i, x) * binomial(n - i, long(k) - x), cnk);
      px.canonicalize();
      for (int y = std::max(0, k - i); y <= std::min(k, n - i); ++y) {
        Rational py(binomial(n - i, y) * binomial(i, long(k) - y), cnk);
        py.canonicalize();
        K(i, i - x + y) += px * py;
      }
    }
  }
  for (auto& e : K.entries) e.canonicalize();
  return K;
}

// The same kernel from the explicit two-branch double sum over the moved
// red counts, with its literal summation limits (empty sums give zero).
// Kept separate so the two routes can be asserted equal.
inline KernelQ kernel_sum_formula(const TwoUrnParams& p) {
  const int n = p.n, k = p.k;
  KernelQ K{n, k, std::vector<Rational>(std::size_t(n + 1) * (n + 1), Rational(0))};
  const Integer cnk2 = binomial(n, k) * binomial(n, k);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      Integer num(0);
      if (i <= j) {
        const int hi = std::min(k - (j - i), std::min(n - j, i));
        for (int m = 0; m <= hi; ++m)
          num += binomial(i, m) * binomial(n - i, long(k) - m) *
                 binomial(n - i, long(j) - i + m) *
                 binomial(i, long(k) - (j - i) - m);
      } else {
        const int hi = std::min(k, std::min(n - j, i));
        for (int m = i - j; m <= hi; ++m)
          num += binomial(i, m) * binomial(n - i, long(k) - m) *
                 binomial(n - i, long(m) - (i - j)) *
                 binomial(i, long(k) + (i - j) - m);
      }
      if (num != 0) {
        Rational e(num, cnk2);
        e.canonicalize();
        K(i, j) = e;
      }
    }
  }
  return K;
}

// Float kernel via log-gamma binomials and log-sum-exp; all terms of an
// entry are positive so there is no cancellation.
inline KernelD kernel_float(const TwoUrnParams& p) {
  const int n = p.n, k = p.k;
  KernelD K{n, k, std::vector<double>(std::size_t(n + 1) * (n + 1), 0.0)};
  const double lcnk = log_binomial(n, k);
  std::vector<double> logs;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      logs.clear();
      for (int x = std::max(0, k - (n - i)); x <= std::min(k, i); ++x) {
        const int y = j - i + x;
        if (y < 0 || y > k) continue;
        const double lt = log_binomial(i, x) + log_binomial(n - i, k - x) +
                          log_binomial(n - i, y) + log_binomial(i, k - y) -
                          2.0 * lcnk;
        if (lt != neg_inf) logs.push_back(lt);
      }
      if (!logs.empty()) K(i, j) = std::exp(log_sum_exp(logs));
    }
  }
  return K;
}

// Oracle: exhaustive enumeration of the k-subsets leaving each urn,
// counting subsets by how many reds they contain. No binomial formulas.
inline KernelQ brute_force_kernel(const TwoUrnParams& p) {
  const int n = p.n, k = p.k;
  {
    const Integer total = binomial(n, k) * binomial(n, k);
    if (total > 10'000'000) throw capacity_error("brute_force_kernel: C(n,k)^2 > 1e7");
  }
  // counts[r][x] = number of k-subsets of an urn holding r reds (ids 0..r-1)
  // whose intersection with the reds has size x, found by walking all subsets
  auto enumerate = [&](int reds) {
    std::vector<long> freq(std::size_t(k) + 1, 0);
    if (k == 0) {
      freq[0] = 1;
      return freq;
    }
    std::vector<int> comb(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) comb[std::size_t(t)] = t;
    for (;;) {
      int x = 0;
      for (int v : comb) x += (v < reds) ? 1 : 0;
      ++freq[std::size_t(x)];
      // next lexicographic k-combination of {0..n-1}
      int pos = k - 1;
      while (pos >= 0 && comb[std::size_t(pos)] == n - k + pos) --pos;
      if (pos < 0) break;
      ++comb[std::size_t(pos)];
      for (int t = pos + 1; t < k; ++t) comb[std::size_t(t)] = comb[std::size_t(t) - 1] + 1;
    }
    return freq;
  };

  KernelQ K{n, k, std::vector<Rational>(std::size_t(n + 1) * (n + 1), Rational(0))};
  for (int i = 0; i <= n; ++i) {
    const auto freq_right = enumerate(i);      // reds leaving the right urn
    const auto freq_left = enumerate(n - i);   // reds leaving the left urn
    long total_right = 0, total_left = 0;
    for (long f : freq_right) total_right += f;
    for (long f : freq_left) total_left += f;
    const Integer denom = Integer(total_right) * Integer(total_left);
    for (int x = 0; x <= k; ++x) {
      if (freq_right[std::size_t(x)] == 0) continue;
      for (int y = 0; y <= k; ++y) {
        if (freq_left[std::size_t(y)] == 0) continue;
        const int j = i - x + y;
        Rational e(Integer(freq_right[std::size_t(x)]) * Integer(freq_left[std::size_t(y)]),
                   denom);
        e.canonicalize();
        K(i, j) += e;
      }
    }
  }
  for (auto& e : K.entries) e.canonicalize();
  return K;
}

// pi_n(j) = C(n,j) C(n,n-j) / C(2n,n)
inline std::vector<Rational> stationary(int n) {
  if (n < 1) throw std::domain_error("stationary: n must be positive");
  std::vector<Rational> pi(std::size_t(n) + 1);
  const Integer c2n = binomial(2L * n, n);
  for (int j = 0; j <= n; ++j) {
    pi[std::size_t(j)] = Rational(binomial(n, j) * binomial(n, long(n) - j), c2n);
    pi[std::size_t(j)].canonicalize();
  }
  return pi;
}

inline std::vector<double> stationary_float(int n) {
  if (n < 1) throw std::domain_error("stationary: n must be positive");
  std::vector<double> pi(std::size_t(n) + 1);
  const double lc = log_binomial(2L * n, n);
  for (int j = 0; j <= n; ++j)
    pi[std::size_t(j)] = std::exp(log_binomial(n, j) + log_binomial(n, n - j) - lc);
  return pi;
}

template <typename T>
inline std::vector<T> point_mass(int n, int state) {
  if (state < 0 || state > n) throw std::domain_error("point_mass: state out of range");
  std::vector<T> d(std::size_t(n) + 1, T(0));
  d[std::size_t(state)] = T(1);
  return d;
}

template <typename T>
inline std::vector<T> evolve(std::vector<T> start, const Kernel<T>& K, long t) {
  if (long(start.size()) != K.n + 1)
    throw std::domain_error("evolve: dimension mismatch");
  const int n = K.n;
  std::vector<T> next(std::size_t(n) + 1);
  for (long step = 0; step < t; ++step) {
    for (auto& v : next) v = T(0);
    for (int i = 0; i <= n; ++i) {
      if (start[std::size_t(i)] == T(0)) continue;
      for (int j = 0; j <= n; ++j) next[std::size_t(j)] += start[std::size_t(i)] * K(i, j);
    }
    start.swap(next);
  }
  return start;
}

template <typename T>
inline T tv_distance(std::span<const T> p, std::span<const T> q) {
  if (p.size() != q.size()) throw std::domain_error("tv_distance: length mismatch");
  T acc(0);
  for (std::size_t j = 0; j < p.size(); ++j) {
    T d = p[j] - q[j];
    if (d < T(0)) d = -d;
    acc += d;
  }
  return acc / T(2);
}

template <typename T>
inline T tv_distance(const std::vector<T>& p, const std::vector<T>& q) {
  return tv_distance(std::span<const T>(p), std::span<const T>(q));
}

// Least t with TV(delta_start K^t, pi) < eps. TV to stationarity is
// non-increasing in t, so a linear scan is exact. For k in {0, n} the TV
// from a point start is constant, hence an unreachable eps is detected
// immediately.
inline long mixing_time(const TwoUrnParams& p, double eps, int start) {
  if (eps <= 0.0) throw std::domain_error("mixing_time: eps must be in (0,1)");
  if (start < 0 || start > p.n) throw std::domain_error("mixing_time: bad start");
  if (eps >= 1.0) return 0;
  const auto pi = stationary_float(p.n);
  auto dist = point_mass<double>(p.n, start);
  double tv = tv_distance<double>(dist, pi);
  if (tv < eps) return 0;
  if (p.k == 0 || p.k == p.n)
    throw no_convergence_error("mixing_time: degenerate k, TV is constant at " +
                               std::to_string(tv));
  const KernelD K = kernel_float(p);
  constexpr long kMaxSteps = 1'000'000;
  for (long t = 1; t <= kMaxSteps; ++t) {
    dist = evolve(std::move(dist), K, 1);
    tv = tv_distance<double>(dist, pi);
    if (tv < eps) return t;
  }
  throw no_convergence_error("mixing_time: step cap exceeded");
}

// A_{n-k} = S A_k = A_k S with S the antidiagonal permutation, checked
// entrywise on the exact kernels.
inline bool antidiagonal_conjugation_check(int n, int k) {
  const KernelQ a = kernel(TwoUrnParams(n, k));
  const KernelQ b = kernel(TwoUrnParams(n, n - k));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      if (b(i, j) != a(n - i, j) || b(i, j) != a(i, n - j)) return false;
  return true;
}

inline KernelD to_float(const KernelQ& K) {
  KernelD out{K.n, K.k, std::vector<double>(K.entries.size())};
  for (std::size_t idx = 0; idx < K.entries.size(); ++idx)
    out.entries[idx] = to_double(K.entries[idx]);
  return out;
}

}  // namespace urnmix::two_urn
