#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "urnmix/rational.hpp"
#include "urnmix/rng.hpp"
#include "urnmix/stats.hpp"

// Coupling simulators: the lazy cycle-walk pair, the adjacent-state label
// coupling of the two-urn chain, and the ball-pairing coupling on 2p urns.
namespace urnmix::coupling {

// d(i, j) = sin(|i-j| pi/2y) / sin(pi/2y), shorter-arc distance
inline double cycle_metric(long i, long j, long y) {
  if (y < 1) throw std::domain_error("cycle_metric: y >= 1");
  const long m = 2 * y;
  long d = (i - j) % m;
  if (d < 0) d += m;
  d = std::min(d, m - d);
  return std::sin(double(d) * std::numbers::pi / double(m)) /
         std::sin(std::numbers::pi / double(m));
}

struct TraceRow {
  long t = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double uncoupled_fraction = 0.0;
};

struct TraceRecord {
  std::vector<TraceRow> rows;
  std::uint64_t seed = 0;
  long trials = 0;
  double decay_ratio = 0.0;     // pooled per-step ratio of mean distance
  double decay_ratio_se = 0.0;
};

namespace detail {

struct TraceAcc {
  std::vector<double> sum_d, sum_d2;
  std::vector<long> uncoupled;
  // per-trial ratio aggregates a = sum_t d_{t+1}, b = sum_t d_t
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;

  explicit TraceAcc(std::size_t steps)
      : sum_d(steps, 0.0), sum_d2(steps, 0.0), uncoupled(steps, 0) {}

  void add_path(const std::vector<double>& d_path, const std::vector<bool>& unc) {
    double a = 0, b = 0;
    for (std::size_t s = 0; s < d_path.size(); ++s) {
      sum_d[s] += d_path[s];
      sum_d2[s] += d_path[s] * d_path[s];
      uncoupled[s] += unc[s] ? 1 : 0;
      if (s + 1 < d_path.size()) {
        a += d_path[s + 1];
        b += d_path[s];
      }
    }
    sa += a;
    sb += b;
    saa += a * a;
    sbb += b * b;
    sab += a * b;
  }

  void merge_into(TraceAcc& tot) const {
    for (std::size_t s = 0; s < sum_d.size(); ++s) {
      tot.sum_d[s] += sum_d[s];
      tot.sum_d2[s] += sum_d2[s];
      tot.uncoupled[s] += uncoupled[s];
    }
    tot.sa += sa;
    tot.sb += sb;
    tot.saa += saa;
    tot.sbb += sbb;
    tot.sab += sab;
  }

  TraceRecord finish(long trials, std::uint64_t seed) const {
    TraceRecord rec;
    rec.seed = seed;
    rec.trials = trials;
    rec.rows.reserve(sum_d.size());
    for (std::size_t s = 0; s < sum_d.size(); ++s) {
      const auto ms = mean_se(sum_d[s], sum_d2[s], trials);
      rec.rows.push_back({long(s), ms.mean, ms.se,
                          double(uncoupled[s]) / double(trials)});
    }
    const auto ratio = ratio_estimate(sa, sb, saa, sbb, sab, trials);
    rec.decay_ratio = ratio.ratio;
    rec.decay_ratio_se = ratio.se;
    return rec;
  }
};

}  // namespace detail

struct CyclePairResult {
  TraceRecord trace;
  // conditional on X_t != Y_t: shorter-arc |X-Y| and metric distance
  std::vector<double> cond_arc_mean, cond_arc_se;
  std::vector<double> cond_d_mean, cond_d_se;
};

// Two lazy walkers on a cycle of length 2y started at opposite vertices.
// While apart, exactly one of the two moves each step (so their gap walks
// +-1 with probability 1/2 each); once met they move together, lazily,
// and never separate. Each walker alone is the lazy walk.
inline CyclePairResult simulate_cycle_pair(long y, long t_max, long trials,
                                           std::uint64_t seed, int threads = 1) {
  if (y < 1 || t_max < 1 || trials < 1)
    throw std::domain_error("simulate_cycle_pair: bad arguments");
  const long m = 2 * y;
  const std::size_t steps = std::size_t(t_max) + 1;

  struct Acc : detail::TraceAcc {
    std::vector<double> carc, carc2, cd, cd2;
    std::vector<long> cnt;
    explicit Acc(std::size_t s)
        : detail::TraceAcc(s), carc(s, 0), carc2(s, 0), cd(s, 0), cd2(s, 0), cnt(s, 0) {}
  };

  Acc total(steps);
  auto per_trial = [&](long trial, Acc& acc) {
    Rng rng(trial_seed(seed, trial));
    long x = 0, yy = y;
    std::vector<double> d_path(steps);
    std::vector<bool> unc(steps);
    std::vector<double> arcs(steps, -1.0);
    for (std::size_t s = 0; s < steps; ++s) {
      const double d = cycle_metric(x, yy, y);
      d_path[s] = d;
      unc[s] = (x != yy);
      if (x != yy) {
        long arc = (x - yy) % m;
        if (arc < 0) arc += m;
        arcs[s] = double(std::min(arc, m - arc));
      }
      if (s + 1 == steps) break;
      const std::uint64_t r = rng.next();
      if (x == yy) {
        // matched: move together, lazy +-1
        const std::uint64_t v = r & 3;  // 2 bits: 0 left, 1 right, 2|3 hold
        if (v == 0) { --x; --yy; }
        else if (v == 1) { ++x; ++yy; }
      } else {
        // one chain moves, the other holds
        const bool move_x = (r & 1);
        const bool step_right = (r & 2);
        long& w = move_x ? x : yy;
        w += step_right ? 1 : -1;
      }
      x = ((x % m) + m) % m;
      yy = ((yy % m) + m) % m;
    }
    acc.add_path(d_path, unc);
    for (std::size_t s = 0; s < steps; ++s) {
      if (arcs[s] >= 0.0) {
        acc.carc[s] += arcs[s];
        acc.carc2[s] += arcs[s] * arcs[s];
        acc.cd[s] += d_path[s];
        acc.cd2[s] += d_path[s] * d_path[s];
        acc.cnt[s] += 1;
      }
    }
  };
  run_trials_chunked<Acc>(
      trials, threads, [&] { return Acc(steps); }, per_trial,
      [&](const Acc& a) {
        a.merge_into(total);
        for (std::size_t s = 0; s < steps; ++s) {
          total.carc[s] += a.carc[s];
          total.carc2[s] += a.carc2[s];
          total.cd[s] += a.cd[s];
          total.cd2[s] += a.cd2[s];
          total.cnt[s] += a.cnt[s];
        }
      });

  CyclePairResult res;
  res.trace = total.finish(trials, seed);
  res.cond_arc_mean.resize(steps);
  res.cond_arc_se.resize(steps);
  res.cond_d_mean.resize(steps);
  res.cond_d_se.resize(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    const auto a = mean_se(total.carc[s], total.carc2[s], total.cnt[s]);
    const auto d = mean_se(total.cd[s], total.cd2[s], total.cnt[s]);
    res.cond_arc_mean[s] = a.mean;
    res.cond_arc_se[s] = a.se;
    res.cond_d_mean[s] = d.mean;
    res.cond_d_se[s] = d.se;
  }
  return res;
}

struct AdjacentContractionResult {
  double mc_mean = 0.0;
  double mc_se = 0.0;
  Rational exact{0};
  long trials = 0;
  std::uint64_t seed = 0;
};

// Two two-urn chains in adjacent states under the shared-label coupling.
// One step; reports the expected distance afterwards, which contracts by
// exactly 1 - 2k(n-k)/n^2.
inline AdjacentContractionResult adjacent_contraction(int n, int k, long trials,
                                                      std::uint64_t seed,
                                                      int threads = 1) {
  if (n < 1 || k < 0 || k > n) throw std::domain_error("adjacent_contraction: bad n, k");
  if (trials < 1) throw std::domain_error("adjacent_contraction: trials >= 1");

  AdjacentContractionResult res;
  Rational move_both(Integer(2L * k) * Integer(n - k), Integer(long(n)) * Integer(long(n)));
  move_both.canonicalize();
  res.exact = Rational(1) - move_both;
  res.trials = trials;
  res.seed = seed;

  // chains differ in one label in each urn: the left-urn mismatch is label
  // a+1 and the right-urn one is 2n-a (lower labels are red in both urns)
  const int a = (n - 1) / 2;
  struct Acc { double sum = 0, sum2 = 0; };
  Acc total;
  auto per_trial = [&](long trial, Acc& acc) {
    Rng rng(trial_seed(seed, trial));
    std::vector<int> left(static_cast<std::size_t>(n));
    std::vector<int> right(static_cast<std::size_t>(n));
    std::iota(left.begin(), left.end(), 1);
    std::iota(right.begin(), right.end(), n + 1);
    // partial Fisher-Yates: first k entries become the moved subsets A, B
    for (int t = 0; t < k; ++t) {
      std::swap(left[std::size_t(t)],
                left[std::size_t(t) + rng.below(std::uint64_t(n - t))]);
      std::swap(right[std::size_t(t)],
                right[std::size_t(t) + rng.below(std::uint64_t(n - t))]);
    }
    int c = 1;
    for (int t = 0; t < k; ++t) {
      if (left[std::size_t(t)] == a + 1) --c;       // mismatched pair left -> right
      if (right[std::size_t(t)] == 2 * n - a) --c;  // mismatched pair right -> left
    }
    const double dist = std::abs(c);
    acc.sum += dist;
    acc.sum2 += dist * dist;
  };
  run_trials_chunked<Acc>(
      trials, threads, [] { return Acc{}; }, per_trial,
      [&](const Acc& a2) {
        total.sum += a2.sum;
        total.sum2 += a2.sum2;
      });
  const auto ms = mean_se(total.sum, total.sum2, trials);
  res.mc_mean = ms.mean;
  res.mc_se = ms.se;
  return res;
}

struct KSpec {
  // fixed k, or a two-point mixture {k, k_alt} with probability 1/2 each
  int k = 1;
  int k_alt = -1;  // < 0 means fixed
  bool mixture() const { return k_alt >= 0; }
};

// Two coupled copies of the 2p-urn cycle chain (ball labels 0..2np-1).
// Before every step the chains are re-paired: a label sitting in the same
// urn in both chains pairs with itself; leftover balls pair in ascending
// label order urn by urn. A step draws a uniform k-subset per urn in chain
// A and moves each chosen ball together with its partner in chain B.
struct CoupledUrnChains {
  int p2 = 2;
  int n = 1;
  std::vector<int> urn_a, urn_b;  // label -> urn

  // chain B is chain A rotated by p urns: every ball starts at maximal
  // cycle distance
  static CoupledUrnChains worst_start(int p, int n) {
    if (p < 1 || n < 1) throw std::domain_error("CoupledUrnChains: bad p, n");
    CoupledUrnChains s;
    s.p2 = 2 * p;
    s.n = n;
    const long nballs = long(s.p2) * n;
    s.urn_a.resize(std::size_t(nballs));
    s.urn_b.resize(std::size_t(nballs));
    for (long l = 0; l < nballs; ++l) {
      s.urn_a[std::size_t(l)] = int(l / n);
      s.urn_b[std::size_t(l)] = int((l / n + p) % s.p2);
    }
    return s;
  }

  long ball_count() const { return long(urn_a.size()); }

  long matched_count() const {
    long m = 0;
    for (std::size_t l = 0; l < urn_a.size(); ++l)
      if (urn_a[l] == urn_b[l]) ++m;
    return m;
  }

  double distance(const std::vector<double>& dist_by_arc) const {
    double dsum = 0.0;
    for (std::size_t l = 0; l < urn_a.size(); ++l) {
      int arc = urn_a[l] - urn_b[l];
      arc = ((arc % p2) + p2) % p2;
      arc = std::min(arc, p2 - arc);
      dsum += dist_by_arc[std::size_t(arc)];
    }
    return dsum;
  }

  // one coupled step; fills `movers_b` (when given) with the label lists
  // chain B moved out of each urn, so the B-marginal can be tested
  void step(int k, Rng& rng, std::vector<std::vector<int>>* movers_b = nullptr) {
    const long nballs = ball_count();
    std::vector<std::vector<int>> in_urn_a(static_cast<std::size_t>(p2));
    std::vector<std::vector<int>> unmatched_a(static_cast<std::size_t>(p2));
    std::vector<std::vector<int>> unmatched_b(static_cast<std::size_t>(p2));
    std::vector<int> partner(static_cast<std::size_t>(nballs));
    for (long l = 0; l < nballs; ++l) {
      in_urn_a[std::size_t(urn_a[std::size_t(l)])].push_back(int(l));
      if (urn_a[std::size_t(l)] == urn_b[std::size_t(l)]) {
        partner[std::size_t(l)] = int(l);
      } else {
        unmatched_a[std::size_t(urn_a[std::size_t(l)])].push_back(int(l));
        unmatched_b[std::size_t(urn_b[std::size_t(l)])].push_back(int(l));
      }
    }
    for (int u = 0; u < p2; ++u)
      for (std::size_t q = 0; q < unmatched_a[std::size_t(u)].size(); ++q)
        partner[std::size_t(unmatched_a[std::size_t(u)][q])] = unmatched_b[std::size_t(u)][q];

    if (movers_b) movers_b->assign(std::size_t(p2), {});
    std::vector<int> chosen;
    chosen.reserve(std::size_t(k) * std::size_t(p2));
    for (int u = 0; u < p2; ++u) {
      auto& pool = in_urn_a[std::size_t(u)];
      for (int t = 0; t < k; ++t) {
        const std::size_t pick = std::size_t(t) + rng.below(std::uint64_t(n - t));
        std::swap(pool[std::size_t(t)], pool[pick]);
        chosen.push_back(pool[std::size_t(t)]);
      }
    }
    for (int l : chosen) {
      const int pb = partner[std::size_t(l)];
      if (movers_b) (*movers_b)[std::size_t(urn_b[std::size_t(pb)])].push_back(pb);
      urn_a[std::size_t(l)] = (urn_a[std::size_t(l)] + 1) % p2;
      urn_b[std::size_t(pb)] = (urn_b[std::size_t(pb)] + 1) % p2;
    }
  }
};

struct UrnCycleResult {
  TraceRecord trace;
  bool matches_monotone = true;  // per-trial matched count never decreased
};

// Ball-pairing coupling on 2p urns of n balls from the rotated
// maximal-distance start.
inline UrnCycleResult simulate_urn_cycle_coupling(int p, int n, KSpec kspec,
                                                  long t_max, long trials,
                                                  std::uint64_t seed,
                                                  int threads = 1) {
  if (p < 1 || n < 1 || t_max < 1 || trials < 1)
    throw std::domain_error("simulate_urn_cycle_coupling: bad arguments");
  for (int kk : {kspec.k, kspec.mixture() ? kspec.k_alt : kspec.k}) {
    if (kk < 1 || kk > n) throw std::domain_error("simulate_urn_cycle_coupling: k out of [1, n]");
    if (2 * kk > n)
      throw std::domain_error("simulate_urn_cycle_coupling: coupling analysis needs k <= n/2");
  }
  const int p2 = 2 * p;
  const std::size_t steps = std::size_t(t_max) + 1;
  const double sin0 = std::sin(std::numbers::pi / double(p2));
  std::vector<double> dist_by_arc(std::size_t(p) + 1);
  for (int a = 0; a <= p; ++a)
    dist_by_arc[std::size_t(a)] =
        std::sin(double(a) * std::numbers::pi / double(p2)) / sin0;

  struct Acc : detail::TraceAcc {
    bool monotone = true;
    explicit Acc(std::size_t s) : detail::TraceAcc(s) {}
  };

  Acc total(steps);
  auto per_trial = [&](long trial, Acc& acc) {
    Rng rng(trial_seed(seed, trial));
    auto chains = CoupledUrnChains::worst_start(p, n);
    const long nballs = chains.ball_count();
    std::vector<double> d_path(steps);
    std::vector<bool> unc(steps);
    long prev_matched = -1;
    bool monotone = true;
    for (std::size_t s = 0; s < steps; ++s) {
      d_path[s] = chains.distance(dist_by_arc);
      const long matched = chains.matched_count();
      unc[s] = (matched != nballs);
      if (prev_matched >= 0 && matched < prev_matched) monotone = false;
      prev_matched = matched;
      if (s + 1 == steps) break;
      int kcur = kspec.k;
      if (kspec.mixture() && rng.bernoulli_half()) kcur = kspec.k_alt;
      chains.step(kcur, rng);
    }
    acc.add_path(d_path, unc);
    if (!monotone) acc.monotone = false;
  };

  run_trials_chunked<Acc>(
      trials, threads, [&] { return Acc(steps); }, per_trial,
      [&](const Acc& a) {
        a.merge_into(total);
        if (!a.monotone) total.monotone = false;
      });

  UrnCycleResult res;
  res.trace = total.finish(trials, seed);
  res.matches_monotone = total.monotone;
  return res;
}

struct Theorem4aBound {
  double sharp = 0.0;       // 4 n^2 p^2 / (pi^2 k (n-k)) * (log(16 n p) + c)
  double simplified = 0.0;  // 8 n p^2 / (pi^2 k) * (log(16 n p) + c)
};

inline Theorem4aBound theorem4a_bound(int n, int p, int k, double c) {
  if (n < 1 || p < 1 || k < 1 || 2 * k > n)
    throw std::domain_error("theorem4a_bound: need 1 <= k <= n/2");
  if (c < 0.0) throw std::domain_error("theorem4a_bound: c >= 0");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double lg = std::log(16.0 * double(n) * double(p)) + c;
  Theorem4aBound b;
  b.sharp = 4.0 * double(n) * n * double(p) * p / (pi2 * double(k) * double(n - k)) * lg;
  b.simplified = 8.0 * double(n) * double(p) * p / (pi2 * double(k)) * lg;
  return b;
}

// per-step contraction factor of E[D] for the 2p-urn coupling
inline double urn_cycle_decay_factor(int p, int n, int k) {
  const double kn = double(k) / double(n);
  return kn * kn + (1.0 - kn) * (1.0 - kn) +
         2.0 * kn * (1.0 - kn) * std::cos(std::numbers::pi / (2.0 * double(p)));
}

}  // namespace urnmix::coupling
