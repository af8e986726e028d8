#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "urnmix/errors.hpp"
#include "urnmix/rational.hpp"
#include "urnmix/rng.hpp"
#include "urnmix/stats.hpp"
#include "urnmix/two_urn.hpp"

// The 2p-urn cycle chain: k balls move from every urn to the next each
// step. Full-state Monte Carlo, an exact kernel over the tracked-color
// projection, the single-card marginal walk, and the literal deck-shuffle
// oracle.
namespace urnmix::multi_urn {

struct UrnCycleState {
  int p = 1;  // 2p urns
  int n = 1;  // balls per urn
  // counts[u][c] = number of color-c balls in urn u; colors are the 2p
  // original urns, so rows and columns both sum to n
  std::vector<std::vector<int>> counts;

  static UrnCycleState initial(int p, int n) {
    if (p < 1 || n < 1) throw std::domain_error("UrnCycleState: bad p, n");
    UrnCycleState s;
    s.p = p;
    s.n = n;
    s.counts.assign(std::size_t(2 * p), std::vector<int>(std::size_t(2 * p), 0));
    for (int u = 0; u < 2 * p; ++u) s.counts[std::size_t(u)][std::size_t(u)] = n;
    return s;
  }

  bool conserved() const {
    const int p2 = 2 * p;
    for (int u = 0; u < p2; ++u) {
      int row = 0, col = 0;
      for (int c = 0; c < p2; ++c) {
        row += counts[std::size_t(u)][std::size_t(c)];
        col += counts[std::size_t(c)][std::size_t(u)];
        if (counts[std::size_t(u)][std::size_t(c)] < 0) return false;
      }
      if (row != n || col != n) return false;
    }
    return true;
  }
};

// One step: every urn simultaneously sends a uniform k-subset of its balls
// to the next urn. The movers' color split is sampled by a partial
// Fisher-Yates pass over an index pool expanded from the counts.
inline UrnCycleState step(UrnCycleState s, int k, Rng& rng) {
  const int p2 = 2 * s.p;
  if (k < 0 || k > s.n) throw std::domain_error("step: k out of [0, n]");
  std::vector<std::vector<int>> movers(std::size_t(p2), std::vector<int>(std::size_t(p2), 0));
  std::vector<int> pool;
  pool.reserve(std::size_t(s.n));
  for (int u = 0; u < p2; ++u) {
    pool.clear();
    for (int c = 0; c < p2; ++c)
      pool.insert(pool.end(), std::size_t(s.counts[std::size_t(u)][std::size_t(c)]), c);
    for (int t = 0; t < k; ++t) {
      const std::size_t pick = std::size_t(t) + rng.below(std::uint64_t(s.n - t));
      std::swap(pool[std::size_t(t)], pool[pick]);
      ++movers[std::size_t(u)][std::size_t(pool[std::size_t(t)])];
    }
  }
  for (int u = 0; u < p2; ++u) {
    const int v = (u + 1) % p2;
    for (int c = 0; c < p2; ++c) {
      s.counts[std::size_t(u)][std::size_t(c)] -= movers[std::size_t(u)][std::size_t(c)];
      s.counts[std::size_t(v)][std::size_t(c)] += movers[std::size_t(u)][std::size_t(c)];
    }
  }
  return s;
}

// ---- exact kernel over the tracked-color projection ----
//
// States are the per-urn counts (x_0, ..., x_{2p-1}) of color 0, sum n.
// For p = 1 with the natural two colors this is the whole chain and must
// reproduce two_urn::kernel.

struct CycleOracle {
  int p = 1, n = 1, k = 0;
  std::vector<std::vector<int>> states;
  std::map<std::vector<int>, int> index;
  std::vector<Rational> kernel;  // S x S row-major
  std::vector<Rational> stationary_candidate;

  const Rational& K(int a, int b) const {
    return kernel[std::size_t(a) * states.size() + std::size_t(b)];
  }
  int state_count() const { return int(states.size()); }
};

namespace detail {

inline void enumerate_compositions(int parts, int total,
                                   std::vector<int>& cur,
                                   std::vector<std::vector<int>>& out) {
  if (int(cur.size()) == parts - 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= total; ++v) {
    cur.push_back(v);
    enumerate_compositions(parts, total - v, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

inline CycleOracle exact_small_oracle(int p, int n, int k) {
  if (p < 1 || n < 1) throw std::domain_error("exact_small_oracle: bad p, n");
  if (k < 0 || k > n) throw std::domain_error("exact_small_oracle: k out of [0, n]");
  const int p2 = 2 * p;
  const Integer nstates_z = binomial(long(n) + p2 - 1, p2 - 1);
  if (nstates_z > 100000) throw capacity_error("exact_small_oracle: more than 1e5 states");

  CycleOracle orc;
  orc.p = p;
  orc.n = n;
  orc.k = k;
  {
    std::vector<int> cur;
    detail::enumerate_compositions(p2, n, cur, orc.states);
  }
  for (int a = 0; a < int(orc.states.size()); ++a) orc.index[orc.states[std::size_t(a)]] = a;
  const std::size_t S = orc.states.size();
  orc.kernel.assign(S * S, Rational(0));

  const Integer cnk = binomial(n, k);
  // per-urn distribution of how many tracked balls are among the k movers
  for (std::size_t a = 0; a < S; ++a) {
    const auto& x = orc.states[a];
    // iterate the product of per-urn hypergeometric supports
    std::vector<int> lo(static_cast<std::size_t>(p2));
    std::vector<int> hi(static_cast<std::size_t>(p2));
    std::vector<int> h(static_cast<std::size_t>(p2));
    for (int u = 0; u < p2; ++u) {
      lo[std::size_t(u)] = std::max(0, k - (n - x[std::size_t(u)]));
      hi[std::size_t(u)] = std::min(k, x[std::size_t(u)]);
      h[std::size_t(u)] = lo[std::size_t(u)];
    }
    std::vector<int> y(static_cast<std::size_t>(p2));
    for (;;) {
      Integer wnum(1);
      for (int u = 0; u < p2; ++u)
        wnum *= binomial(x[std::size_t(u)], h[std::size_t(u)]) *
                binomial(n - x[std::size_t(u)], long(k) - h[std::size_t(u)]);
      for (int u = 0; u < p2; ++u)
        y[std::size_t(u)] = x[std::size_t(u)] - h[std::size_t(u)] +
                            h[std::size_t((u + p2 - 1) % p2)];
      Rational w(wnum, 1);
      for (int u = 0; u < p2; ++u) w /= Rational(cnk);
      w.canonicalize();
      orc.kernel[a * S + std::size_t(orc.index.at(y))] += w;
      // advance the mixed-radix counter
      int u = 0;
      while (u < p2) {
        if (h[std::size_t(u)] < hi[std::size_t(u)]) {
          ++h[std::size_t(u)];
          break;
        }
        h[std::size_t(u)] = lo[std::size_t(u)];
        ++u;
      }
      if (u == p2) break;
    }
  }
  for (auto& e : orc.kernel) e.canonicalize();

  // product-hypergeometric candidate: prod_u C(n, x_u) / C(2pn, n)
  const Integer ctot = binomial(long(p2) * n, n);
  orc.stationary_candidate.resize(S);
  for (std::size_t a = 0; a < S; ++a) {
    Integer num(1);
    for (int u = 0; u < p2; ++u) num *= binomial(n, orc.states[a][std::size_t(u)]);
    orc.stationary_candidate[a] = Rational(num, ctot);
    orc.stationary_candidate[a].canonicalize();
  }
  return orc;
}

inline bool stationary_candidate_is_invariant(const CycleOracle& orc) {
  const std::size_t S = orc.states.size();
  for (std::size_t b = 0; b < S; ++b) {
    Rational acc(0);
    for (std::size_t a = 0; a < S; ++a)
      acc += orc.stationary_candidate[a] * orc.kernel[a * S + b];
    if (acc != orc.stationary_candidate[b]) return false;
  }
  return true;
}

inline std::vector<Rational> oracle_evolve(const CycleOracle& orc,
                                           std::vector<Rational> dist, long t) {
  const std::size_t S = orc.states.size();
  if (dist.size() != S) throw std::domain_error("oracle_evolve: dimension mismatch");
  std::vector<Rational> next(S);
  for (long s = 0; s < t; ++s) {
    for (auto& v : next) v = Rational(0);
    for (std::size_t a = 0; a < S; ++a) {
      if (dist[a] == 0) continue;
      for (std::size_t b = 0; b < S; ++b) next[b] += dist[a] * orc.kernel[a * S + b];
    }
    dist.swap(next);
  }
  return dist;
}

inline Rational oracle_tv_to_candidate(const CycleOracle& orc,
                                       const std::vector<Rational>& dist) {
  Rational acc(0);
  for (std::size_t a = 0; a < orc.states.size(); ++a)
    acc += abs_rational(dist[a] - orc.stationary_candidate[a]);
  return acc / 2;
}

// ---- the tracked-card marginal walk on Z/2p ----

struct MarginalWalk {
  int p = 1, n = 1, k = 1;
  std::vector<Rational> kernel;  // 2p x 2p circulant

  const Rational& K(int i, int j) const {
    return kernel[std::size_t(i) * std::size_t(2 * p) + std::size_t(j)];
  }
};

// lazy symmetric marginal: moves +-1 with probability k/2n each, holds with
// probability 1 - k/n (the displayed hold probability 1 - n/k cannot be a
// probability; it is read as this)
inline MarginalWalk marginal_kernel(int p, int n, int k) {
  if (p < 1 || n < 1 || k < 1 || k > n) throw std::domain_error("marginal_kernel: bad p, n, k");
  MarginalWalk w;
  w.p = p;
  w.n = n;
  w.k = k;
  const int m = 2 * p;
  const Rational mv = make_rational(k, 2L * n);
  const Rational hold = Rational(1) - make_rational(k, n);
  w.kernel.assign(std::size_t(m) * m, Rational(0));
  for (int i = 0; i < m; ++i) {
    w.kernel[std::size_t(i) * m + std::size_t(i)] += hold;
    w.kernel[std::size_t(i) * m + std::size_t((i + 1) % m)] += mv;
    w.kernel[std::size_t(i) * m + std::size_t((i + m - 1) % m)] += mv;
  }
  return w;
}

// difference of two tracked cards, independent-selection approximation:
// +-1 with probability k(n-k)/n^2 each, hold otherwise
inline MarginalWalk difference_walk_kernel(int p, int n, int k) {
  if (p < 1 || n < 1 || k < 1 || k > n)
    throw std::domain_error("difference_walk_kernel: bad p, n, k");
  MarginalWalk w;
  w.p = p;
  w.n = n;
  w.k = k;
  const int m = 2 * p;
  Rational mv(Integer(long(k)) * Integer(long(n) - k),
              Integer(long(n)) * Integer(long(n)));
  mv.canonicalize();
  w.kernel.assign(std::size_t(m) * m, Rational(0));
  for (int i = 0; i < m; ++i) {
    Rational hold = Rational(1) - mv - mv;
    hold.canonicalize();
    w.kernel[std::size_t(i) * m + std::size_t(i)] += hold;
    w.kernel[std::size_t(i) * m + std::size_t((i + 1) % m)] += mv;
    w.kernel[std::size_t(i) * m + std::size_t((i + m - 1) % m)] += mv;
  }
  for (auto& e : w.kernel) e.canonicalize();
  return w;
}

inline std::vector<Rational> marginal_evolve(const MarginalWalk& w,
                                             std::vector<Rational> dist, long t) {
  const int m = 2 * w.p;
  if (int(dist.size()) != m) throw std::domain_error("marginal_evolve: dimension mismatch");
  std::vector<Rational> next(static_cast<std::size_t>(m));
  for (long s = 0; s < t; ++s) {
    for (auto& v : next) v = Rational(0);
    for (int i = 0; i < m; ++i) {
      if (dist[std::size_t(i)] == 0) continue;
      for (int j = 0; j < m; ++j)
        next[std::size_t(j)] += dist[std::size_t(i)] * w.K(i, j);
    }
    dist.swap(next);
  }
  return dist;
}

// exact TV of delta_0 K^t against uniform on Z/2p
inline Rational marginal_tv(const MarginalWalk& w, long t) {
  const int m = 2 * w.p;
  std::vector<Rational> d(std::size_t(m), Rational(0));
  d[0] = 1;
  d = marginal_evolve(w, std::move(d), t);
  const Rational u = make_rational(1, m);
  Rational acc(0);
  for (auto& v : d) acc += abs_rational(v - u);
  return acc / 2;
}

// t_mix(e^-c) >= c 2 p^2 n / (pi^2 k)
inline double theorem4b_bound(int n, int p, int k, double c) {
  if (n < 1 || p < 1 || k < 1 || k > n) throw std::domain_error("theorem4b_bound: bad n, p, k");
  if (c < 0.0) throw std::domain_error("theorem4b_bound: c >= 0");
  return c * 2.0 * double(p) * p * double(n) / (std::numbers::pi * std::numbers::pi * double(k));
}

// ---- the literal card procedure ----

struct DeckShuffleReport {
  ChiSquareReport chi2;
  int p = 1, n = 1, k = 0;
  long t = 0;
  long trials = 0;
  std::uint64_t seed = 0;
  long state_cells = 0;
};

// Cut the deck into 2p piles of n, perfectly shuffle each pile, restack,
// move k cards from the top to the bottom; repeat t times. Cards are
// colored by their original pile. The per-pile color-0 counts are then
// chi-square-tested against the exact projected chain. The cut sends the
// top k of each pile to the previous pile, so pile u maps to urn (-u) mod
// 2p of the oracle, whose step direction is +1.
inline DeckShuffleReport deck_shuffle_oracle(int p, int n, int k, long t,
                                             long trials, std::uint64_t seed,
                                             int threads = 1) {
  if (p < 1 || n < 1) throw std::domain_error("deck_shuffle_oracle: bad p, n");
  if (k < 0 || k > n) throw std::domain_error("deck_shuffle_oracle: k out of [0, n]");
  if (t < 0 || trials < 1) throw std::domain_error("deck_shuffle_oracle: bad t, trials");
  const int p2 = 2 * p;
  const long deck = long(p2) * n;
  if (deck > 120) throw capacity_error("deck_shuffle_oracle: deck larger than 120 cards");

  const CycleOracle orc = exact_small_oracle(p, n, k);
  std::vector<Rational> expected(orc.states.size(), Rational(0));
  {
    std::vector<int> start(std::size_t(p2), 0);
    start[0] = n;
    std::vector<Rational> d(orc.states.size(), Rational(0));
    d[std::size_t(orc.index.at(start))] = 1;
    expected = oracle_evolve(orc, std::move(d), t);
  }

  struct Acc {
    std::vector<long> hist;
  };
  Acc total;
  total.hist.assign(orc.states.size(), 0);

  auto per_trial = [&](long trial, Acc& acc) {
    Rng rng(trial_seed(seed, trial));
    std::vector<int> color(static_cast<std::size_t>(deck));
    for (long pos = 0; pos < deck; ++pos) color[std::size_t(pos)] = int(pos / n);
    for (long s = 0; s < t; ++s) {
      // perfectly shuffle each pile of n consecutive positions
      for (int u = 0; u < p2; ++u) {
        const long base = long(u) * n;
        for (int q = 0; q < n - 1; ++q) {
          const long pick = base + q + long(rng.below(std::uint64_t(n - q)));
          std::swap(color[std::size_t(base + q)], color[std::size_t(pick)]);
        }
      }
      // cut k cards from the top to the bottom
      std::rotate(color.begin(), color.begin() + k, color.end());
    }
    // project: color-0 count per pile, then map pile u -> urn (-u) mod 2p
    std::vector<int> x(std::size_t(p2), 0);
    for (long pos = 0; pos < deck; ++pos)
      if (color[std::size_t(pos)] == 0) ++x[std::size_t(((-(pos / n)) % p2 + p2) % p2)];
    ++acc.hist[std::size_t(orc.index.at(x))];
  };

  run_trials_chunked<Acc>(
      trials, threads,
      [&] {
        Acc a;
        a.hist.assign(orc.states.size(), 0);
        return a;
      },
      per_trial,
      [&](const Acc& a) {
        for (std::size_t i = 0; i < a.hist.size(); ++i) total.hist[i] += a.hist[i];
      });

  std::vector<double> probs(expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) probs[i] = to_double(expected[i]);

  DeckShuffleReport rep;
  rep.chi2 = chi_square_test(total.hist, probs);
  rep.chi2.seed = seed;
  rep.p = p;
  rep.n = n;
  rep.k = k;
  rep.t = t;
  rep.trials = trials;
  rep.seed = seed;
  rep.state_cells = long(orc.states.size());
  return rep;
}

// Monte Carlo occupancy distribution of the tracked-color projection after
// t steps, for validating `step` against the exact oracle.
inline std::vector<long> occupancy_histogram(const CycleOracle& orc, long t,
                                             long trials, std::uint64_t seed,
                                             int threads = 1) {
  struct Acc {
    std::vector<long> hist;
  };
  Acc total;
  total.hist.assign(orc.states.size(), 0);
  auto per_trial = [&](long trial, Acc& acc) {
    Rng rng(trial_seed(seed, trial));
    UrnCycleState s = UrnCycleState::initial(orc.p, orc.n);
    for (long q = 0; q < t; ++q) s = step(std::move(s), orc.k, rng);
    std::vector<int> x(std::size_t(2 * orc.p));
    for (int u = 0; u < 2 * orc.p; ++u) x[std::size_t(u)] = s.counts[std::size_t(u)][0];
    ++acc.hist[std::size_t(orc.index.at(x))];
  };
  run_trials_chunked<Acc>(
      trials, threads,
      [&] {
        Acc a;
        a.hist.assign(orc.states.size(), 0);
        return a;
      },
      per_trial,
      [&](const Acc& a) {
        for (std::size_t i = 0; i < a.hist.size(); ++i) total.hist[i] += a.hist[i];
      });
  return total.hist;
}

}  // namespace urnmix::multi_urn
