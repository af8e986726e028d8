#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "urnmix/hahn.hpp"
#include "urnmix/multi_urn.hpp"
#include "urnmix/two_urn.hpp"

using namespace urnmix;

TEST_CASE("step conserves rows and columns") {
  Rng rng(99);
  auto s = multi_urn::UrnCycleState::initial(3, 7);
  REQUIRE(s.conserved());
  for (int t = 0; t < 2000; ++t) {
    s = multi_urn::step(std::move(s), 3, rng);
    REQUIRE(s.conserved());
  }
  SECTION("k = 0 leaves the state unchanged") {
    auto a = multi_urn::UrnCycleState::initial(2, 4);
    auto b = multi_urn::step(a, 0, rng);
    CHECK(a.counts == b.counts);
  }
  SECTION("k = n rotates the whole matrix by one urn") {
    auto a = multi_urn::UrnCycleState::initial(2, 4);
    Rng r2(5);
    for (int t = 0; t < 3; ++t) a = multi_urn::step(std::move(a), 2, r2);
    auto b = multi_urn::step(a, 4, r2);
    for (int u = 0; u < 4; ++u)
      CHECK(b.counts[std::size_t((u + 1) % 4)] == a.counts[std::size_t(u)]);
  }
}

TEST_CASE("exact small oracle rows are stochastic") {
  const auto orc = multi_urn::exact_small_oracle(2, 3, 1);
  const std::size_t S = orc.states.size();
  REQUIRE(S == 20);  // compositions of 3 into 4 parts
  for (std::size_t a = 0; a < S; ++a) {
    Rational row(0);
    for (std::size_t b = 0; b < S; ++b) row += orc.kernel[a * S + b];
    CHECK(row == 1);
  }
  CHECK_THROWS_AS(multi_urn::exact_small_oracle(6, 30, 2), capacity_error);
}

TEST_CASE("two-urn cycle oracle reproduces the two-urn kernel") {
  for (auto [n, k] : {std::pair{2, 1}, {4, 2}, {6, 3}, {5, 4}}) {
    const auto orc = multi_urn::exact_small_oracle(1, n, k);
    const auto K = two_urn::kernel(two_urn::TwoUrnParams(n, k));
    REQUIRE(orc.state_count() == n + 1);
    // oracle states are (x0, x1); two-urn state i counts reds in urn 1,
    // with color 0 = red starting in urn 0, i.e. i = x1 = n - x0
    for (int a = 0; a <= n; ++a) {
      const auto& sa = orc.states[std::size_t(a)];
      for (int b = 0; b <= n; ++b) {
        const auto& sb = orc.states[std::size_t(b)];
        CHECK(orc.K(a, b) == K(sa[1], sb[1]));
      }
    }
  }
}

TEST_CASE("product hypergeometric measure is stationary on small instances") {
  for (auto [p, n, k] : {std::tuple{1, 5, 2}, {2, 3, 1}, {2, 3, 2}, {3, 2, 1}}) {
    const auto orc = multi_urn::exact_small_oracle(p, n, k);
    Rational total(0);
    for (auto& v : orc.stationary_candidate) total += v;
    CHECK(total == 1);
    CHECK(multi_urn::stationary_candidate_is_invariant(orc));
  }
}

TEST_CASE("k and n-k kernels are conjugate and mix identically") {
  for (auto [p, n, k] : {std::tuple{2, 3, 1}, {2, 4, 1}, {3, 2, 1}}) {
    const auto a = multi_urn::exact_small_oracle(p, n, k);
    const auto b = multi_urn::exact_small_oracle(p, n, n - k);
    const int p2 = 2 * p;
    const std::size_t S = a.states.size();
    auto rot = [&](const std::vector<int>& s) {
      std::vector<int> r(static_cast<std::size_t>(p2));
      for (int u = 0; u < p2; ++u) r[std::size_t(u)] = s[std::size_t((u + p2 - 1) % p2)];
      return r;
    };
    auto refl = [&](const std::vector<int>& s) {
      std::vector<int> r(static_cast<std::size_t>(p2));
      for (int u = 0; u < p2; ++u) r[std::size_t(u)] = s[std::size_t((p2 - u) % p2)];
      return r;
    };
    for (std::size_t x = 0; x < S; ++x) {
      const int xm = a.index.at(refl(rot(a.states[x])));
      for (std::size_t y = 0; y < S; ++y) {
        const int ym = a.index.at(refl(a.states[y]));
        REQUIRE(b.kernel[x * S + y] == a.kernel[std::size_t(xm) * S + std::size_t(ym)]);
      }
    }
    // TV curves from the all-color-0-in-urn-0 start coincide
    std::vector<int> start(std::size_t(p2), 0);
    start[0] = n;
    std::vector<Rational> da(S, Rational(0)), db(S, Rational(0));
    da[std::size_t(a.index.at(start))] = 1;
    db[std::size_t(b.index.at(start))] = 1;
    for (int t = 1; t <= 8; ++t) {
      da = multi_urn::oracle_evolve(a, std::move(da), 1);
      db = multi_urn::oracle_evolve(b, std::move(db), 1);
      CHECK(multi_urn::oracle_tv_to_candidate(a, da) ==
            multi_urn::oracle_tv_to_candidate(b, db));
    }
  }
}

TEST_CASE("marginal kernel is doubly stochastic with uniform fixed point") {
  for (auto [p, n, k] : {std::tuple{2, 8, 3}, {5, 50, 5}, {1, 4, 2}}) {
    const auto w = multi_urn::marginal_kernel(p, n, k);
    const int m = 2 * p;
    for (int i = 0; i < m; ++i) {
      Rational row(0), col(0);
      for (int j = 0; j < m; ++j) {
        row += w.K(i, j);
        col += w.K(j, i);
      }
      CHECK(row == 1);
      CHECK(col == 1);
    }
    std::vector<Rational> u(std::size_t(m), make_rational(1, m));
    CHECK(multi_urn::marginal_evolve(w, u, 3) == u);
    CHECK(multi_urn::marginal_tv(w, 0) == Rational(1) - make_rational(1, m));
  }
}

TEST_CASE("marginal TV decays along the dominant frequency") {
  const int p = 5, n = 50, k = 5;
  const auto w = multi_urn::marginal_kernel(p, n, k);
  const double lam = 1.0 - double(k) / n * (1.0 - std::cos(std::numbers::pi / p));
  double prev = 1.0;
  for (long t : {1L, 5L, 20L, 51L}) {
    const double tv = to_double(multi_urn::marginal_tv(w, t));
    CHECK(tv <= prev + 1e-15);  // non-increasing at the probed points
    // the halved test-function bound is a true lower bound
    CHECK(tv >= 0.5 * std::pow(lam, double(t)) - 1e-12);
    prev = tv;
  }
}

TEST_CASE("marginal walk at p = 1 matches the first two-urn eigenvalue") {
  // (n-k)/n + (k/n) cos(pi/1) = 1 - 2k/n = beta_1(k)
  for (auto [n, k] : {std::pair{6, 2}, {10, 7}}) {
    const Rational lam = make_rational(n - k, n) - make_rational(k, n);
    CHECK(lam == hahn::eigenvalue(1, k, n));
  }
}

TEST_CASE("difference walk kernel rows") {
  const auto w = multi_urn::difference_walk_kernel(3, 8, 3);
  const int m = 6;
  const Rational mv = make_rational(3 * 5, 64);
  for (int i = 0; i < m; ++i) {
    CHECK(w.K(i, (i + 1) % m) == mv);
    CHECK(w.K(i, (i + m - 1) % m) == mv);
    Rational row(0);
    for (int j = 0; j < m; ++j) row += w.K(i, j);
    CHECK(row == 1);
  }
}

TEST_CASE("theorem 4b bound scales linearly in c") {
  CHECK(multi_urn::theorem4b_bound(50, 5, 5, 0.0) == 0.0);
  const double b1 = multi_urn::theorem4b_bound(50, 5, 5, 1.0);
  const double b2 = multi_urn::theorem4b_bound(50, 5, 5, 2.0);
  CHECK(b2 == Catch::Approx(2.0 * b1).epsilon(1e-12));
  CHECK(b1 == Catch::Approx(2.0 * 25.0 * 50.0 / (std::numbers::pi * std::numbers::pi * 5.0))
                  .epsilon(1e-12));
}

TEST_CASE("exact marginal TV lower-bounds the projected-chain TV") {
  // the tracked ball's urn is a stochastic map of the color-0 counts, so
  // its TV cannot exceed the projected chain's; checked on tiny instances
  for (auto [p, n, k] : {std::tuple{2, 3, 1}, {2, 2, 1}}) {
    const auto orc = multi_urn::exact_small_oracle(p, n, k);
    const auto w = multi_urn::marginal_kernel(p, n, k);
    std::vector<int> start(std::size_t(2 * p), 0);
    start[0] = n;
    std::vector<Rational> d(orc.states.size(), Rational(0));
    d[std::size_t(orc.index.at(start))] = 1;
    for (int t = 1; t <= 10; ++t) {
      d = multi_urn::oracle_evolve(orc, std::move(d), 1);
      const double full_tv = to_double(multi_urn::oracle_tv_to_candidate(orc, d));
      const double marg_tv = to_double(multi_urn::marginal_tv(w, t));
      CAPTURE(p, n, k, t);
      CHECK(marg_tv <= full_tv + 1e-12);
    }
  }
}

TEST_CASE("monte carlo occupancy matches the exact oracle") {
  const auto orc = multi_urn::exact_small_oracle(1, 4, 2);
  std::vector<int> start(2, 0);
  start[0] = 4;
  std::vector<Rational> d(orc.states.size(), Rational(0));
  d[std::size_t(orc.index.at(start))] = 1;
  d = multi_urn::oracle_evolve(orc, std::move(d), 3);
  std::vector<double> probs(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) probs[i] = to_double(d[i]);
  const auto hist = multi_urn::occupancy_histogram(orc, 3, 100000, 4321, 4);
  const auto rep = chi_square_test(hist, probs);
  CAPTURE(rep.statistic, rep.dof, rep.p_value);
  CHECK(rep.pass(1e-3));
}

TEST_CASE("deck shuffle oracle small checks") {
  SECTION("t = 0 is the deterministic initial configuration") {
    const auto rep = multi_urn::deck_shuffle_oracle(1, 3, 1, 0, 2000, 9, 2);
    CHECK(rep.chi2.pass(1e-3));
    CHECK(rep.chi2.statistic == 0.0);  // all mass lands on the start state
  }
  SECTION("k = 0 never changes pile membership") {
    const auto rep = multi_urn::deck_shuffle_oracle(2, 2, 0, 5, 2000, 9, 2);
    CHECK(rep.chi2.statistic == 0.0);
  }
  SECTION("two-pile deck agrees with the exact chain") {
    const auto rep = multi_urn::deck_shuffle_oracle(1, 3, 1, 2, 20000, 2025, 2);
    CAPTURE(rep.chi2.statistic, rep.chi2.p_value);
    CHECK(rep.chi2.pass(1e-3));
  }
  SECTION("capacity guard") {
    CHECK_THROWS_AS(multi_urn::deck_shuffle_oracle(4, 30, 2, 1, 10, 1), capacity_error);
  }
}
