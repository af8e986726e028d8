#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "urnmix/bounds.hpp"
#include "urnmix/hahn.hpp"
#include "urnmix/two_urn.hpp"

using namespace urnmix;
using two_urn::TwoUrnParams;

TEST_CASE("spectral upper pinned values") {
  // n=2, k=1, t=1, start 0: betas (1, 0, -1/2), d = (1, 3, 2)
  const auto r = bounds::spectral_upper(2, 1, 1, 0);
  CHECK(r.value == Catch::Approx(0.5).epsilon(1e-14));
  CHECK(r.extra("tv_upper") == Catch::Approx(std::sqrt(0.125)).epsilon(1e-12));
  // exact TV after one step is 1/3 <= 0.3536
  CHECK(1.0 / 3.0 <= r.extra("tv_upper"));

  // geometric decay to zero
  const auto far = bounds::spectral_upper(6, 2, 400, 0);
  CHECK(far.value <= 1e-200);

  CHECK_THROWS_AS(bounds::spectral_upper(4, 0, 1, 0), std::domain_error);
  CHECK_THROWS_AS(bounds::spectral_upper(4, 4, 1, 0), std::domain_error);
}

TEST_CASE("spectral upper float path matches exact") {
  for (auto [n, k, t] : {std::tuple{12, 5, 2}, {40, 20, 3}, {52, 26, 3}}) {
    const auto ex = bounds::spectral_upper(n, k, t, 0, bounds::Precision::exact);
    const auto fl = bounds::spectral_upper(n, k, t, 0, bounds::Precision::floating);
    CHECK(fl.value == Catch::Approx(ex.value).epsilon(1e-9));
  }
  // a nonzero start exercises the eigenfunction values
  const auto ex = bounds::spectral_upper(10, 3, 2, 4, bounds::Precision::exact);
  const auto fl = bounds::spectral_upper(10, 3, 2, 4, bounds::Precision::floating);
  CHECK(fl.value == Catch::Approx(ex.value).epsilon(1e-9));
}

TEST_CASE("theorem 3 pinned table values") {
  const auto a = bounds::theorem3_bound(52, 0, 3);
  CHECK(a.value == Catch::Approx(std::numbers::pi * std::numbers::pi / (6.0 * 52 * 52))
                       .epsilon(1e-12));
  CHECK(a.value == Catch::Approx(6.0833e-4).epsilon(1e-3));
  CHECK(bounds::theorem3_bound(208, 0, 3).value == Catch::Approx(3.802e-5).epsilon(1e-3));
  CHECK(bounds::theorem3_bound(1040, 0, 3).value == Catch::Approx(1.5209e-6).epsilon(1e-3));
  CHECK(bounds::theorem3_bound(52, 1, 3).extra("B") == Catch::Approx(1.0 / 3.0));
  CHECK(bounds::theorem3_bound(1040, 3, 3).extra("A") == Catch::Approx(36.0));
  CHECK_THROWS_AS(bounds::theorem3_bound(51, 0, 3), std::domain_error);
  CHECK_THROWS_AS(bounds::theorem3_bound(8, 2, 3), std::domain_error);  // 6^2 > 8
}

TEST_CASE("theorem 1 pinned table values") {
  auto v = [](int n, int k) {
    return bounds::theorem1_bound(n, k, 0.1).extra("small_k_form");
  };
  CHECK(std::fabs(v(52, 2) - 81.0) <= 1.0);
  CHECK(std::fabs(v(208, 6) - 132.0) <= 1.0);
  CHECK(std::fabs(v(1040, 45) - 107.0) <= 1.0);
  // the exact pre-asymptotic form dominates the true mixing time
  for (auto [n, k] : {std::pair{6, 2}, {11, 3}, {20, 9}}) {
    for (double eps : {0.25, 0.1}) {
      const auto r = bounds::theorem1_bound(n, k, eps);
      const long t = two_urn::mixing_time(TwoUrnParams(n, k), eps, 0);
      CHECK(double(t) <= std::ceil(r.value));
    }
  }
  CHECK_THROWS_AS(bounds::theorem1_bound(8, 0, 0.1), std::domain_error);
  CHECK_THROWS_AS(bounds::theorem1_bound(8, 8, 0.1), std::domain_error);
}

TEST_CASE("second moment mean and variance match direct computation") {
  for (auto [n, k, t] : {std::tuple{6, 2, 3}, {9, 4, 5}, {12, 5, 7}}) {
    const auto K = two_urn::kernel(TwoUrnParams(n, k));
    auto dist = two_urn::evolve(two_urn::point_mass<Rational>(n, 0), K, t);
    // g(x) = 1 - 2x/n; f = sqrt(n-1) g, so E[f]^2 = (n-1) E[g]^2 and
    // Var[f] = (n-1)(E[g^2] - E[g]^2)
    Rational eg(0), eg2(0);
    for (int x = 0; x <= n; ++x) {
      const Rational g = Rational(1) - make_rational(2 * x, n);
      eg += dist[std::size_t(x)] * g;
      eg2 += dist[std::size_t(x)] * g * g;
    }
    CHECK(Rational(n - 1) * eg * eg == bounds::second_moment_mean_sq_exact(n, k, t));
    CHECK(Rational(n - 1) * (eg2 - eg * eg) == bounds::second_moment_var_exact(n, k, t));
  }
}

TEST_CASE("second moment lower bound basics") {
  // Z_0 is deterministic at state 0, so Var = 0 exactly
  for (int n : {4, 9, 25}) CHECK(bounds::second_moment_var_exact(n, 1, 0) == 0);

  // vacuous when |E| <= alpha
  const auto vac = bounds::second_moment_lower(10, 5, 50, 1.0);
  CHECK(vac.value == 0.0);
  CHECK(vac.extra("vacuous") == 1.0);

  // k near n/2 makes E ~ 0 at the default alpha as well
  const auto near_half = bounds::second_moment_lower_default_alpha(20, 10, 3);
  CHECK(near_half.value == 0.0);

  // the bound is a true lower bound on the exact TV
  for (auto [n, k] : {std::pair{12, 1}, {20, 2}, {30, 1}}) {
    const auto K = two_urn::to_float(two_urn::kernel(TwoUrnParams(n, k)));
    const auto pi = two_urn::stationary_float(n);
    auto d = two_urn::point_mass<double>(n, 0);
    for (int t = 1; t <= 40; ++t) {
      d = two_urn::evolve(std::move(d), K, 1);
      const double tv = two_urn::tv_distance<double>(d, pi);
      const auto r = bounds::second_moment_lower_default_alpha(n, k, t);
      CAPTURE(n, k, t);
      CHECK(r.value <= tv + 1e-12);
    }
  }
}

TEST_CASE("eigenfunction square identity") {
  for (int n : {2, 3, 10, 27, 40}) CHECK(bounds::eigenfunction_square_identity_check(n));
}

TEST_CASE("4 TV^2 never exceeds the spectral sum (sampled grid)") {
  for (auto [n, k] : {std::pair{5, 2}, {9, 7}, {14, 7}, {21, 4}}) {
    const auto K = two_urn::to_float(two_urn::kernel(TwoUrnParams(n, k)));
    const auto pi = two_urn::stationary_float(n);
    const auto es = hahn::eigensystem(n, k);
    auto d = two_urn::point_mass<double>(n, 0);
    for (int t = 1; t <= 50; ++t) {
      d = two_urn::evolve(std::move(d), K, 1);
      const double tv = two_urn::tv_distance<double>(d, pi);
      double sum = 0.0;
      for (int i = 1; i <= n; ++i)
        sum += to_double(Rational(es.multiplicities[std::size_t(i)])) *
               std::pow(to_double(es.betas[std::size_t(i)]), 2.0 * t);
      CAPTURE(n, k, t);
      // the additive allowance covers float TV noise once the true TV has
      // decayed beyond double resolution
      CHECK(4.0 * tv * tv <= sum + 8e-12 * tv + 1e-23);
    }
  }
}

TEST_CASE("theorem 3 dominates the raw spectral sum at k = n/2") {
  for (int n : {8, 20, 40}) {
    for (long t : {3L, 10L, 25L, 50L}) {
      const auto sp = bounds::spectral_upper(n, n / 2, t, 0);
      const auto t3 = bounds::theorem3_bound(n, 0, t);
      CAPTURE(n, t);
      CHECK(sp.value <= t3.value * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("theorem 3 at c = 1: bound holds at small t, fails past it") {
  // The i = 1 eigenvalue at k = n/2 - 1 is 2/n, so the raw spectral sum
  // decays as (2/n)^{2t}, slower than the stated (1/n)^{2t-2} envelope.
  // The first few steps still satisfy the displayed bound; later steps
  // provably exceed it. Both facts are pinned here.
  const int n = 40;
  for (long t : {3L, 5L, 8L}) {
    CHECK(bounds::spectral_upper(n, n / 2 - 1, t, 0).value <=
          bounds::theorem3_bound(n, 1, t).value);
  }
  CHECK(bounds::spectral_upper(n, n / 2 - 1, 10, 0).value >
        bounds::theorem3_bound(n, 1, 10).value);
}
