#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "statusarena/analytics.hpp"
#include "statusarena/stats.hpp"

using namespace statusarena;

namespace {

// Simpson's rule on the Student t density, independent of the library CDF.
double t_tail_by_quadrature(double t, double dof) {
  const double c = std::exp(std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2)) / std::sqrt(dof * std::numbers::pi);
  const auto pdf = [&](double x) { return c * std::pow(1 + x * x / dof, -(dof + 1) / 2); };
  const int n = 20000;
  const double a = 0.0, b = std::abs(t);
  const double h = (b - a) / n;
  double s = pdf(a) + pdf(b);
  for (int i = 1; i < n; ++i) s += pdf(a + i * h) * (i % 2 ? 4 : 2);
  return 1.0 - 2.0 * (s * h / 3);
}

struct NaiveWelch {
  double t, dof;
};

NaiveWelch naive_welch(const std::vector<double>& a, const std::vector<double>& b) {
  auto mv = [](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= v.size();
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::pair{m, ss / (v.size() - 1)};
  };
  auto [ma, va] = mv(a);
  auto [mb, vb] = mv(b);
  const double qa = va / a.size(), qb = vb / b.size();
  return {(ma - mb) / std::sqrt(qa + qb),
          (qa + qb) * (qa + qb) / (qa * qa / (a.size() - 1) + qb * qb / (b.size() - 1))};
}

}  // namespace

TEST_CASE("t tail probability matches quadrature") {
  for (double dof : {1.0, 2.5, 4.0, 9.0, 30.0}) {
    for (double t : {0.1, 0.7, 1.5, 2.2, 3.674, 6.0}) {
      CHECK(student_t_two_tailed_p(t, dof) == doctest::Approx(t_tail_by_quadrature(t, dof)).epsilon(1e-6));
      CHECK(student_t_two_tailed_p(-t, dof) == doctest::Approx(student_t_two_tailed_p(t, dof)));
    }
  }
}

TEST_CASE("summaries and Welch reference values") {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  const auto s = summarize(a);
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.sem == doctest::Approx(0.57735).epsilon(1e-4));
  const auto w = welch_t_test(a, b);
  REQUIRE(w);
  CHECK(w->t_statistic == doctest::Approx(-3.674).epsilon(1e-3));
  CHECK(w->dof == doctest::Approx(4.0));
  CHECK(w->p_value == doctest::Approx(0.021).epsilon(0.02));
  CHECK_FALSE(welch_t_test(std::vector<double>{1}, b));
}

TEST_CASE("aggregate_seeds agrees with a naive Welch on random inputs") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0, 1);
  std::uniform_int_distribution<int> size(2, 12);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> a(size(rng)), b(size(rng));
    for (auto& x : a) x = z(rng);
    for (auto& x : b) x = 0.5 + 2 * z(rng);
    const auto c = aggregate_seeds(a, b);
    const auto ref = naive_welch(a, b);
    REQUIRE(c.test);
    CHECK(std::abs(c.test->t_statistic - ref.t) < 1e-9);
    CHECK(std::abs(c.test->dof - ref.dof) < 1e-9);
  }
}

TEST_CASE("significance stars") {
  CHECK(significance_stars(0.0005) == "***");
  CHECK(significance_stars(0.005) == "**");
  CHECK(significance_stars(0.03) == "*");
  CHECK(significance_stars(0.2) == "ns");
}

TEST_CASE("elasticity on power-law series") {
  const std::vector<PricePoint> exact{{1, 8}, {2, 2}, {4, 0.5}};
  const auto e = estimate_ped(exact);
  REQUIRE(e);
  CHECK(std::abs(e->slope + 2.0) < 1e-9);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0, 0.1);
  std::uniform_real_distribution<double> price(1, 50);
  double sum = 0;
  for (int s = 0; s < 100; ++s) {
    std::vector<PricePoint> pts;
    for (int i = 0; i < 25; ++i) {
      const double p = price(rng);
      pts.push_back({p, 1000 * std::pow(p, -2.0) * std::exp(noise(rng))});
    }
    const auto est = estimate_ped(pts);
    REQUIRE(est);
    CHECK(std::abs(est->slope + 2.0) < 0.3);
    sum += est->slope;
  }
  CHECK(std::abs(sum / 100 + 2.0) < 0.1);

  CHECK_FALSE(estimate_ped(std::vector<PricePoint>{{1, 2}, {2, 3}}));
  CHECK_FALSE(estimate_ped(std::vector<PricePoint>{{3, 2}, {3, 3}, {3, 4}}));
}

TEST_CASE("ped_series drops empty rounds by default") {
  std::vector<RoundObservation> rounds(4);
  for (int i = 0; i < 4; ++i) rounds[i].round = i;
  rounds[0].best_ask = 10;
  rounds[0].bid_units = 2;
  rounds[1].best_ask = 12;
  rounds[1].bid_units = 0;
  rounds[2].bid_units = 5;  // no price at all
  rounds[3].best_ask = 11;
  rounds[3].clearing_price = 9;
  rounds[3].executed_volume = 1;
  rounds[3].bid_units = 3;
  const auto pts = ped_series(rounds);
  REQUIRE(pts.size() == 2);
  CHECK(pts[1].price == 9);
  PedOptions add_one;
  add_one.zeros = ZeroHandling::AddOne;
  CHECK(ped_series(rounds, add_one).size() == 3);
}
