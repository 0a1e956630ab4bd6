#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ftkreg/error.hpp"
#include "ftkreg/funcdata.hpp"
#include "support.hpp"

using namespace ftkreg;
using testsupport::sample;

TEST_CASE("grid invariants") {
  Grid g(-1.0, 1.0, 5);
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.at(0) == -1.0);
  CHECK(g.at(4) == 1.0);
  const auto w = g.trapezoid_weights();
  CHECK(w[0] == doctest::Approx(0.25));
  CHECK(w[2] == doctest::Approx(0.5));
  CHECK_THROWS_AS(Grid(1.0, 1.0, 5), Error);
  CHECK_THROWS_AS(Grid(0.0, 1.0, 1), Error);
}

TEST_CASE("curve rejects wrong length and non-finite values") {
  Grid g(0.0, 1.0, 3);
  CHECK_THROWS_AS(Curve(g, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(Curve(g, {1.0, NAN, 2.0}), Error);
}

TEST_CASE("integrate constant, odd and quadratic curves") {
  Grid g(-1.0, 1.0, 400);
  CHECK(integrate_curve(sample(g, [](double) { return 1.0; })) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(integrate_curve(sample(g, [](double s) { return s; }))) < 1e-14);
  const double oracle = testsupport::simpson([](double s) { return s * s; }, -1.0, 1.0, 100000);
  CHECK(std::abs(integrate_curve(sample(g, [](double s) { return s * s; })) - oracle) < 1e-4);
}

TEST_CASE("integration is linear") {
  Grid g(0.0, 2.0, 57);
  auto c1 = sample(g, [](double s) { return std::exp(s); });
  auto c2 = sample(g, [](double s) { return std::cos(3 * s); });
  auto mix = sample(g, [](double s) { return 2.5 * std::exp(s) - 0.7 * std::cos(3 * s); });
  CHECK(integrate_curve(mix) ==
        doctest::Approx(2.5 * integrate_curve(c1) - 0.7 * integrate_curve(c2)).epsilon(1e-13));
}

TEST_CASE("first derivative of affine and sine curves") {
  Grid g(0.0, 1.0, 100);
  const auto d = differentiate_curve(sample(g, [](double s) { return s; }), 1);
  for (double v : d.values()) CHECK(std::abs(v - 1.0) < 1e-10);

  Grid gs(0.0, std::numbers::pi / 3.0, 100);
  const auto ds = differentiate_curve(sample(gs, [](double s) { return std::sin(s); }), 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i)
    worst = std::max(worst, std::abs(ds[i] - std::cos(gs.at(i))));
  CHECK(worst < 1e-3);
}

TEST_CASE("second derivative of a quadratic is constant") {
  Grid g(-1.0, 1.0, 50);
  const auto d = differentiate_curve(sample(g, [](double s) { return s * s; }), 2);
  for (double v : d.values()) CHECK(std::abs(v - 2.0) < 1e-6);
}

TEST_CASE("derivatives annihilate constants and are linear") {
  Grid g(0.0, 1.0, 31);
  for (int order : {1, 2}) {
    const auto d = differentiate_curve(sample(g, [](double) { return 4.2; }), order);
    for (double v : d.values()) CHECK(std::abs(v) < 1e-9);
    auto a = sample(g, [](double s) { return std::sin(4 * s); });
    auto b = sample(g, [](double s) { return s * s * s; });
    auto ab = sample(g, [](double s) { return 3 * std::sin(4 * s) + 2 * s * s * s; });
    const auto da = differentiate_curve(a, order), db = differentiate_curve(b, order),
               dab = differentiate_curve(ab, order);
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(dab[i] == doctest::Approx(3 * da[i] + 2 * db[i]).epsilon(1e-9));
  }
}

TEST_CASE("integral of the derivative recovers the increment") {
  Grid g(0.0, 2.0, 201);
  auto c = sample(g, [](double s) { return std::exp(-s) * std::sin(2 * s); });
  const double inc = c[g.size() - 1] - c[0];
  CHECK(std::abs(integrate_curve(differentiate_curve(c, 1)) - inc) < 10 * g.spacing() * g.spacing());
}

TEST_CASE("too coarse grids are rejected") {
  Grid g(0.0, 1.0, 3);
  auto c = sample(g, [](double s) { return s; });
  CHECK_NOTHROW(differentiate_curve(c, 1));
  try {
    differentiate_curve(c, 2);
    FAIL("expected GridTooCoarse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridTooCoarse);
  }
}

TEST_CASE("dataset checks times and response presence") {
  Grid g(0.0, 1.0, 2);
  FunctionalDataset ds(g, 0.5, {0.5, 1.0, 1.5}, {1, 0, 1}, {2.0, NAN, 3.0},
                       {0, 1, 1, 2, 2, 3});
  CHECK(ds.size() == 3);
  CHECK(ds.horizon() == doctest::Approx(1.5));
  CHECK(ds.observed_count() == 2);
  CHECK(!ds.response(1).has_value());
  CHECK(*ds.response(2) == 3.0);
  CHECK(ds.curve(1)[1] == 2.0);
  CHECK_THROWS_AS(FunctionalDataset(g, 0.5, {0.5, 1.1}, {1, 1}, {1, 2}, {0, 0, 0, 0}), Error);
  CHECK_THROWS_AS(FunctionalDataset(g, 0.5, {0.5, 1.0}, {1, 1}, {1, NAN}, {0, 0, 0, 0}), Error);
}

TEST_CASE("subsample keeps every stride-th instant") {
  Grid g(0.0, 1.0, 2);
  std::vector<double> t, y, v;
  std::vector<std::uint8_t> z;
  for (int k = 0; k < 10; ++k) {
    t.push_back((k + 1) * 0.25);
    y.push_back(k);
    z.push_back(1);
    v.push_back(k);
    v.push_back(-k);
  }
  FunctionalDataset ds(g, 0.25, t, z, y, v);
  const auto sub = ds.subsample(4);
  REQUIRE(sub.size() == 2);
  CHECK(sub.delta() == 1.0);
  CHECK(sub.time(0) == 1.0);
  CHECK(*sub.response(0) == 3.0);
  CHECK(*sub.response(1) == 7.0);
  CHECK(sub.curve(1)[1] == -7.0);
}
