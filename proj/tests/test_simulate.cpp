#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ftkreg/error.hpp"
#include "ftkreg/simulate.hpp"
#include "support.hpp"

using namespace ftkreg;

TEST_CASE("num index enumerates the integers") {
  CHECK(num_index(0) == 1);
  CHECK(num_index(1) == 2);
  CHECK(num_index(-1) == 3);
  CHECK(num_index(2) == 4);
  CHECK(num_index(-2) == 5);
  CHECK(num_index(3) == 6);
  std::vector<int> seen(41, 0);
  for (long z = -19; z <= 20; ++z) seen.at(static_cast<std::size_t>(num_index(z)))++;
  for (std::size_t i = 1; i <= 40; ++i) CHECK(seen[i] == 1);
}

TEST_CASE("Legendre polynomials") {
  for (double s : {-1.0, -0.7, 0.0, 0.3, 1.0}) {
    CHECK(legendre_poly(0, s) == 1.0);
    CHECK(legendre_poly(1, s) == s);
    CHECK(legendre_poly(2, s) == doctest::Approx((3 * s * s - 1) / 2));
    CHECK(legendre_poly(3, s) == doctest::Approx((5 * s * s * s - 3 * s) / 2));
    CHECK(legendre_poly(4, s) ==
          doctest::Approx((35 * std::pow(s, 4) - 30 * s * s + 3) / 8));
  }
  CHECK(legendre_poly(17, 1.0) == doctest::Approx(1.0));
  CHECK(legendre_poly(17, -1.0) == doctest::Approx(-1.0));
}

TEST_CASE("Legendre lift interpolates between polynomials") {
  const Grid g(-1.0, 1.0, 41);
  const auto at2 = gamma_lift(2.0, g);
  const auto mid = gamma_lift(2.5, g);
  const auto neg = gamma_lift(-0.25, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double s = g.at(i);
    CHECK(at2[i] == doctest::Approx(legendre_poly(4, s)));
    CHECK(mid[i] == doctest::Approx(0.5 * legendre_poly(4, s) + 0.5 * legendre_poly(6, s)));
    // floor(-0.25) = -1: weight 0.25 on P_3, 0.75 on P_1
    CHECK(neg[i] == doctest::Approx(0.25 * legendre_poly(3, s) + 0.75 * legendre_poly(1, s)));
  }
}

TEST_CASE("sine shape and responses") {
  const Grid g(0.0, std::numbers::pi / 3.0, 201);
  const auto c = sine_shape(2.0, g);
  CHECK(c[0] == doctest::Approx(2.0 * (1.0 + std::sin(std::numbers::pi / 3.0))));
  CHECK(c[200] == doctest::Approx(2.0));
  // int_0^{pi/3} x' = x(pi/3) - x(0)
  const double inc = c[200] - c[0];
  CHECK(response_value(c, ResponseOp::DerivIntegralSquare) == doctest::Approx(inc * inc).epsilon(1e-4));
  const double ref = testsupport::simpson(
      [](double s) { return 4.0 * std::pow(1.0 - std::sin(s - std::numbers::pi / 3.0), 2); }, 0.0,
      std::numbers::pi / 3.0, 400);
  CHECK(response_value(c, ResponseOp::IntegralSquare) == doctest::Approx(ref).epsilon(1e-4));
  CHECK(mar_probability(c, response_value(c, ResponseOp::IntegralSquare)) == doctest::Approx(0.5));
}

TEST_CASE("exact OU transition") {
  OUParams p;
  CHECK(p.stationary_sd() == doctest::Approx(3.5));
  const double z = ou_step(p, 9.0, 0.1, 0.0);
  CHECK(z == doctest::Approx(5.0 + 4.0 * std::exp(-0.2)));
  const double s = ou_step(p, 5.0, 0.1, 1.0);
  CHECK(s - 5.0 == doctest::Approx(3.5 * std::sqrt(1.0 - std::exp(-0.4))));
  p.euler = true;
  CHECK(ou_step(p, 9.0, 0.1, 0.0) == doctest::Approx(9.0 - 0.2 * 4.0));
}

TEST_CASE("OU path moments") {
  OUParams p;
  CounterRng rng(11, 1);
  const auto path = simulate_ou(p, 200000, rng);
  CHECK(path.size() == 200001);
  double mean = 0.0;
  for (double v : path) mean += v;
  mean /= static_cast<double>(path.size());
  double var = 0.0;
  for (double v : path) var += (v - mean) * (v - mean);
  var /= static_cast<double>(path.size() - 1);
  CHECK(std::abs(mean - 5.0) < 0.5);
  CHECK(std::abs(var / 12.25 - 1.0) < 0.15);
  p.stationary_start = false;
  p.z0 = 3.0;
  CounterRng r2(11, 1);
  CHECK(simulate_ou(p, 3, r2)[0] == 3.0);
}

TEST_CASE("MAR calibration hits the target rate") {
  const auto spec = SimSpec::legendre_default();
  for (double rate : {0.2, 0.4}) {
    const double c = calibrate_mar_offset(spec, rate, 20000);
    const auto curves = draw_stationary_curves(spec, 20000, 3, 9);
    double missing = 0.0;
    for (const auto& x : curves) missing += 1.0 - mar_probability(x, c);
    missing /= 20000.0;
    CHECK(std::abs(missing - rate) < 0.015);
  }
  CHECK_THROWS_AS(calibrate_mar_offset(spec, 0.0), Error);
  CHECK_THROWS_AS(calibrate_mar_offset(spec, 1.0), Error);
}

TEST_CASE("generation is deterministic and streams are separate") {
  auto spec = SimSpec::legendre_default();
  spec.T = 5.0;
  spec.delta = 0.05;
  spec.grid = Grid(-1.0, 1.0, 50);
  const auto a = generate(spec);
  const auto b = generate(spec);
  CHECK(a.size() == 100);
  CHECK(std::equal(a.all_values().begin(), a.all_values().end(), b.all_values().begin()));
  CHECK(std::equal(a.responses().begin(), a.responses().end(), b.responses().begin()));
  CHECK(a.observed_count() == 100);

  auto with_mar = spec;
  with_mar.mar = SimSpec::Mar::Expit;
  with_mar.mar_offset = calibrate_mar_offset(spec, 0.4, 5000);
  const auto m = generate(with_mar);
  CHECK(std::equal(a.all_values().begin(), a.all_values().end(), m.all_values().begin()));
  CHECK(m.observed_count() < 100);
  for (std::size_t k = 0; k < m.size(); ++k)
    if (m.observed(k)) CHECK(m.responses()[k] == a.responses()[k]);

  auto iid = spec;
  iid.noise = SimSpec::Noise::GaussianIID;
  const auto c = generate(iid);
  CHECK(std::equal(a.all_values().begin(), a.all_values().end(), c.all_values().begin()));

  auto other = spec;
  other.seed = 43;
  CHECK(generate(other).responses()[0] != a.responses()[0]);
}

TEST_CASE("curves follow the lift and responses the model") {
  auto spec = SimSpec::sine_default();
  spec.noise_sd = 0.0;
  const auto ds = generate(spec);
  CHECK(ds.size() == 200);
  CHECK(ds.time(0) == doctest::Approx(0.3));
  for (std::size_t k = 0; k < ds.size(); k += 37) {
    const auto x = ds.curve(k);
    const double z = x[x.size() - 1];  // x(pi/3) = z
    const auto ref = sine_shape(z, spec.grid);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(ref[i]));
    CHECK(ds.responses()[k] == doctest::Approx(response_value(x, spec.response)));
  }
}

TEST_CASE("Wiener-difference noise has unit variance") {
  auto spec = SimSpec::legendre_default();
  spec.grid = Grid(-1.0, 1.0, 40);
  spec.T = 1000.0;
  spec.delta = 0.1;
  const auto ds = generate(spec);
  double s2 = 0.0, mean = 0.0;
  std::vector<double> e(ds.size());
  for (std::size_t k = 0; k < ds.size(); ++k) {
    e[k] = ds.responses()[k] - response_value(ds.curve(k), spec.response);
    mean += e[k] / static_cast<double>(ds.size());
  }
  for (double v : e) s2 += (v - mean) * (v - mean) / static_cast<double>(ds.size() - 1);
  CHECK(std::abs(s2 - 1.0) < 0.15);
  // increments over one time unit: lag 10 residuals are uncorrelated, lag 1 strongly
  double c1 = 0.0, c10 = 0.0;
  for (std::size_t k = 0; k + 10 < e.size(); ++k) {
    c1 += (e[k] - mean) * (e[k + 1] - mean);
    c10 += (e[k] - mean) * (e[k + 10] - mean);
  }
  c1 /= static_cast<double>(e.size()) * s2;
  c10 /= static_cast<double>(e.size()) * s2;
  CHECK(c1 == doctest::Approx(0.9).epsilon(0.1));
  CHECK(std::abs(c10) < 0.15);
}

TEST_CASE("invalid specs") {
  auto check_invalid = [](const SimSpec& s) {
    try {
      generate(s);
      FAIL("expected SpecInvalid");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SpecInvalid);
    }
  };
  auto s = SimSpec::legendre_default();
  s.T = 1.0;
  s.delta = 0.3;
  check_invalid(s);
  s = SimSpec::legendre_default();
  s.grid = Grid(0.0, 1.0, 10);
  check_invalid(s);
  s = SimSpec::legendre_default();
  s.ou.theta = 0.0;
  check_invalid(s);
  s = SimSpec::sine_default();
  s.noise_sd = -1.0;
  check_invalid(s);
}
