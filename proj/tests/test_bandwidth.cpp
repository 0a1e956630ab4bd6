#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "ftkreg/bandwidth.hpp"
#include "ftkreg/error.hpp"
#include "support.hpp"

using namespace ftkreg;

namespace {

// Naive trapezoid L2 distance between two sampled curves.
double naive_dist(const std::vector<double>& u, const std::vector<double>& v, const Grid& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w = (i == 0 || i + 1 == u.size()) ? 0.5 * g.spacing() : g.spacing();
    s += w * (u[i] - v[i]) * (u[i] - v[i]);
  }
  return std::sqrt(s);
}

double kth(std::vector<double> d, std::size_t k) {
  std::sort(d.begin(), d.end());
  return d[k - 1] * (1.0 + 1e-12);
}

struct Brute {
  std::vector<double> scores;
  std::size_t kappa;
  double h;
};

// Mean leave-one-out error over the observed curves inside the widest ball.
Brute brute_force(const testsupport::HandData& d, const std::vector<double>& query,
                  const std::vector<std::size_t>& grid) {
  std::vector<std::size_t> obs;
  for (std::size_t k = 0; k < d.curves.size(); ++k)
    if (d.zeta[k]) obs.push_back(k);
  std::vector<double> qd;
  for (auto k : obs) qd.push_back(naive_dist(query, d.curves[k], d.grid));
  std::vector<double> radius;
  for (auto kap : grid) radius.push_back(kth(qd, kap));

  std::vector<std::size_t> validation;
  for (std::size_t i = 0; i < obs.size(); ++i)
    if (qd[i] <= radius.back()) validation.push_back(obs[i]);

  Brute b{std::vector<double>(grid.size(), 0.0), 0, 0.0};
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (auto j : validation) {
      std::vector<std::size_t> train;
      std::vector<double> dj;
      for (auto k : obs)
        if (k != j) {
          train.push_back(k);
          dj.push_back(naive_dist(d.curves[j], d.curves[k], d.grid));
        }
      const double h = kth(dj, grid[g]);
      double num = 0, den = 0;
      for (std::size_t m = 0; m < train.size(); ++m) {
        const double u = dj[m] / h;
        if (u > 1) continue;
        const double w = 0.75 * (1 - u * u);
        num += w * d.y[train[m]];
        den += w;
      }
      const double e = d.y[j] - num / den;
      b.scores[g] += e * e / static_cast<double>(validation.size());
    }
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (b.scores[g] < b.scores[best]) best = g;
  b.kappa = grid[best];
  b.h = radius[best];
  return b;
}

}  // namespace

TEST_CASE("fixed rule returns its bandwidth") {
  std::mt19937_64 rng(1);
  const auto d = testsupport::random_data(rng, 10, 6);
  MetricDataset md(d.dataset(), SemiMetric::l2());
  const Curve x(d.grid, d.curves[3]);
  CHECK(resolve_bandwidth(md, x, BandwidthRule::fixed(0.3), Kernel::quadratic()) == 0.3);
  CHECK_THROWS_AS(BandwidthRule::fixed(0.0), Error);
  CHECK_THROWS_AS(BandwidthRule::fixed(-1.0), Error);
}

TEST_CASE("knn radius covers exactly the kappa nearest") {
  const std::vector<double> d{0.5, 0.1, 0.3, 0.3, 0.9};
  CHECK(knn_radius(d, 1) == doctest::Approx(0.1).epsilon(1e-11));
  CHECK(knn_radius(d, 1) > 0.1);
  CHECK(knn_radius(d, 3) > 0.3);
  CHECK(knn_radius(d, 5) > 0.9);
  CHECK(knn_radius(std::vector<double>{0.0, 1.0}, 1) > 0.0);
  CHECK_THROWS_AS(knn_radius(d, 6), Error);
}

TEST_CASE("kappa 1 selects the nearest observed curve") {
  std::mt19937_64 rng(2);
  const auto d = testsupport::random_data(rng, 12, 6, 0.0);
  MetricDataset md(d.dataset(), SemiMetric::l2());
  std::vector<double> q(6, 0.2);
  std::vector<double> qd;
  for (const auto& c : d.curves) qd.push_back(naive_dist(q, c, d.grid));
  const double h = resolve_bandwidth(md, Curve(d.grid, q), BandwidthRule::knn({1}), Kernel::quadratic());
  CHECK(h == doctest::Approx(*std::min_element(qd.begin(), qd.end())).epsilon(1e-10));
}

TEST_CASE("cross-validated kappa matches a brute-force search") {
  for (std::uint64_t seed : {3u, 4u, 5u, 6u, 7u}) {
    std::mt19937_64 rng(seed);
    const auto d = testsupport::random_data(rng, 20, 7, 0.1);
    MetricDataset md(d.dataset(), SemiMetric::l2());
    const std::vector<std::size_t> grid{2, 4, 8};
    std::normal_distribution<double> N;
    std::vector<double> q(7);
    for (std::size_t i = 0; i < 7; ++i) q[i] = N(rng) + 0.5 * d.grid.at(i);
    const auto qd = md.distances(md.query_features(Curve(d.grid, q)));
    const auto choice = resolve_bandwidth(md, qd, BandwidthRule::knn(grid), Kernel::quadratic());
    const auto b = brute_force(d, q, grid);
    CHECK(choice.kappa == b.kappa);
    CHECK(choice.h == doctest::Approx(b.h).epsilon(1e-10));
    REQUIRE(choice.scores.size() == 3);
    for (std::size_t g = 0; g < 3; ++g)
      CHECK(choice.scores[g] == doctest::Approx(b.scores[g]).epsilon(1e-9));
    CHECK(choice.kappas == grid);
  }
}

TEST_CASE("knn radius is monotone in kappa and the validator is deterministic") {
  std::mt19937_64 rng(9);
  const auto d = testsupport::random_data(rng, 40, 6);
  MetricDataset md(d.dataset(), SemiMetric::l2());
  const auto qd = md.distances(md.query_features(Curve(d.grid, d.curves[5])));
  double prev = 0.0;
  for (std::size_t k = 1; k <= qd.size(); ++k) {
    const double r = knn_radius(qd, k);
    CHECK(r >= prev);
    prev = r;
  }
  KnnCrossValidator a(md, BandwidthRule::knn({2, 3, 5, 8}), Kernel::quadratic());
  KnnCrossValidator b(md, BandwidthRule::knn({8, 5, 3, 2}), Kernel::quadratic());
  const auto ca = a.select(qd);
  const auto cb = b.select(qd);
  CHECK(ca.kappa == cb.kappa);
  CHECK(ca.h == cb.h);
  CHECK(ca.scores == cb.scores);
  // cached predictions give the same answer on a second query
  const auto again = a.select(qd);
  CHECK(again.scores == ca.scores);
}

TEST_CASE("kappa larger than the observed count") {
  std::mt19937_64 rng(10);
  auto d = testsupport::random_data(rng, 8, 5, 0.0);
  MetricDataset md(d.dataset(), SemiMetric::l2());
  const Curve x(d.grid, d.curves[0]);
  try {
    resolve_bandwidth(md, x, BandwidthRule::knn({3, 20}), Kernel::quadratic());
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientData);
  }
  // the default grid clips to the data instead
  CHECK(resolve_bandwidth(md, x, BandwidthRule::knn_default(), Kernel::quadratic()) > 0.0);

  d.zeta.assign(d.zeta.size(), 0);
  d.zeta[0] = 1;
  MetricDataset lone(d.dataset(), SemiMetric::l2());
  CHECK_THROWS_AS(resolve_bandwidth(lone, x, BandwidthRule::knn({1}), Kernel::quadratic()), Error);
}

TEST_CASE("temporal blocking drops neighbours in time") {
  std::mt19937_64 rng(11);
  const auto d = testsupport::random_data(rng, 30, 5, 0.0);
  MetricDataset md(d.dataset(), SemiMetric::l2());
  auto rule = BandwidthRule::knn({2, 4});
  KnnCrossValidator plain(md, rule, Kernel::quadratic());
  rule.cv_block = 0.25;  // delta is 0.1: drops two neighbours on each side
  KnnCrossValidator blocked(md, rule, Kernel::quadratic());
  const auto& p = plain.loo_predictions(10);
  const auto& b = blocked.loo_predictions(10);
  CHECK(p.size() == 2);
  CHECK(b.size() == 2);
  bool differs = false;
  for (std::size_t i = 0; i < 2; ++i) differs = differs || p[i] != b[i];
  CHECK(differs);
}
