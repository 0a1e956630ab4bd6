#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ftkreg/error.hpp"
#include "ftkreg/harness.hpp"
#include "ftkreg/io.hpp"
#include "support.hpp"

using namespace ftkreg;
namespace fs = std::filesystem;

namespace {

Sim1Config tiny_sim1() {
  Sim1Config c;
  c.T_values = {10.0, 20.0};
  c.mar_rates = {0.0, 0.3};
  c.delta = 0.1;
  c.M = 3;
  c.model.grid = Grid(-1.0, 1.0, 40);
  return c;
}

Sim2Config tiny_sim2() {
  Sim2Config c;
  c.n_fixed = 40;
  c.delta_grid = {0.2, 0.4};
  c.eval_curves = 6;
  c.N = 3;
  c.mar_rates = {0.0, 0.3};
  c.model.grid = Grid(0.0, c.model.grid.end(), 30);
  return c;
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
  return out;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("ftkreg_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("kappa grid from fractions") {
  const std::vector<double> f{0.01, 0.1, 0.5, 0.9};
  CHECK(kappa_grid(f, 100) == std::vector<std::size_t>{2, 10, 50, 90});
  CHECK(kappa_grid(f, 10) == std::vector<std::size_t>{2, 5, 9});
  CHECK(kappa_grid(f, 2) == std::vector<std::size_t>{1});
}

TEST_CASE("fallback regression reproduces constant responses") {
  std::mt19937_64 rng(3);
  auto d = testsupport::random_data(rng, 30, 6, 0.3);
  d.y.assign(d.y.size(), 1.75);
  MetricDataset md(d.dataset(), SemiMetric::l2());
  EstimatorConfig cfg;
  cfg.bandwidth = BandwidthRule::knn({2, 4, 8});
  KnnCrossValidator v(md, cfg.bandwidth, cfg.kernel);
  for (std::size_t k = 0; k < d.curves.size(); k += 3) {
    const auto q = md.query_features(Curve(d.grid, d.curves[k]));
    const double m = regress_with_fallback(md, q, cfg, &v);
    CHECK(m == 1.75);  // squared error 0
  }
  // a far query has no observed response in reach of a tiny fixed ball
  cfg.bandwidth = BandwidthRule::fixed(1e-9);
  bool fell = false;
  const auto far = md.query_features(Curve(d.grid, std::vector<double>(6, 40.0)));
  CHECK(regress_with_fallback(md, far, cfg, nullptr, &fell) == 1.75);
  CHECK(fell);
}

TEST_CASE("continuous versus discrete table") {
  const auto cfg = tiny_sim1();
  const auto res = run_sim1(cfg, 2);
  REQUIRE(res.rows.size() == 4);
  REQUIRE(res.replicates.size() == 12);
  CHECK(std::isnan(res.mar_offsets[0]));
  CHECK(std::isfinite(res.mar_offsets[1]));
  for (const auto& r : res.replicates) {
    CHECK(r.n_continuous == static_cast<std::size_t>(std::lround(r.T / 0.1)));
    CHECK(r.n_discrete == static_cast<std::size_t>(std::lround(r.T)));
  }
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& row = res.rows[i];
    CHECK(row.T == cfg.T_values[i / 2]);
    CHECK(row.mar == cfg.mar_rates[i % 2]);
    CHECK(row.continuous.q25 <= row.continuous.median);
    CHECK(row.continuous.median <= row.continuous.q75);
    CHECK(row.continuous.q25 >= 0.0);
    if (row.mar == 0.0) CHECK(row.failrate == 0.0);
  }

  const auto again = run_sim1(cfg, 1);
  for (std::size_t i = 0; i < res.replicates.size(); ++i) {
    CHECK(res.replicates[i].se_continuous == again.replicates[i].se_continuous);
    CHECK(res.replicates[i].se_discrete == again.replicates[i].se_discrete);
  }

  const auto dir = scratch("sim1");
  write_sim1(cfg, res, dir.string());
  const auto t = lines(dir / "table1.csv");
  REQUIRE(t.size() == 1 + 4 * 4);
  CHECK(t[0] == "T,mar,stat,continuous,discrete,failrate");
  CHECK(split(t[1])[2] == "q25");
  CHECK(split(t[4])[2] == "q75");
  CHECK(lines(dir / "se_replicates.csv").size() == 13);
  CHECK(fs::exists(dir / "meta.json"));
  fs::remove_all(dir);
}

TEST_CASE("sampling mesh experiment") {
  auto cfg = tiny_sim2();
  const auto res = run_sim2(cfg, 3);
  REQUIRE(res.cells.size() == 4);
  REQUIRE(res.ise.size() == 12);
  for (std::size_t c = 0; c < res.cells.size(); ++c) {
    const auto& cell = res.cells[c];
    CHECK(cell.mise >= 0.0);
    double s = 0.0;
    std::size_t ok = 0;
    for (std::size_t r = 0; r < cfg.N; ++r) {
      const double v = res.ise[c * cfg.N + r];
      if (std::isnan(v)) continue;
      CHECK(v >= 0.0);
      s += v;
      ++ok;
    }
    CHECK(ok + cell.failures == cfg.N);
    CHECK(cell.mise == doctest::Approx(s / static_cast<double>(ok)).epsilon(1e-12));
  }
  for (std::size_t m = 0; m < cfg.mar_rates.size(); ++m) {
    const double a = res.cells[2 * m].mise, b = res.cells[2 * m + 1].mise;
    CHECK(res.delta_star[m] == (b < a ? 0.4 : 0.2));
    CHECK(res.mise_star[m] == std::min(a, b));
  }

  const auto one = run_sim2(cfg, 1);
  CHECK(one.ise.size() == res.ise.size());
  for (std::size_t i = 0; i < res.ise.size(); ++i)
    CHECK((one.ise[i] == res.ise[i] || (std::isnan(one.ise[i]) && std::isnan(res.ise[i]))));

  const auto dir = scratch("sim2");
  write_sim2(cfg, res, dir.string());
  const auto mise = lines(dir / "mise.csv");
  REQUIRE(mise.size() == 5);
  CHECK(mise[0] == "mar,delta,mise,se_of_mise");
  // the replicate file reproduces the table
  const auto reps = lines(dir / "mise_replicates.csv");
  REQUIRE(reps.size() == 13);
  for (std::size_t c = 0; c < 4; ++c) {
    double s = 0.0;
    std::size_t ok = 0;
    for (std::size_t r = 0; r < cfg.N; ++r) {
      const auto cols = split(reps[1 + c * cfg.N + r]);
      if (cols[3] == "NA") continue;
      s += parse_double(cols[3]);
      ++ok;
    }
    CHECK(std::abs(parse_double(split(mise[1 + c])[2]) - s / static_cast<double>(ok)) < 1e-12);
  }
  CHECK(lines(dir / "delta_star.csv").size() == 3);
  const auto svg = lines(dir / "mise.svg");
  REQUIRE(!svg.empty());
  CHECK(svg[0].rfind("<svg", 0) == 0);
  fs::remove_all(dir);

  cfg.delta_grid = {0.3};
  const auto single = run_sim2(cfg, 1);
  for (double d : single.delta_star) CHECK(d == 0.3);
}

TEST_CASE("experiment configs") {
  const auto c = sim1_config_from_json(R"({"M": 7, "T_values": [5], "semimetric": "l2"})");
  CHECK(c.M == 7);
  CHECK(c.T_values == std::vector<double>{5.0});
  CHECK(c.metric == SemiMetric::l2());
  CHECK(c.model.model == SimSpec::Model::LegendreLift);
  const auto back = sim1_config_from_json(sim1_config_to_json(c));
  CHECK(sim1_config_to_json(back) == sim1_config_to_json(c));

  const auto d = sim2_config_from_json(R"({"N": 4, "model": {"noise": {"sd": 0.1}}})");
  CHECK(d.N == 4);
  CHECK(d.model.model == SimSpec::Model::SineShape);
  CHECK(d.model.noise_sd == 0.1);
  CHECK(sim2_config_to_json(sim2_config_from_json(sim2_config_to_json(d))) == sim2_config_to_json(d));
  CHECK_THROWS_AS(sim1_config_from_json(R"({"M": 0})"), Error);
  CHECK_THROWS_AS(sim2_config_from_json(R"({"delta_grid": []})"), Error);
}
