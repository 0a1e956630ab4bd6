#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "ftkreg/ftkreg.h"

namespace {

// y = 2 a for constant curves at level a; odd instants are missing.
ftkreg_dataset* make_dataset(size_t n) {
  std::vector<double> t, y, v;
  std::vector<uint8_t> z;
  for (size_t k = 0; k < n; ++k) {
    const double a = static_cast<double>(k) / static_cast<double>(n);
    t.push_back(static_cast<double>(k + 1) * 0.5);
    z.push_back(k % 2 == 0);
    y.push_back(2.0 * a);
    for (int i = 0; i < 4; ++i) v.push_back(a);
  }
  ftkreg_dataset* ds = nullptr;
  REQUIRE(ftkreg_dataset_create(0.0, 1.0, 4, 0.5, n, t.data(), z.data(), y.data(), v.data(), &ds) ==
          FTKREG_OK);
  return ds;
}

}  // namespace

TEST_CASE("status names and last error") {
  CHECK(std::string(ftkreg_status_name(FTKREG_OK)) == "ok");
  CHECK(std::string(ftkreg_status_name(FTKREG_ERR_DENSITY_FLOOR_HIT)) == "density_floor_hit");
  CHECK(std::strlen(ftkreg_version()) > 0);

  ftkreg_dataset* ds = nullptr;
  CHECK(ftkreg_dataset_load("/nonexistent/data.csv", &ds) == FTKREG_ERR_IO);
  CHECK(ds == nullptr);
  CHECK(std::strlen(ftkreg_last_error()) > 0);
  ftkreg_config* cfg = nullptr;
  CHECK(ftkreg_config_from_json("{", &cfg) == FTKREG_ERR_PARSE);
  CHECK(ftkreg_config_create(&cfg) == FTKREG_OK);
  CHECK(std::string(ftkreg_last_error()).empty());
  CHECK(ftkreg_config_set_fixed_bandwidth(cfg, -1.0) == FTKREG_ERR_INVALID_ARGUMENT);
  CHECK(ftkreg_config_set_semimetric(cfg, "nope") != FTKREG_OK);
  CHECK(ftkreg_config_set_semimetric(cfg, "l2deriv1") == FTKREG_OK);
  ftkreg_config_free(cfg);
  CHECK(ftkreg_config_create(nullptr) == FTKREG_ERR_INVALID_ARGUMENT);
}

TEST_CASE("estimates through handles") {
  ftkreg_dataset* ds = make_dataset(60);
  CHECK(ftkreg_dataset_size(ds) == 60);
  CHECK(ftkreg_dataset_grid_points(ds) == 4);
  CHECK(ftkreg_dataset_observed_count(ds) == 30);
  CHECK(ftkreg_dataset_delta(ds) == 0.5);

  const double q[4] = {0.5, 0.5, 0.5, 0.5};
  ftkreg_curve* x = nullptr;
  REQUIRE(ftkreg_curve_create(ds, q, 4, &x) == FTKREG_OK);
  ftkreg_curve* bad = nullptr;
  CHECK(ftkreg_curve_create(ds, q, 3, &bad) == FTKREG_ERR_GRID_MISMATCH);

  ftkreg_config* cfg = nullptr;
  REQUIRE(ftkreg_config_create(&cfg) == FTKREG_OK);
  REQUIRE(ftkreg_config_set_fixed_bandwidth(cfg, 0.1) == FTKREG_OK);
  double m = 0.0, h = 0.0;
  CHECK(ftkreg_regress(ds, x, cfg, &m, &h) == FTKREG_OK);
  CHECK(h == 0.1);
  CHECK(std::abs(m - 1.0) < 0.05);
  double F = 0.0;
  CHECK(ftkreg_cdf(ds, x, cfg, 10.0, &F) == FTKREG_OK);
  CHECK(F == 1.0);
  double qv = 0.0;
  CHECK(ftkreg_quantile(ds, x, cfg, 0.5, &qv) == FTKREG_OK);
  CHECK(std::abs(qv - 1.0) < 0.1);

  const size_t kappas[3] = {3, 5, 8};
  REQUIRE(ftkreg_config_set_knn(cfg, kappas, 3) == FTKREG_OK);
  CHECK(ftkreg_regress(ds, x, cfg, &m, nullptr) == FTKREG_OK);

  ftkreg_ci_request req;
  ftkreg_ci_request_init(&req);
  CHECK(req.level == 0.95);
  CHECK(req.B == 1000);
  ftkreg_ci_result r;
  CHECK(ftkreg_ci(ds, x, cfg, &req, &r) == FTKREG_OK);
  CHECK(r.lower <= r.point);
  CHECK(r.point <= r.upper);
  CHECK(r.p_hat > 0.0);

  req.method = FTKREG_CI_BOOTSTRAP;
  req.B = 200;
  ftkreg_ci_result b1, b2;
  CHECK(ftkreg_ci(ds, x, cfg, &req, &b1) == FTKREG_OK);
  req.threads = 3;
  CHECK(ftkreg_ci(ds, x, cfg, &req, &b2) == FTKREG_OK);
  CHECK(b1.lower == b2.lower);
  CHECK(b1.upper == b2.upper);

  req.psi = FTKREG_PSI_QUANTILE;
  req.psi_arg = 0.5;
  CHECK(ftkreg_ci(ds, x, cfg, &req, &b1) == FTKREG_ERR_INVALID_ARGUMENT);
  req.method = FTKREG_CI_ASYMPTOTIC;
  CHECK(ftkreg_ci(ds, x, cfg, &req, &b1) == FTKREG_OK);
  req.level = 1.5;
  CHECK(ftkreg_ci(ds, x, cfg, &req, &b1) == FTKREG_ERR_INVALID_ARGUMENT);

  ftkreg_curve_free(x);
  ftkreg_config_free(cfg);
  ftkreg_dataset_free(ds);
}

TEST_CASE("dataset files and simulation") {
  ftkreg_dataset* ds = nullptr;
  REQUIRE(ftkreg_simulate(R"({"model": "sine_shape", "T": 6, "delta": 0.3, "seed": 4})", &ds) ==
          FTKREG_OK);
  CHECK(ftkreg_dataset_size(ds) == 20);
  const auto path = (std::filesystem::temp_directory_path() / "ftkreg_capi.csv").string();
  CHECK(ftkreg_dataset_save(ds, path.c_str()) == FTKREG_OK);
  ftkreg_dataset* back = nullptr;
  CHECK(ftkreg_dataset_load(path.c_str(), &back) == FTKREG_OK);
  CHECK(ftkreg_dataset_size(back) == 20);
  CHECK(ftkreg_dataset_grid_points(back) == ftkreg_dataset_grid_points(ds));
  std::filesystem::remove(path);
  ftkreg_dataset_free(back);
  ftkreg_dataset_free(ds);

  CHECK(ftkreg_simulate(R"({"T": 1, "delta": 0.3})", &ds) == FTKREG_ERR_SPEC_INVALID);
  CHECK(ftkreg_run_sim2(R"({"N": 0})", "/tmp/ftkreg_capi_sim2", 1) != FTKREG_OK);
}
