#include "ftkreg/ftkreg.h"

#include <exception>
#include <memory>
#include <new>
#include <string>

#include "ftkreg/error.hpp"
#include "ftkreg/harness.hpp"
#include "ftkreg/inference.hpp"
#include "ftkreg/io.hpp"

struct ftkreg_dataset {
  std::shared_ptr<const ftkreg::FunctionalDataset> data;
};

struct ftkreg_curve {
  ftkreg::Curve curve;
};

struct ftkreg_config {
  ftkreg::EstimatorConfig cfg;
};

namespace {

thread_local std::string last_error;

ftkreg_status set_error(ftkreg_status s, const char* what) {
  last_error = what;
  return s;
}

// Runs f, translating exceptions into status codes.
template <class F>
ftkreg_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return FTKREG_OK;
  } catch (const ftkreg::Error& e) {
    return set_error(static_cast<ftkreg_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(FTKREG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(FTKREG_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(FTKREG_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* name) {
  if (!p) ftkreg::fail(ftkreg::ErrorCode::InvalidArgument, std::string(name) + " is null");
}

ftkreg::MetricDataset metric_view(const ftkreg_dataset* ds, const ftkreg_config* cfg) {
  return ftkreg::MetricDataset(ds->data, cfg->cfg.metric);
}

}  // namespace

extern "C" {

const char* ftkreg_version(void) {
  static const std::string v = ftkreg::library_version();
  return v.c_str();
}

const char* ftkreg_status_name(ftkreg_status status) {
  if (status == FTKREG_OK) return "ok";
  if (status == FTKREG_ERR_INTERNAL) return "internal";
  if (status >= 1 && status <= 13) return ftkreg::to_string(static_cast<ftkreg::ErrorCode>(status));
  return "unknown";
}

const char* ftkreg_last_error(void) { return last_error.c_str(); }

ftkreg_status ftkreg_dataset_load(const char* path, ftkreg_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto ds = std::make_shared<const ftkreg::FunctionalDataset>(ftkreg::read_dataset_csv(std::string(path)));
    *out = new ftkreg_dataset{std::move(ds)};
  });
}

ftkreg_status ftkreg_dataset_save(const ftkreg_dataset* ds, const char* path) {
  return guarded([&] {
    require(ds, "dataset");
    require(path, "path");
    ftkreg::write_dataset_csv(*ds->data, std::string(path));
  });
}

ftkreg_status ftkreg_dataset_create(double grid_start, double grid_end, size_t n_points,
                                    double delta, size_t n, const double* times,
                                    const uint8_t* zeta, const double* y, const double* values,
                                    ftkreg_dataset** out) {
  return guarded([&] {
    require(out, "out");
    if (n > 0) {
      require(times, "times");
      require(zeta, "zeta");
      require(y, "y");
      require(values, "values");
    }
    ftkreg::Grid grid(grid_start, grid_end, n_points);
    std::vector<double> t(times, times + n), yy(y, y + n), v(values, values + n * n_points);
    std::vector<std::uint8_t> z(zeta, zeta + n);
    auto ds = std::make_shared<const ftkreg::FunctionalDataset>(grid, delta, std::move(t),
                                                                std::move(z), std::move(yy),
                                                                std::move(v));
    *out = new ftkreg_dataset{std::move(ds)};
  });
}

void ftkreg_dataset_free(ftkreg_dataset* ds) { delete ds; }

size_t ftkreg_dataset_size(const ftkreg_dataset* ds) { return ds ? ds->data->size() : 0; }

size_t ftkreg_dataset_grid_points(const ftkreg_dataset* ds) {
  return ds ? ds->data->grid().size() : 0;
}

size_t ftkreg_dataset_observed_count(const ftkreg_dataset* ds) {
  return ds ? ds->data->observed_count() : 0;
}

double ftkreg_dataset_delta(const ftkreg_dataset* ds) { return ds ? ds->data->delta() : 0.0; }

ftkreg_status ftkreg_curve_load(const char* path, const ftkreg_dataset* like, ftkreg_curve** out) {
  return guarded([&] {
    require(path, "path");
    require(like, "dataset");
    require(out, "out");
    *out = new ftkreg_curve{ftkreg::read_curve_csv(std::string(path), like->data->grid())};
  });
}

ftkreg_status ftkreg_curve_create(const ftkreg_dataset* like, const double* values,
                                  size_t n_points, ftkreg_curve** out) {
  return guarded([&] {
    require(like, "dataset");
    require(values, "values");
    require(out, "out");
    if (n_points != like->data->grid().size())
      ftkreg::fail(ftkreg::ErrorCode::GridMismatch, "curve length differs from the dataset grid");
    *out = new ftkreg_curve{
        ftkreg::Curve(like->data->grid(), std::vector<double>(values, values + n_points))};
  });
}

void ftkreg_curve_free(ftkreg_curve* curve) { delete curve; }

ftkreg_status ftkreg_config_create(ftkreg_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ftkreg_config{};
  });
}

ftkreg_status ftkreg_config_from_json(const char* json, ftkreg_config** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new ftkreg_config{ftkreg::estimator_config_from_json(json)};
  });
}

ftkreg_status ftkreg_config_load(const char* path, ftkreg_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ftkreg_config{
        ftkreg::estimator_config_from_json(ftkreg::read_text_file(std::string(path)))};
  });
}

ftkreg_status ftkreg_config_set_semimetric(ftkreg_config* cfg, const char* name) {
  return guarded([&] {
    require(cfg, "config");
    require(name, "name");
    cfg->cfg.metric = ftkreg::parse_semimetric(name);
  });
}

ftkreg_status ftkreg_config_set_fixed_bandwidth(ftkreg_config* cfg, double h) {
  return guarded([&] {
    require(cfg, "config");
    if (!(h > 0.0)) ftkreg::fail(ftkreg::ErrorCode::InvalidArgument, "bandwidth must be positive");
    cfg->cfg.bandwidth = ftkreg::BandwidthRule::fixed(h);
  });
}

ftkreg_status ftkreg_config_set_knn(ftkreg_config* cfg, const size_t* kappas, size_t count) {
  return guarded([&] {
    require(cfg, "config");
    require(kappas, "kappas");
    cfg->cfg.bandwidth = ftkreg::BandwidthRule::knn({kappas, kappas + count});
  });
}

void ftkreg_config_free(ftkreg_config* cfg) { delete cfg; }

ftkreg_status ftkreg_regress(const ftkreg_dataset* ds, const ftkreg_curve* x,
                             const ftkreg_config* cfg, double* out, double* h_out) {
  return guarded([&] {
    require(ds, "dataset");
    require(x, "curve");
    require(cfg, "config");
    require(out, "out");
    const auto md = metric_view(ds, cfg);
    const auto w = ftkreg::make_profile(md, x->curve, cfg->cfg);
    *out = ftkreg::regress(w, ftkreg::Psi::identity());
    if (h_out) *h_out = w.bandwidth();
  });
}

ftkreg_status ftkreg_cdf(const ftkreg_dataset* ds, const ftkreg_curve* x,
                         const ftkreg_config* cfg, double y, double* out) {
  return guarded([&] {
    require(ds, "dataset");
    require(x, "curve");
    require(cfg, "config");
    require(out, "out");
    *out = ftkreg::estimate_cdf(metric_view(ds, cfg), x->curve, y, cfg->cfg);
  });
}

ftkreg_status ftkreg_quantile(const ftkreg_dataset* ds, const ftkreg_curve* x,
                              const ftkreg_config* cfg, double alpha, double* out) {
  return guarded([&] {
    require(ds, "dataset");
    require(x, "curve");
    require(cfg, "config");
    require(out, "out");
    *out = ftkreg::estimate_quantile(metric_view(ds, cfg), x->curve, alpha, cfg->cfg);
  });
}

void ftkreg_ci_request_init(ftkreg_ci_request* req) {
  if (!req) return;
  req->psi = FTKREG_PSI_IDENTITY;
  req->psi_arg = 0.0;
  req->level = 0.95;
  req->method = FTKREG_CI_ASYMPTOTIC;
  req->B = 1000;
  req->seed = 42;
  req->law = FTKREG_WEIGHTS_EXPONENTIAL;
  req->threads = 1;
}

ftkreg_status ftkreg_ci(const ftkreg_dataset* ds, const ftkreg_curve* x,
                        const ftkreg_config* cfg, const ftkreg_ci_request* req,
                        ftkreg_ci_result* out) {
  return guarded([&] {
    require(ds, "dataset");
    require(x, "curve");
    require(cfg, "config");
    require(req, "request");
    require(out, "out");
    if (!(req->level > 0.0 && req->level < 1.0))
      ftkreg::fail(ftkreg::ErrorCode::InvalidArgument, "level must lie in (0, 1)");
    const double alpha = 1.0 - req->level;
    const auto md = metric_view(ds, cfg);
    const auto w = ftkreg::make_profile(md, x->curve, cfg->cfg);

    ftkreg::CIResult r;
    if (req->psi == FTKREG_PSI_QUANTILE) {
      if (req->method != FTKREG_CI_ASYMPTOTIC)
        ftkreg::fail(ftkreg::ErrorCode::InvalidArgument,
                     "quantile intervals are asymptotic only");
      r = ftkreg::ci_quantile(w, req->psi_arg, alpha, cfg->cfg);
    } else {
      ftkreg::CIRequest cr;
      if (req->psi == FTKREG_PSI_CDF)
        cr.psi = ftkreg::Psi::indicator(req->psi_arg);
      else if (req->psi != FTKREG_PSI_IDENTITY)
        ftkreg::fail(ftkreg::ErrorCode::InvalidArgument, "unknown psi kind");
      cr.alpha = alpha;
      cr.method = req->method == FTKREG_CI_BOOTSTRAP ? ftkreg::CIMethod::Bootstrap
                                                     : ftkreg::CIMethod::Asymptotic;
      cr.B = req->B;
      cr.seed = req->seed;
      cr.law = req->law == FTKREG_WEIGHTS_MULTINOMIAL ? ftkreg::WeightLaw::Multinomial
                                                      : ftkreg::WeightLaw::UnitExponential;
      cr.threads = req->threads;
      r = ftkreg::confidence_interval(w, cr, cfg->cfg);
    }
    out->point = r.point;
    out->lower = r.lower;
    out->upper = r.upper;
    out->h = r.h;
    out->p_hat = r.components.p;
    out->Fx_hat = r.components.Fx;
    out->M1 = r.components.M1;
    out->M2 = r.components.M2;
    out->W2bar = r.components.W2bar;
    out->critical_value = r.quantile_used;
  });
}

ftkreg_status ftkreg_simulate(const char* spec_json, ftkreg_dataset** out) {
  return guarded([&] {
    require(spec_json, "spec");
    require(out, "out");
    const auto spec = ftkreg::sim_spec_from_json(spec_json);
    *out = new ftkreg_dataset{
        std::make_shared<const ftkreg::FunctionalDataset>(ftkreg::generate(spec))};
  });
}

ftkreg_status ftkreg_run_sim1(const char* config_json, const char* out_dir, unsigned threads) {
  return guarded([&] {
    require(config_json, "config");
    require(out_dir, "out_dir");
    const auto cfg = ftkreg::sim1_config_from_json(config_json);
    const auto res = ftkreg::run_sim1(cfg, threads);
    ftkreg::write_sim1(cfg, res, out_dir);
  });
}

ftkreg_status ftkreg_run_sim2(const char* config_json, const char* out_dir, unsigned threads) {
  return guarded([&] {
    require(config_json, "config");
    require(out_dir, "out_dir");
    const auto cfg = ftkreg::sim2_config_from_json(config_json);
    const auto res = ftkreg::run_sim2(cfg, threads);
    ftkreg::write_sim2(cfg, res, out_dir);
  });
}

}  // extern "C"
