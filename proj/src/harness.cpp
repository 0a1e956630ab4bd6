#include "ftkreg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "ftkreg/error.hpp"
#include "ftkreg/io.hpp"
#include "json.hpp"

#ifndef FTKREG_VERSION_STRING
#define FTKREG_VERSION_STRING "0.0.0"
#endif

namespace ftkreg {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kQueryStream = 5;
constexpr std::uint64_t kEvalStream = 0xe7a1;

bool is_integer_ratio(double a, double b) {
  const double r = a / b;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

void check_rates(const std::vector<double>& rates) {
  if (rates.empty()) fail(ErrorCode::SpecInvalid, "mar_rates must not be empty");
  for (double r : rates)
    if (!(r >= 0.0 && r < 1.0)) fail(ErrorCode::SpecInvalid, "mar rates must lie in [0, 1)");
}

void check_fractions(const std::vector<double>& f) {
  if (f.empty()) fail(ErrorCode::SpecInvalid, "kappa_fractions must not be empty");
  for (double v : f)
    if (!(v > 0.0 && v <= 1.0)) fail(ErrorCode::SpecInvalid, "kappa fractions must lie in (0, 1]");
}

std::vector<double> calibrate_offsets(const SimSpec& model, const std::vector<double>& rates) {
  std::vector<double> out;
  for (double r : rates) out.push_back(r == 0.0 ? kNaN : calibrate_mar_offset(model, r));
  return out;
}

void apply_mar(SimSpec& spec, double offset) {
  if (std::isnan(offset)) {
    spec.mar = SimSpec::Mar::None;
  } else {
    spec.mar = SimSpec::Mar::Expit;
    spec.mar_offset = offset;
  }
}

EstimatorConfig knn_config(const FunctionalDataset& ds, const SemiMetric& metric,
                           const std::vector<double>& fractions, double cv_block,
                           std::size_t max_validation) {
  EstimatorConfig ec;
  ec.metric = metric;
  ec.bandwidth = BandwidthRule::knn(kappa_grid(fractions, ds.observed_count()));
  ec.bandwidth.cap_to_data = true;
  ec.bandwidth.cv_block = cv_block;
  ec.bandwidth.max_validation = max_validation;
  return ec;
}

// Runs task(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
  }
  if (error) std::rethrow_exception(error);
}

Summary summarize_present(const std::vector<double>& v) {
  if (v.empty()) return {kNaN, kNaN, kNaN, kNaN};
  return summarize_se(v);
}

std::string fmt_or_na(double v) { return std::isnan(v) ? "NA" : format_double(v); }

std::string rate_label(double r) { return format_double(r); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create directory '" + dir + "': " + ec.message());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

json parse_object(std::string_view text, const char* what) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::Parse, std::string(what) + " must be a JSON object");
  return j;
}

template <class T>
void read_key(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("bad value for '") + key + "': " + e.what());
  }
}

SimSpec read_model(const json& j, const char* default_model, const SimSpec& fallback) {
  if (!j.contains("model")) return fallback;
  json m = j.at("model");
  if (!m.is_object()) fail(ErrorCode::Parse, "'model' must be a JSON object");
  if (!m.contains("model")) m["model"] = default_model;
  return sim_spec_from_json(m.dump());
}

json offsets_json(const std::vector<double>& rates, const std::vector<double>& offsets) {
  json out = json::array();
  for (std::size_t i = 0; i < rates.size(); ++i)
    out.push_back({{"rate", rates[i]}, {"offset", std::isnan(offsets[i]) ? json() : json(offsets[i])}});
  return out;
}

}  // namespace

std::string library_version() { return FTKREG_VERSION_STRING; }

void Sim1Config::validate() const {
  if (M < 2) fail(ErrorCode::SpecInvalid, "M must be at least 2");
  if (T_values.empty()) fail(ErrorCode::SpecInvalid, "T_values must not be empty");
  if (!(delta > 0.0 && delta <= 1.0) || !is_integer_ratio(1.0, delta))
    fail(ErrorCode::SpecInvalid, "delta must divide 1");
  for (double T : T_values)
    if (!(T >= 1.0) || !is_integer_ratio(T, delta) || !is_integer_ratio(T, 1.0))
      fail(ErrorCode::SpecInvalid, "each T must be a positive integer multiple of delta");
  check_rates(mar_rates);
  check_fractions(kappa_fractions);
  if (!(cv_block >= 0.0)) fail(ErrorCode::SpecInvalid, "cv_block must be >= 0");
  if (model.model != SimSpec::Model::LegendreLift && model.model != SimSpec::Model::SineShape)
    fail(ErrorCode::SpecInvalid, "unknown model");
}

void Sim2Config::validate() const {
  if (n_fixed < 2) fail(ErrorCode::SpecInvalid, "n_fixed must be at least 2");
  if (delta_grid.empty()) fail(ErrorCode::SpecInvalid, "delta_grid must not be empty");
  for (double d : delta_grid)
    if (!(d > 0.0) || !std::isfinite(d)) fail(ErrorCode::SpecInvalid, "deltas must be positive");
  if (eval_curves == 0) fail(ErrorCode::SpecInvalid, "eval_curves must be positive");
  if (N < 1) fail(ErrorCode::SpecInvalid, "N must be positive");
  check_rates(mar_rates);
  check_fractions(kappa_fractions);
  if (!(cv_block >= 0.0)) fail(ErrorCode::SpecInvalid, "cv_block must be >= 0");
}

Sim1Config sim1_config_from_json(std::string_view text) {
  const json j = parse_object(text, "sim1 config");
  Sim1Config c;
  read_key(j, "T_values", c.T_values);
  read_key(j, "mar_rates", c.mar_rates);
  read_key(j, "delta", c.delta);
  read_key(j, "M", c.M);
  read_key(j, "seed", c.seed);
  read_key(j, "kappa_fractions", c.kappa_fractions);
  read_key(j, "cv_block", c.cv_block);
  read_key(j, "max_validation", c.max_validation);
  if (j.contains("semimetric")) {
    std::string m;
    read_key(j, "semimetric", m);
    c.metric = parse_semimetric(m);
  }
  c.model = read_model(j, "legendre_lift", c.model);
  c.validate();
  return c;
}

std::string sim1_config_to_json(const Sim1Config& c) {
  json j;
  j["T_values"] = c.T_values;
  j["mar_rates"] = c.mar_rates;
  j["delta"] = c.delta;
  j["M"] = c.M;
  j["seed"] = c.seed;
  j["kappa_fractions"] = c.kappa_fractions;
  j["cv_block"] = c.cv_block;
  j["max_validation"] = c.max_validation;
  j["semimetric"] = to_string(c.metric);
  j["model"] = json::parse(sim_spec_to_json(c.model));
  return j.dump(2);
}

Sim2Config sim2_config_from_json(std::string_view text) {
  const json j = parse_object(text, "sim2 config");
  Sim2Config c;
  read_key(j, "n_fixed", c.n_fixed);
  read_key(j, "delta_grid", c.delta_grid);
  read_key(j, "eval_curves", c.eval_curves);
  read_key(j, "N", c.N);
  read_key(j, "mar_rates", c.mar_rates);
  read_key(j, "seed", c.seed);
  read_key(j, "kappa_fractions", c.kappa_fractions);
  read_key(j, "cv_block", c.cv_block);
  read_key(j, "max_validation", c.max_validation);
  if (j.contains("semimetric")) {
    std::string m;
    read_key(j, "semimetric", m);
    c.metric = parse_semimetric(m);
  }
  c.model = read_model(j, "sine_shape", c.model);
  c.validate();
  return c;
}

std::string sim2_config_to_json(const Sim2Config& c) {
  json j;
  j["n_fixed"] = c.n_fixed;
  j["delta_grid"] = c.delta_grid;
  j["eval_curves"] = c.eval_curves;
  j["N"] = c.N;
  j["mar_rates"] = c.mar_rates;
  j["seed"] = c.seed;
  j["kappa_fractions"] = c.kappa_fractions;
  j["cv_block"] = c.cv_block;
  j["max_validation"] = c.max_validation;
  j["semimetric"] = to_string(c.metric);
  j["model"] = json::parse(sim_spec_to_json(c.model));
  return j.dump(2);
}

std::vector<std::size_t> kappa_grid(std::span<const double> fractions, std::size_t observed) {
  if (observed < 3) return {1};
  std::vector<std::size_t> out;
  for (double f : fractions) {
    const auto k = static_cast<std::size_t>(std::llround(f * static_cast<double>(observed)));
    out.push_back(std::clamp<std::size_t>(k, 2, observed - 1));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double regress_with_fallback(const MetricDataset& data, std::span<const double> query_features,
                             const EstimatorConfig& cfg, KnnCrossValidator* validator,
                             bool* fell_back) {
  if (fell_back) *fell_back = false;
  auto profile = make_profile(data, query_features, cfg, validator);
  try {
    return regress(profile, Psi::identity());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyNeighborhood) throw;
  }
  const auto& ds = data.data();
  const auto dist = profile.distances();
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ds.size(); ++k)
    if (ds.observed(k)) nearest = std::min(nearest, dist[k]);
  if (!std::isfinite(nearest))
    fail(ErrorCode::EmptyNeighborhood, "dataset has no observed response");
  const double h = nearest > 0.0 ? nearest * (1.0 + 1e-12) : DBL_MIN;
  if (fell_back) *fell_back = true;
  WeightProfile wide(data, {dist.begin(), dist.end()}, h, cfg.kernel);
  return regress(wide, Psi::identity());
}

Sim1Result run_sim1(const Sim1Config& cfg, unsigned threads) {
  cfg.validate();
  Sim1Result res;
  res.mar_offsets = calibrate_offsets(cfg.model, cfg.mar_rates);
  const std::size_t n_rates = cfg.mar_rates.size();
  const std::size_t n_cells = cfg.T_values.size() * n_rates;
  const auto stride = static_cast<std::size_t>(std::llround(1.0 / cfg.delta));

  res.replicates.resize(n_cells * cfg.M);
  parallel_for(res.replicates.size(), threads, [&](std::size_t task) {
    const std::size_t cell = task / cfg.M;
    const std::size_t r = task % cfg.M;
    const std::size_t ti = cell / n_rates;
    const std::size_t ri = cell % n_rates;

    SimSpec spec = cfg.model;
    spec.T = cfg.T_values[ti];
    spec.delta = cfg.delta;
    spec.seed = CounterRng::derive(cfg.seed, 1, r);
    apply_mar(spec, res.mar_offsets[ri]);

    auto& out = res.replicates[task];
    out.T = spec.T;
    out.mar = cfg.mar_rates[ri];
    out.replicate = r;

    const Curve x = draw_stationary_curves(spec, 1, spec.seed, kQueryStream).front();
    const double truth = response_value(x, spec.response);

    auto fit = [&](std::shared_ptr<const FunctionalDataset> ds) -> std::optional<double> {
      try {
        MetricDataset md(std::move(ds), cfg.metric);
        const auto ec =
            knn_config(md.data(), cfg.metric, cfg.kappa_fractions, cfg.cv_block, cfg.max_validation);
        KnnCrossValidator validator(md, ec.bandwidth, ec.kernel);
        const auto q = md.query_features(x);
        const double m = regress_with_fallback(md, q, ec, &validator);
        return (m - truth) * (m - truth);
      } catch (const Error&) {
        return std::nullopt;
      }
    };

    auto continuous = std::make_shared<const FunctionalDataset>(generate(spec));
    auto discrete = std::make_shared<const FunctionalDataset>(continuous->subsample(stride));
    out.n_continuous = continuous->size();
    out.n_discrete = discrete->size();
    out.se_discrete = fit(std::move(discrete));
    out.se_continuous = fit(std::move(continuous));
  });

  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    std::vector<double> cont, disc;
    std::size_t failures = 0;
    for (std::size_t r = 0; r < cfg.M; ++r) {
      const auto& rep = res.replicates[cell * cfg.M + r];
      if (rep.se_continuous) cont.push_back(*rep.se_continuous);
      if (rep.se_discrete) disc.push_back(*rep.se_discrete);
      if (!rep.se_continuous || !rep.se_discrete) ++failures;
    }
    Sim1Row row;
    row.T = cfg.T_values[cell / n_rates];
    row.mar = cfg.mar_rates[cell % n_rates];
    row.continuous = summarize_present(cont);
    row.discrete = summarize_present(disc);
    row.failrate = static_cast<double>(failures) / static_cast<double>(cfg.M);
    res.rows.push_back(row);
  }
  return res;
}

void write_sim1(const Sim1Config& cfg, const Sim1Result& res, const std::string& out_dir) {
  ensure_dir(out_dir);
  const std::filesystem::path dir(out_dir);

  std::ostringstream table;
  table << "T,mar,stat,continuous,discrete,failrate\n";
  for (const auto& row : res.rows) {
    const std::pair<const char*, double Summary::*> stats[] = {
        {"q25", &Summary::q25}, {"median", &Summary::median}, {"mean", &Summary::mean},
        {"q75", &Summary::q75}};
    for (const auto& [name, field] : stats)
      table << format_double(row.T) << ',' << rate_label(row.mar) << ',' << name << ','
            << fmt_or_na(row.continuous.*field) << ',' << fmt_or_na(row.discrete.*field) << ','
            << format_double(row.failrate) << '\n';
  }
  write_file((dir / "table1.csv").string(), table.str());

  std::ostringstream reps;
  reps << "T,mar,replicate,n_continuous,n_discrete,continuous,discrete\n";
  for (const auto& r : res.replicates)
    reps << format_double(r.T) << ',' << rate_label(r.mar) << ',' << r.replicate << ','
         << r.n_continuous << ',' << r.n_discrete << ','
         << (r.se_continuous ? format_double(*r.se_continuous) : "NA") << ','
         << (r.se_discrete ? format_double(*r.se_discrete) : "NA") << '\n';
  write_file((dir / "se_replicates.csv").string(), reps.str());

  json meta;
  meta["experiment"] = "sim1";
  meta["version"] = library_version();
  meta["seed"] = cfg.seed;
  meta["quantile_convention"] = "type7";
  meta["config"] = json::parse(sim1_config_to_json(cfg));
  meta["mar_offsets"] = offsets_json(cfg.mar_rates, res.mar_offsets);
  write_file((dir / "meta.json").string(), meta.dump(2) + "\n");
}

Sim2Result run_sim2(const Sim2Config& cfg, unsigned threads) {
  cfg.validate();
  Sim2Result res;
  res.mar_offsets = calibrate_offsets(cfg.model, cfg.mar_rates);
  const std::size_t n_rates = cfg.mar_rates.size();
  const std::size_t n_deltas = cfg.delta_grid.size();

  const auto eval = draw_stationary_curves(cfg.model, cfg.eval_curves, cfg.seed, kEvalStream);
  std::vector<double> truth;
  for (const auto& x : eval) truth.push_back(response_value(x, cfg.model.response));

  res.ise.assign(n_rates * n_deltas * cfg.N, kNaN);
  parallel_for(res.ise.size(), threads, [&](std::size_t task) {
    const std::size_t cell = task / cfg.N;
    const std::size_t r = task % cfg.N;
    const std::size_t ri = cell / n_deltas;
    const std::size_t di = cell % n_deltas;

    SimSpec spec = cfg.model;
    spec.delta = cfg.delta_grid[di];
    spec.T = static_cast<double>(cfg.n_fixed) * spec.delta;
    spec.seed = CounterRng::derive(cfg.seed, 2, r);
    apply_mar(spec, res.mar_offsets[ri]);

    try {
      MetricDataset md(std::make_shared<const FunctionalDataset>(generate(spec)),
                       cfg.metric);
      const auto ec = knn_config(md.data(), cfg.metric, cfg.kappa_fractions, cfg.cv_block, cfg.max_validation);
      KnnCrossValidator validator(md, ec.bandwidth, ec.kernel);
      double sum = 0.0;
      for (std::size_t j = 0; j < eval.size(); ++j) {
        const auto q = md.query_features(eval[j]);
        const double e = regress_with_fallback(md, q, ec, &validator) - truth[j];
        sum += e * e;
      }
      res.ise[task] = sum / static_cast<double>(eval.size());
    } catch (const Error&) {
      res.ise[task] = kNaN;
    }
  });

  for (std::size_t ri = 0; ri < n_rates; ++ri) {
    double best = kNaN, best_delta = kNaN;
    for (std::size_t di = 0; di < n_deltas; ++di) {
      const std::size_t cell = ri * n_deltas + di;
      std::vector<double> v;
      for (std::size_t r = 0; r < cfg.N; ++r) {
        const double e = res.ise[cell * cfg.N + r];
        if (!std::isnan(e)) v.push_back(e);
      }
      Sim2Cell c;
      c.mar = cfg.mar_rates[ri];
      c.delta = cfg.delta_grid[di];
      c.failures = cfg.N - v.size();
      if (v.empty()) {
        c.mise = kNaN;
        c.se_of_mise = kNaN;
      } else {
        double sum = 0.0;
        for (double e : v) sum += e;
        c.mise = sum / static_cast<double>(v.size());
        double ss = 0.0;
        for (double e : v) ss += (e - c.mise) * (e - c.mise);
        c.se_of_mise = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1) /
                                                static_cast<double>(v.size()))
                                    : kNaN;
      }
      if (!std::isnan(c.mise) &&
          (std::isnan(best) || c.mise < best || (c.mise == best && c.delta < best_delta))) {
        best = c.mise;
        best_delta = c.delta;
      }
      res.cells.push_back(c);
    }
    res.delta_star.push_back(best_delta);
    res.mise_star.push_back(best);
  }
  return res;
}

std::string mise_svg(const Sim2Config& cfg, const Sim2Result& res) {
  const double W = 640, H = 420, left = 80, right = 150, top = 30, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  double xmin = *std::min_element(cfg.delta_grid.begin(), cfg.delta_grid.end());
  double xmax = *std::max_element(cfg.delta_grid.begin(), cfg.delta_grid.end());
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const auto& c : res.cells)
    if (std::isfinite(c.mise)) {
      ymin = std::min(ymin, c.mise);
      ymax = std::max(ymax, c.mise);
    }
  if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
  if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
  if (ymax == ymin) ymin -= 0.5 * std::max(1e-12, std::abs(ymin)), ymax += 0.5 * std::max(1e-12, std::abs(ymax));
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double v) { return left + (v - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double v) { return top + (ymax - v) / (ymax - ymin) * ph; };
  char buf[256];
  auto f = [&](const char* spec, double v) {
    std::snprintf(buf, sizeof buf, spec, v);
    return std::string(buf);
  };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\""
    << top + ph << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    s << "<line x1=\"" << f("%.2f", px(xv)) << "\" y1=\"" << top + ph << "\" x2=\""
      << f("%.2f", px(xv)) << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << f("%.2f", px(xv)) << "\" y=\"" << top + ph + 20
      << "\" text-anchor=\"middle\">" << f("%.3g", xv) << "</text>\n";
    s << "<line x1=\"" << left - 5 << "\" y1=\"" << f("%.2f", py(yv)) << "\" x2=\"" << left
      << "\" y2=\"" << f("%.2f", py(yv)) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << left - 8 << "\" y=\"" << f("%.2f", py(yv) + 4)
      << "\" text-anchor=\"end\">" << f("%.3g", yv) << "</text>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15
    << "\" text-anchor=\"middle\">sampling mesh delta</text>\n";
  s << "<text x=\"20\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
    << top + ph / 2 << ")\">MISE</text>\n";

  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  const std::size_t n_deltas = cfg.delta_grid.size();
  for (std::size_t ri = 0; ri < cfg.mar_rates.size(); ++ri) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t di = 0; di < n_deltas; ++di) {
      const auto& c = res.cells[ri * n_deltas + di];
      if (std::isfinite(c.mise)) pts.emplace_back(c.delta, c.mise);
    }
    std::sort(pts.begin(), pts.end());
    const char* color = colors[ri % 6];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      s << (i ? " " : "") << f("%.2f", px(pts[i].first)) << ',' << f("%.2f", py(pts[i].second));
    s << "\"/>\n";
    const double ly = top + 15 + 20.0 * static_cast<double>(ri);
    s << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40
      << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << left + pw + 45 << "\" y=\"" << ly + 4 << "\">missing "
      << f("%.0f", 100.0 * cfg.mar_rates[ri]) << "%</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void write_sim2(const Sim2Config& cfg, const Sim2Result& res, const std::string& out_dir) {
  ensure_dir(out_dir);
  const std::filesystem::path dir(out_dir);

  std::ostringstream mise;
  mise << "mar,delta,mise,se_of_mise\n";
  for (const auto& c : res.cells)
    mise << rate_label(c.mar) << ',' << format_double(c.delta) << ',' << fmt_or_na(c.mise) << ','
         << fmt_or_na(c.se_of_mise) << '\n';
  write_file((dir / "mise.csv").string(), mise.str());

  std::ostringstream reps;
  reps << "mar,delta,replicate,ise\n";
  const std::size_t n_deltas = cfg.delta_grid.size();
  for (std::size_t i = 0; i < res.ise.size(); ++i) {
    const std::size_t cell = i / cfg.N;
    reps << rate_label(cfg.mar_rates[cell / n_deltas]) << ','
         << format_double(cfg.delta_grid[cell % n_deltas]) << ',' << i % cfg.N << ','
         << fmt_or_na(res.ise[i]) << '\n';
  }
  write_file((dir / "mise_replicates.csv").string(), reps.str());

  std::ostringstream star;
  star << "mar,delta_star,mise_star\n";
  for (std::size_t ri = 0; ri < cfg.mar_rates.size(); ++ri)
    star << rate_label(cfg.mar_rates[ri]) << ',' << fmt_or_na(res.delta_star[ri]) << ','
         << fmt_or_na(res.mise_star[ri]) << '\n';
  write_file((dir / "delta_star.csv").string(), star.str());

  write_file((dir / "mise.svg").string(), mise_svg(cfg, res));

  json meta;
  meta["experiment"] = "sim2";
  meta["version"] = library_version();
  meta["seed"] = cfg.seed;
  meta["quantile_convention"] = "type7";
  meta["config"] = json::parse(sim2_config_to_json(cfg));
  meta["mar_offsets"] = offsets_json(cfg.mar_rates, res.mar_offsets);
  json fails = json::array();
  for (const auto& c : res.cells)
    fails.push_back({{"mar", c.mar}, {"delta", c.delta}, {"failures", c.failures}});
  meta["failures"] = fails;
  write_file((dir / "meta.json").string(), meta.dump(2) + "\n");
}

}  // namespace ftkreg
