#include "ftkreg/io.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <vector>

#include "ftkreg/error.hpp"
#include "json.hpp"

namespace ftkreg {

using nlohmann::json;

namespace {

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) return true;
  }
  return false;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
  return in;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("invalid JSON: ") + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    fail(ErrorCode::Parse, "not a number: '" + std::string(s) + "'");
  return v;
}

void write_dataset_csv(const FunctionalDataset& ds, std::ostream& out) {
  const auto& g = ds.grid();
  out << "# grid," << format_double(g.start()) << ',' << format_double(g.end()) << ','
      << g.size() << ',' << format_double(ds.delta()) << '\n';
  out << "t,zeta,y";
  for (std::size_t i = 0; i < g.size(); ++i) out << ",v_" << i;
  out << '\n';
  for (std::size_t k = 0; k < ds.size(); ++k) {
    out << format_double(ds.time(k)) << ',' << int(ds.zeta(k)) << ',';
    if (ds.observed(k)) out << format_double(*ds.response(k));
    for (double v : ds.curve_values(k)) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_dataset_csv(const FunctionalDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_dataset_csv(ds, out);
  if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

FunctionalDataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) fail(ErrorCode::Parse, "empty dataset file");
  const auto meta = split(line);
  if (meta.size() != 5 || trim(meta[0]) != "# grid")
    fail(ErrorCode::Parse, "first line must be '# grid,start,end,n_points,delta'");
  const double start = parse_double(meta[1]);
  const double end = parse_double(meta[2]);
  const double np = parse_double(meta[3]);
  if (!(np >= 2.0) || np != static_cast<double>(static_cast<std::size_t>(np)))
    fail(ErrorCode::Parse, "n_points must be an integer >= 2");
  const auto p = static_cast<std::size_t>(np);
  const double delta = parse_double(meta[4]);
  Grid grid(start, end, p);

  if (!next_line(in, line)) fail(ErrorCode::Parse, "missing column header");
  const auto header = split(line);
  if (header.size() != p + 3 || trim(header[0]) != "t" || trim(header[1]) != "zeta" ||
      trim(header[2]) != "y")
    fail(ErrorCode::Parse, "header must be t,zeta,y,v_0,...,v_" + std::to_string(p - 1));

  std::vector<double> times, y, values;
  std::vector<std::uint8_t> zeta;
  std::size_t row = 0;
  while (next_line(in, line)) {
    ++row;
    const auto cells = split(line);
    if (cells.size() != p + 3)
      fail(ErrorCode::Parse, "row " + std::to_string(row) + " has " +
                                 std::to_string(cells.size()) + " fields, expected " +
                                 std::to_string(p + 3));
    times.push_back(parse_double(cells[0]));
    const auto z = trim(cells[1]);
    if (z != "0" && z != "1") fail(ErrorCode::Parse, "zeta must be 0 or 1");
    zeta.push_back(z == "1" ? 1 : 0);
    const auto ycell = trim(cells[2]);
    if (zeta.back() == 1) {
      if (ycell.empty()) fail(ErrorCode::Parse, "observed row without a response");
      y.push_back(parse_double(ycell));
    } else {
      if (!ycell.empty()) fail(ErrorCode::Parse, "unobserved row carries a response");
      y.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    for (std::size_t i = 0; i < p; ++i) values.push_back(parse_double(cells[3 + i]));
  }
  return FunctionalDataset(grid, delta, std::move(times), std::move(zeta), std::move(y),
                           std::move(values));
}

FunctionalDataset read_dataset_csv(const std::string& path) {
  auto in = open_in(path);
  return read_dataset_csv(in);
}

Curve read_curve_csv(std::istream& in, const Grid& grid) {
  std::string line;
  std::vector<double> values;
  while (next_line(in, line)) {
    const auto t = trim(line);
    if (t.front() == '#') continue;
    const auto cells = split(t);
    if (trim(cells[0]).starts_with("v_")) continue;
    if (!values.empty()) fail(ErrorCode::Parse, "curve file must hold a single row");
    for (auto c : cells) values.push_back(parse_double(c));
  }
  if (values.empty()) fail(ErrorCode::Parse, "curve file has no values");
  if (values.size() != grid.size())
    fail(ErrorCode::GridMismatch, "curve has " + std::to_string(values.size()) +
                                      " values, dataset grid has " +
                                      std::to_string(grid.size()));
  return Curve(grid, std::move(values));
}

Curve read_curve_csv(const std::string& path, const Grid& grid) {
  auto in = open_in(path);
  return read_curve_csv(in, grid);
}

EstimatorConfig estimator_config_from_json(std::string_view text) {
  const json j = parse_json(text);
  if (!j.is_object()) fail(ErrorCode::Parse, "estimator config must be a JSON object");
  EstimatorConfig cfg;
  cfg.kernel = parse_kernel(get_or<std::string>(j, "kernel", "quadratic"));
  cfg.metric = parse_semimetric(get_or<std::string>(j, "semimetric", "l2"));
  if (j.contains("bandwidth")) {
    const auto& b = j.at("bandwidth");
    if (b.is_string() && b.get<std::string>() == "knn_default") {
      cfg.bandwidth = BandwidthRule::knn_default();
    } else if (b.is_object() && b.contains("fixed")) {
      cfg.bandwidth = BandwidthRule::fixed(get_or<double>(b, "fixed", 0.0));
    } else if (b.is_object() && b.contains("knn")) {
      cfg.bandwidth = BandwidthRule::knn(get_or<std::vector<std::size_t>>(b, "knn", {}));
      cfg.bandwidth.cap_to_data = get_or<bool>(b, "cap_to_data", false);
    } else {
      fail(ErrorCode::Parse, "bandwidth must be {\"fixed\": h} or {\"knn\": [...]}");
    }
    if (b.is_object()) {
      cfg.bandwidth.cv_block = get_or<double>(b, "cv_block", 0.0);
      cfg.bandwidth.max_validation = get_or<std::size_t>(b, "max_validation", 0);
    }
  }
  cfg.tau0_points = get_or<std::size_t>(j, "tau0_points", cfg.tau0_points);
  cfg.density_floor = get_or<double>(j, "density_floor", cfg.density_floor);
  cfg.density_bandwidth = get_or<double>(j, "density_bandwidth", cfg.density_bandwidth);
  if (cfg.tau0_points < 2) fail(ErrorCode::Parse, "tau0_points must be >= 2");
  return cfg;
}

std::string estimator_config_to_json(const EstimatorConfig& cfg) {
  json j;
  j["kernel"] = to_string(cfg.kernel);
  j["semimetric"] = to_string(cfg.metric);
  json b;
  if (cfg.bandwidth.kind == BandwidthRule::Kind::Fixed) {
    b["fixed"] = cfg.bandwidth.h;
  } else {
    b["knn"] = cfg.bandwidth.kappas;
    b["cap_to_data"] = cfg.bandwidth.cap_to_data;
    b["cv_block"] = cfg.bandwidth.cv_block;
    b["max_validation"] = cfg.bandwidth.max_validation;
  }
  j["bandwidth"] = b;
  j["tau0_points"] = cfg.tau0_points;
  j["density_floor"] = cfg.density_floor;
  j["density_bandwidth"] = cfg.density_bandwidth;
  return j.dump(2);
}

SimSpec sim_spec_from_json(std::string_view text) {
  const json j = parse_json(text);
  if (!j.is_object()) fail(ErrorCode::Parse, "simulation spec must be a JSON object");
  const auto model = get_or<std::string>(j, "model", "legendre_lift");
  SimSpec s;
  if (model == "legendre_lift")
    s = SimSpec::legendre_default();
  else if (model == "sine_shape")
    s = SimSpec::sine_default();
  else
    fail(ErrorCode::Parse, "unknown model '" + model + "'");

  if (j.contains("ou")) {
    const auto& o = j.at("ou");
    s.ou.theta = get_or(o, "theta", s.ou.theta);
    s.ou.mu = get_or(o, "mu", s.ou.mu);
    s.ou.sigma = get_or(o, "sigma", s.ou.sigma);
    s.ou.dt = get_or(o, "dt", s.ou.dt);
    s.ou.z0 = get_or(o, "z0", s.ou.z0);
    s.ou.stationary_start = get_or(o, "stationary_start", s.ou.stationary_start);
    const auto scheme = get_or<std::string>(o, "scheme", s.ou.euler ? "euler" : "exact");
    if (scheme != "exact" && scheme != "euler")
      fail(ErrorCode::Parse, "ou.scheme must be 'exact' or 'euler'");
    s.ou.euler = scheme == "euler";
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    s.grid = Grid(get_or(g, "start", s.grid.start()), get_or(g, "end", s.grid.end()),
                  get_or<std::size_t>(g, "n_points", s.grid.size()));
  }
  if (j.contains("response")) {
    const auto r = get_or<std::string>(j, "response", "");
    if (r == "integral_square")
      s.response = ResponseOp::IntegralSquare;
    else if (r == "deriv_integral_square")
      s.response = ResponseOp::DerivIntegralSquare;
    else
      fail(ErrorCode::Parse, "unknown response '" + r + "'");
  }
  if (j.contains("noise")) {
    const auto& nz = j.at("noise");
    const auto type = get_or<std::string>(
        nz, "type", s.noise == SimSpec::Noise::WienerDiff ? "wiener_diff" : "gaussian_iid");
    if (type == "wiener_diff")
      s.noise = SimSpec::Noise::WienerDiff;
    else if (type == "gaussian_iid")
      s.noise = SimSpec::Noise::GaussianIID;
    else
      fail(ErrorCode::Parse, "unknown noise type '" + type + "'");
    s.noise_sd = get_or(nz, "sd", s.noise_sd);
  }
  s.T = get_or(j, "T", s.T);
  s.delta = get_or(j, "delta", s.delta);
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  if (j.contains("mar")) {
    const auto& m = j.at("mar");
    const auto type = get_or<std::string>(m, "type", "expit");
    if (type == "none") {
      s.mar = SimSpec::Mar::None;
    } else if (type == "expit") {
      s.mar = SimSpec::Mar::Expit;
      s.mar_offset = get_or(m, "offset", 0.0);
      if (m.contains("missing_rate")) {
        const double rate = get_or(m, "missing_rate", 0.0);
        if (rate == 0.0)
          s.mar = SimSpec::Mar::None;
        else
          s.mar_offset = calibrate_mar_offset(s, rate);
      }
    } else {
      fail(ErrorCode::Parse, "unknown mar type '" + type + "'");
    }
  }
  s.validate();
  return s;
}

std::string sim_spec_to_json(const SimSpec& s) {
  json j;
  j["model"] = s.model == SimSpec::Model::LegendreLift ? "legendre_lift" : "sine_shape";
  j["ou"] = {{"theta", s.ou.theta},
             {"mu", s.ou.mu},
             {"sigma", s.ou.sigma},
             {"dt", s.ou.dt},
             {"z0", s.ou.z0},
             {"stationary_start", s.ou.stationary_start},
             {"scheme", s.ou.euler ? "euler" : "exact"}};
  j["grid"] = {{"start", s.grid.start()}, {"end", s.grid.end()}, {"n_points", s.grid.size()}};
  j["response"] =
      s.response == ResponseOp::IntegralSquare ? "integral_square" : "deriv_integral_square";
  j["noise"] = {{"type", s.noise == SimSpec::Noise::WienerDiff ? "wiener_diff" : "gaussian_iid"},
                {"sd", s.noise_sd}};
  if (s.mar == SimSpec::Mar::None)
    j["mar"] = {{"type", "none"}};
  else
    j["mar"] = {{"type", "expit"}, {"offset", s.mar_offset}};
  j["T"] = s.T;
  j["delta"] = s.delta;
  j["seed"] = s.seed;
  return j.dump(2);
}

std::string read_text_file(const std::string& path) {
  auto in = open_in(path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace ftkreg
