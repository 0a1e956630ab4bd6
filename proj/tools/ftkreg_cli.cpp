#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ftkreg/ftkreg.h"

namespace {

struct CliError : std::runtime_error {
  int code;
  CliError(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};

void check(ftkreg_status s) {
  if (s != FTKREG_OK)
    throw CliError(static_cast<int>(s),
                   std::string(ftkreg_status_name(s)) + ": " + ftkreg_last_error());
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(FTKREG_ERR_IO, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double parse_number(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw CliError(FTKREG_ERR_PARSE, "bad " + what + ": '" + s + "'");
  return v;
}

using DatasetPtr = std::unique_ptr<ftkreg_dataset, decltype(&ftkreg_dataset_free)>;
using CurvePtr = std::unique_ptr<ftkreg_curve, decltype(&ftkreg_curve_free)>;
using ConfigPtr = std::unique_ptr<ftkreg_config, decltype(&ftkreg_config_free)>;

struct CiOptions {
  std::string data, x, config, psi = "identity", method = "asymptotic", weights = "exponential",
                               out;
  double level = 0.95;
  std::size_t B = 1000;
  std::uint64_t seed = 42;
  unsigned threads = 1;
  bool header = false;
};

int run_ci(const CiOptions& o) {
  ftkreg_dataset* ds_raw = nullptr;
  check(ftkreg_dataset_load(o.data.c_str(), &ds_raw));
  DatasetPtr ds(ds_raw, ftkreg_dataset_free);
  ftkreg_curve* x_raw = nullptr;
  check(ftkreg_curve_load(o.x.c_str(), ds.get(), &x_raw));
  CurvePtr x(x_raw, ftkreg_curve_free);
  ftkreg_config* cfg_raw = nullptr;
  check(o.config.empty() ? ftkreg_config_create(&cfg_raw)
                         : ftkreg_config_load(o.config.c_str(), &cfg_raw));
  ConfigPtr cfg(cfg_raw, ftkreg_config_free);

  ftkreg_ci_request req;
  ftkreg_ci_request_init(&req);
  if (o.psi == "identity") {
    req.psi = FTKREG_PSI_IDENTITY;
  } else if (o.psi.rfind("cdf:", 0) == 0) {
    req.psi = FTKREG_PSI_CDF;
    req.psi_arg = parse_number(o.psi.substr(4), "cdf threshold");
  } else if (o.psi.rfind("quantile:", 0) == 0) {
    req.psi = FTKREG_PSI_QUANTILE;
    req.psi_arg = parse_number(o.psi.substr(9), "quantile level");
  } else {
    throw CliError(FTKREG_ERR_INVALID_ARGUMENT, "--psi must be identity, cdf:<y> or quantile:<a>");
  }
  req.level = o.level;
  req.method = o.method == "bootstrap" ? FTKREG_CI_BOOTSTRAP : FTKREG_CI_ASYMPTOTIC;
  req.B = o.B;
  req.seed = o.seed;
  req.law = o.weights == "multinomial" ? FTKREG_WEIGHTS_MULTINOMIAL : FTKREG_WEIGHTS_EXPONENTIAL;
  req.threads = o.threads;

  ftkreg_ci_result r;
  check(ftkreg_ci(ds.get(), x.get(), cfg.get(), &req, &r));

  std::ostringstream line;
  if (o.header) line << "point,lower,upper,method,h,p_hat,Fx_hat,M1,M2,W2bar\n";
  line << fmt(r.point) << ',' << fmt(r.lower) << ',' << fmt(r.upper) << ',' << o.method << ','
       << fmt(r.h) << ',' << fmt(r.p_hat) << ',' << fmt(r.Fx_hat) << ',' << fmt(r.M1) << ','
       << fmt(r.M2) << ',' << fmt(r.W2bar) << '\n';
  if (o.out.empty()) {
    std::cout << line.str();
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw CliError(FTKREG_ERR_IO, "cannot write '" + o.out + "'");
    f << line.str();
  }
  return 0;
}

int run_simulate(const std::string& spec, const std::string& out) {
  const auto text = slurp(spec);
  ftkreg_dataset* raw = nullptr;
  check(ftkreg_simulate(text.c_str(), &raw));
  DatasetPtr ds(raw, ftkreg_dataset_free);
  check(ftkreg_dataset_save(ds.get(), out.c_str()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional kernel regression with missing responses"};
  app.set_version_flag("--version", std::string(ftkreg_version()));
  app.require_subcommand(1);

  CiOptions ci;
  auto* ci_cmd = app.add_subcommand("ci", "Point estimate and confidence interval at one curve");
  ci_cmd->add_option("--data", ci.data, "Dataset CSV")->required();
  ci_cmd->add_option("--x", ci.x, "Query curve CSV")->required();
  ci_cmd->add_option("--config", ci.config, "Estimator config (JSON)");
  ci_cmd->add_option("--psi", ci.psi, "identity | cdf:<y> | quantile:<a>");
  ci_cmd->add_option("--level", ci.level, "Coverage level")->check(CLI::Range(0.0, 1.0));
  ci_cmd->add_option("--method", ci.method, "asymptotic | bootstrap")
      ->check(CLI::IsMember({"asymptotic", "bootstrap"}));
  ci_cmd->add_option("--B", ci.B, "Bootstrap replicates");
  ci_cmd->add_option("--seed", ci.seed, "Bootstrap seed");
  ci_cmd->add_option("--weights", ci.weights, "exponential | multinomial")
      ->check(CLI::IsMember({"exponential", "multinomial"}));
  ci_cmd->add_option("--threads", ci.threads, "Worker threads");
  ci_cmd->add_flag("--header", ci.header, "Print the column header first");
  ci_cmd->add_option("--out", ci.out, "Write the row to a file instead of stdout");

  std::string spec, sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a dataset from a simulation spec");
  sim_cmd->add_option("--spec", spec, "Simulation spec (JSON)")->required();
  sim_cmd->add_option("--out", sim_out, "Output dataset CSV")->required();

  std::string exp_config, out_dir;
  unsigned exp_threads = 1;
  auto* sim1_cmd = app.add_subcommand("sim1", "Continuous versus discrete sampling experiment");
  auto* sim2_cmd = app.add_subcommand("sim2", "Sampling mesh experiment");
  for (auto* cmd : {sim1_cmd, sim2_cmd}) {
    cmd->add_option("--config", exp_config, "Experiment config (JSON); defaults when omitted");
    cmd->add_option("--out-dir", out_dir, "Output directory")->required();
    cmd->add_option("--threads", exp_threads, "Worker threads");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ci_cmd) return run_ci(ci);
    if (*sim_cmd) return run_simulate(spec, sim_out);
    const std::string text = exp_config.empty() ? std::string("{}") : slurp(exp_config);
    if (*sim1_cmd) check(ftkreg_run_sim1(text.c_str(), out_dir.c_str(), exp_threads));
    if (*sim2_cmd) check(ftkreg_run_sim2(text.c_str(), out_dir.c_str(), exp_threads));
    return 0;
  } catch (const CliError& e) {
    std::cerr << "ftkreg: " << e.what() << '\n';
    return e.code;
  }
}
