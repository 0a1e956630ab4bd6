#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ftkreg/estimator.hpp"
#include "ftkreg/simulate.hpp"
#include "ftkreg/stats.hpp"

namespace ftkreg {

/// Continuous versus discrete sampling on the Legendre-lift model.
struct Sim1Config {
  std::vector<double> T_values{50.0, 200.0, 1000.0};
  /// Target missing rates; 0 means complete data.
  std::vector<double> mar_rates{0.2, 0.4};
  double delta = 0.005;
  std::size_t M = 100;
  std::uint64_t seed = 20240501;
  /// kappa grid as fractions of the observed count, clamped to [2, n_obs - 1].
  std::vector<double> kappa_fractions{0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.35, 0.5};
  double cv_block = 1.0;
  std::size_t max_validation = 50;
  SemiMetric metric = SemiMetric::l2_deriv(2);
  SimSpec model = SimSpec::legendre_default();

  void validate() const;
};

/// MISE over the sampling mesh on the sine-shape model.
struct Sim2Config {
  std::size_t n_fixed = 200;
  std::vector<double> delta_grid{0.10, 0.15, 0.20, 0.25, 0.30, 0.35,
                                 0.40, 0.45, 0.50, 0.55, 0.60};
  std::size_t eval_curves = 50;
  std::size_t N = 100;
  std::vector<double> mar_rates{0.0, 0.1, 0.5};
  std::uint64_t seed = 20240502;
  std::vector<double> kappa_fractions{0.02, 0.05, 0.1, 0.2, 0.35, 0.5};
  double cv_block = 0.0;
  std::size_t max_validation = 0;
  SemiMetric metric = SemiMetric::l2_deriv(1);
  SimSpec model = SimSpec::sine_default();

  void validate() const;
};

Sim1Config sim1_config_from_json(std::string_view json);
std::string sim1_config_to_json(const Sim1Config& cfg);
Sim2Config sim2_config_from_json(std::string_view json);
std::string sim2_config_to_json(const Sim2Config& cfg);

/// Type-7 quartiles and ordered-sum mean.
inline Summary summarize_se(std::span<const double> values) { return summarize(values); }

/// Kernel regression at one query with the harness fallback: when no
/// observed response falls in the ball, h grows to the distance of the
/// nearest observed curve. `fell_back` reports whether that happened.
double regress_with_fallback(const MetricDataset& data, std::span<const double> query_features,
                             const EstimatorConfig& cfg, KnnCrossValidator* validator,
                             bool* fell_back = nullptr);

/// kappa grid for `observed` usable curves.
std::vector<std::size_t> kappa_grid(std::span<const double> fractions, std::size_t observed);

struct Sim1Replicate {
  double T = 0.0;
  double mar = 0.0;
  std::size_t replicate = 0;
  std::optional<double> se_continuous;
  std::optional<double> se_discrete;
  std::size_t n_continuous = 0;
  std::size_t n_discrete = 0;
};

struct Sim1Row {
  double T = 0.0;
  double mar = 0.0;
  Summary continuous;
  Summary discrete;
  double failrate = 0.0;
};

struct Sim1Result {
  std::vector<Sim1Row> rows;              // (T, mar) order of the config
  std::vector<Sim1Replicate> replicates;  // (T, mar, replicate) order
  std::vector<double> mar_offsets;        // per config rate; NaN for 0
};

Sim1Result run_sim1(const Sim1Config& cfg, unsigned threads = 1);
/// Writes table1.csv, se_replicates.csv and meta.json.
void write_sim1(const Sim1Config& cfg, const Sim1Result& res, const std::string& out_dir);

struct Sim2Cell {
  double mar = 0.0;
  double delta = 0.0;
  double mise = 0.0;
  double se_of_mise = 0.0;
  std::size_t failures = 0;
};

struct Sim2Result {
  std::vector<Sim2Cell> cells;  // (mar, delta) order of the config
  /// Integrated squared error per (mar, delta, replicate); NaN for failures.
  std::vector<double> ise;
  std::vector<double> delta_star;  // per rate
  std::vector<double> mise_star;   // per rate
  std::vector<double> mar_offsets;
};

Sim2Result run_sim2(const Sim2Config& cfg, unsigned threads = 1);
/// Writes mise.csv, mise_replicates.csv, delta_star.csv, mise.svg and meta.json.
void write_sim2(const Sim2Config& cfg, const Sim2Result& res, const std::string& out_dir);

/// Line chart of MISE against delta, one polyline per rate.
std::string mise_svg(const Sim2Config& cfg, const Sim2Result& res);

std::string library_version();

}  // namespace ftkreg
