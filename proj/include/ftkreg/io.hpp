#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "ftkreg/estimator.hpp"
#include "ftkreg/funcdata.hpp"
#include "ftkreg/simulate.hpp"

namespace ftkreg {

/// Shortest-safe decimal form: 17 significant digits, round-trips exactly.
std::string format_double(double v);
double parse_double(std::string_view s);

// Dataset CSV:
//   # grid,<start>,<end>,<n_points>,<delta>
//   t,zeta,y,v_0,...,v_{p-1}
//   <one row per observation; y empty when zeta = 0>
void write_dataset_csv(const FunctionalDataset& ds, std::ostream& out);
void write_dataset_csv(const FunctionalDataset& ds, const std::string& path);
FunctionalDataset read_dataset_csv(std::istream& in);
FunctionalDataset read_dataset_csv(const std::string& path);

/// One curve: an optional `v_0,...` header, then a single row of values.
/// Lines starting with '#' are skipped.
Curve read_curve_csv(std::istream& in, const Grid& grid);
Curve read_curve_csv(const std::string& path, const Grid& grid);

// JSON forms of the configuration types. Missing keys keep their defaults.
EstimatorConfig estimator_config_from_json(std::string_view json);
std::string estimator_config_to_json(const EstimatorConfig& cfg);

/// A "missing_rate" key under "mar" is calibrated into an offset on load.
SimSpec sim_spec_from_json(std::string_view json);
std::string sim_spec_to_json(const SimSpec& spec);

std::string read_text_file(const std::string& path);

}  // namespace ftkreg
