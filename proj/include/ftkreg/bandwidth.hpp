#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ftkreg/metrics.hpp"

namespace ftkreg {

/// How the smoothing parameter is obtained at a query curve.
struct BandwidthRule {
  enum class Kind { Fixed, KnnCV };

  Kind kind = Kind::KnnCV;
  double h = 0.0;
  std::vector<std::size_t> kappas;
  /// When set, kappas larger than (observed count - 1) are clipped instead of
  /// rejected. Used by the default grid.
  bool cap_to_data = false;
  /// Leave-one-out fits also drop observations closer than this in time to
  /// the held-out one (0 keeps plain leave-one-out).
  double cv_block = 0.0;
  /// Upper bound on the number of validation curves (0 = no bound).
  std::size_t max_validation = 0;

  static BandwidthRule fixed(double h);
  static BandwidthRule knn(std::vector<std::size_t> kappas);
  /// {5, 10, 15, 20, 30, 50}, clipped to the data at resolution time.
  static BandwidthRule knn_default();
};

struct BandwidthChoice {
  double h = 0.0;
  std::size_t kappa = 0;            // 0 for a fixed rule
  std::vector<std::size_t> kappas;  // effective grid
  std::vector<double> scores;       // CV score per grid entry
};

/// Radius of the closed ball holding the kappa smallest values of `dist`,
/// nudged up by a relative 1e-12 so the kappa-th point gets positive weight.
double knn_radius(std::span<const double> dist, std::size_t kappa);

/// Local cross-validation over kappa-nearest-neighbour bandwidths.
///
/// For a query x and each kappa of the grid, h_kappa(x) is the distance to
/// the kappa-th nearest curve with an observed response. Every kappa is
/// scored on one common validation set, the observed curves inside
/// h_kappamax(x), by the mean squared leave-one-out error, where the fit at a
/// validation curve X_j uses its own radius h_kappa(X_j). The smallest kappa
/// among the minimisers wins.
///
/// Leave-one-out predictions depend only on the training data, so they are
/// cached per observation; one validator can serve many queries. Not
/// thread-safe.
class KnnCrossValidator {
 public:
  KnnCrossValidator(const MetricDataset& data, BandwidthRule rule, Kernel kernel);

  const std::vector<std::size_t>& kappas() const noexcept { return kappas_; }

  /// `query_dist` holds the distances from the query to every stored curve.
  BandwidthChoice select(std::span<const double> query_dist);

  /// Leave-one-out predictions at observation j, one per kappa.
  const std::vector<double>& loo_predictions(std::size_t j);

 private:
  const MetricDataset& data_;
  BandwidthRule rule_;
  Kernel kernel_;
  std::vector<std::size_t> observed_;
  std::vector<std::size_t> kappas_;
  std::vector<std::optional<std::vector<double>>> cache_;
};

/// Resolves the bandwidth at `query_dist` (distances to all stored curves).
/// A validator is built on the fly for KnnCV unless one is supplied.
BandwidthChoice resolve_bandwidth(const MetricDataset& data, std::span<const double> query_dist,
                                  const BandwidthRule& rule, const Kernel& kernel,
                                  KnnCrossValidator* validator = nullptr);

double resolve_bandwidth(const MetricDataset& data, const Curve& x, const BandwidthRule& rule,
                         const Kernel& kernel);

}  // namespace ftkreg
