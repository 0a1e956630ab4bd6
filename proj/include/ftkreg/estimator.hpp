#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ftkreg/bandwidth.hpp"
#include "ftkreg/funcdata.hpp"
#include "ftkreg/metrics.hpp"

namespace ftkreg {

/// The transform applied to responses: psi_y(v) = v, or 1{v <= y}.
struct Psi {
  enum class Kind { Identity, IndicatorLeq };

  Kind kind = Kind::Identity;
  double y = 0.0;

  static Psi identity() { return {}; }
  static Psi indicator(double y) { return {Kind::IndicatorLeq, y}; }

  double operator()(double v) const {
    return kind == Kind::Identity ? v : (v <= y ? 1.0 : 0.0);
  }
};

struct EstimatorConfig {
  Kernel kernel = Kernel::quadratic();
  SemiMetric metric = SemiMetric::l2();
  BandwidthRule bandwidth = BandwidthRule::knn_default();
  std::size_t tau0_points = 101;
  double density_floor = 1e-8;
  /// Response-axis half window for the conditional density; 0 picks a
  /// normal-reference width from the neighbourhood responses.
  double density_bandwidth = 0.0;
};

/// Kernel weights Delta_k = K(d(x, X_k) / h) of one query curve against a
/// dataset. The MAR weight of observation k is zeta_k * Delta_k.
///
/// Holds a reference to the MetricDataset, which must outlive the profile.
class WeightProfile {
 public:
  WeightProfile(const MetricDataset& data, std::vector<double> distances, double h,
                const Kernel& kernel);

  const MetricDataset& data() const noexcept { return *data_; }
  const Kernel& kernel() const noexcept { return kernel_; }
  double bandwidth() const noexcept { return h_; }
  std::span<const double> distances() const noexcept { return dist_; }
  std::span<const double> kernel_weights() const noexcept { return delta_; }
  double mar_weight(std::size_t k) const noexcept {
    return data_->data().observed(k) ? delta_[k] : 0.0;
  }

 private:
  const MetricDataset* data_;
  Kernel kernel_;
  double h_;
  std::vector<double> dist_;
  std::vector<double> delta_;
};

/// Computes distances from x, resolves the bandwidth and the kernel weights.
WeightProfile make_profile(const MetricDataset& data, const Curve& x, const EstimatorConfig& cfg,
                           KnnCrossValidator* validator = nullptr);
WeightProfile make_profile(const MetricDataset& data, std::span<const double> query_features,
                           const EstimatorConfig& cfg, KnnCrossValidator* validator = nullptr);

// Estimators on a resolved profile. EmptyNeighborhood is thrown whenever the
// relevant weight sum vanishes.

double regress(const WeightProfile& w, const Psi& psi);
double estimate_cdf(const WeightProfile& w, double y);
/// Smallest observed neighbourhood response q with estimate_cdf(q) >= alpha.
double estimate_quantile(const WeightProfile& w, double alpha);
double estimate_p(const WeightProfile& w);
double estimate_Fx(std::span<const double> distances, double u);
std::vector<double> estimate_tau0(std::span<const double> distances, double h,
                                  std::span<const double> u_grid);
double estimate_W2bar(const WeightProfile& w, const Psi& psi);
/// F(1 - F): the conditional variance of an indicator with mean F.
inline double w2bar_indicator(double F) { return F * (1.0 - F); }

struct DensityEstimate {
  double value = 0.0;  // floored value, safe as a divisor
  double raw = 0.0;
  bool floored = false;
};
DensityEstimate estimate_cond_density(const WeightProfile& w, double y, double h_y,
                                      double floor = 1e-8);
/// 1.06 * s * n_eff^(-1/5) from the MAR-weighted neighbourhood responses.
double default_density_bandwidth(const WeightProfile& w);

struct Moments {
  double M1 = 0.0;
  double M2 = 0.0;
};
/// M_j = K(1)^j - int_0^1 (K^j)'(u) tau0(u) du, trapezoid rule on u_grid.
Moments estimate_moments(const Kernel& kernel, std::span<const double> u_grid,
                         std::span<const double> tau0);

std::vector<double> uniform_unit_grid(std::size_t points);

struct VarianceComponents {
  double M1 = 0.0;
  double M2 = 0.0;
  double Fx = 0.0;
  double p = 0.0;
  double W2bar = 0.0;
  std::vector<double> u_grid;
  std::vector<double> tau0;
};

/// Everything but W2bar, which depends on the target functional.
VarianceComponents estimate_components(const WeightProfile& w, const EstimatorConfig& cfg);

// Convenience forms: build the profile for x, then evaluate.
double regress(const MetricDataset& data, const Curve& x, const Psi& psi,
               const EstimatorConfig& cfg);
double estimate_cdf(const MetricDataset& data, const Curve& x, double y,
                    const EstimatorConfig& cfg);
double estimate_quantile(const MetricDataset& data, const Curve& x, double alpha,
                         const EstimatorConfig& cfg);
double estimate_p(const MetricDataset& data, const Curve& x, const EstimatorConfig& cfg);
double estimate_Fx(const MetricDataset& data, const Curve& x, double u);

}  // namespace ftkreg
