#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ftkreg/funcdata.hpp"

namespace ftkreg {

enum class KernelType { Quadratic };

/// Kernel supported on [0, 1]; zero beyond 1. `scale` multiplies the whole
/// profile (ratio estimators are invariant to it).
class Kernel {
 public:
  static Kernel quadratic(double scale = 1.0);

  KernelType type() const noexcept { return type_; }
  double scale() const noexcept { return scale_; }

  /// K(u). Throws NegativeArgument for u < 0.
  double operator()(double u) const;
  /// K'(u) on [0, 1].
  double derivative(double u) const;
  /// d/du K(u)^j for j in {1, 2}.
  double power_derivative(int j, double u) const;
  double at_one() const { return (*this)(1.0); }

 private:
  Kernel(KernelType type, double scale) : type_(type), scale_(scale) {}
  KernelType type_;
  double scale_;
};

double kernel_eval(const Kernel& k, double u);

/// L2 distance between curves, or between their derivatives of order 1 or 2.
class SemiMetric {
 public:
  static SemiMetric l2() { return SemiMetric(0); }
  static SemiMetric l2_deriv(int order);

  int derivative_order() const noexcept { return order_; }

  /// Representation on which the plain weighted L2 distance is taken.
  std::vector<double> features(const Curve& c) const;
  void features(std::span<const double> values, double spacing, std::span<double> out) const;

  friend bool operator==(const SemiMetric&, const SemiMetric&) = default;

 private:
  explicit SemiMetric(int order) : order_(order) {}
  int order_;
};

/// sqrt(sum_i w_i (a_i - b_i)^2), summed in a fixed order.
double feature_distance(std::span<const double> a, std::span<const double> b,
                        std::span<const double> weights);

double semimetric_eval(const SemiMetric& m, const Curve& x1, const Curve& x2);

Kernel parse_kernel(std::string_view name);
SemiMetric parse_semimetric(std::string_view name);
std::string to_string(const SemiMetric& m);
std::string to_string(const Kernel& k);

/// A dataset together with the semi-metric features of every curve, so that
/// distances to a query cost one pass over the stored features.
class MetricDataset {
 public:
  MetricDataset(std::shared_ptr<const FunctionalDataset> data, SemiMetric metric);

  const FunctionalDataset& data() const noexcept { return *data_; }
  const SemiMetric& metric() const noexcept { return metric_; }
  std::size_t size() const noexcept { return data_->size(); }

  std::span<const double> features(std::size_t k) const noexcept {
    return {features_.data() + k * dim_, dim_};
  }
  std::span<const double> weights() const noexcept { return weights_; }

  /// Features of an external curve; throws GridMismatch on a foreign grid.
  std::vector<double> query_features(const Curve& x) const;

  double distance(std::span<const double> query, std::size_t k) const {
    return feature_distance(query, features(k), weights_);
  }
  /// Distances from the query features to every stored curve.
  std::vector<double> distances(std::span<const double> query) const;

 private:
  std::shared_ptr<const FunctionalDataset> data_;
  SemiMetric metric_;
  std::size_t dim_;
  std::vector<double> weights_;
  std::vector<double> features_;
};

}  // namespace ftkreg
