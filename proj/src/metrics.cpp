#include "ftkreg/metrics.hpp"

#include <cmath>

#include "ftkreg/error.hpp"

namespace ftkreg {

Kernel Kernel::quadratic(double scale) {
  if (!(scale > 0.0)) fail(ErrorCode::InvalidArgument, "kernel scale must be positive");
  return Kernel(KernelType::Quadratic, scale);
}

double Kernel::operator()(double u) const {
  if (u < 0.0 || std::isnan(u)) fail(ErrorCode::NegativeArgument, "kernel argument must be >= 0");
  if (u > 1.0) return 0.0;
  return scale_ * 0.75 * (1.0 - u * u);
}

double Kernel::derivative(double u) const {
  if (u < 0.0 || u > 1.0) return 0.0;
  return -scale_ * 1.5 * u;
}

double Kernel::power_derivative(int j, double u) const {
  if (j == 1) return derivative(u);
  if (j == 2) return 2.0 * (*this)(u) * derivative(u);
  fail(ErrorCode::InvalidArgument, "kernel power must be 1 or 2");
}

double kernel_eval(const Kernel& k, double u) { return k(u); }

SemiMetric SemiMetric::l2_deriv(int order) {
  if (order != 1 && order != 2)
    fail(ErrorCode::InvalidArgument, "derivative semi-metric order must be 1 or 2");
  return SemiMetric(order);
}

void SemiMetric::features(std::span<const double> values, double spacing,
                          std::span<double> out) const {
  if (order_ == 0) {
    std::copy(values.begin(), values.end(), out.begin());
    return;
  }
  if (values.size() < static_cast<std::size_t>(order_) + 2)
    fail(ErrorCode::GridTooCoarse, "grid too coarse for derivative semi-metric");
  differentiate_values(values, spacing, order_, out);
}

std::vector<double> SemiMetric::features(const Curve& c) const {
  std::vector<double> out(c.size());
  features(c.values(), c.grid().spacing(), out);
  return out;
}

double feature_distance(std::span<const double> a, std::span<const double> b,
                        std::span<const double> w) {
  const std::size_t n = a.size();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = a[i] - b[i];
    const double d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2];
    const double d3 = a[i + 3] - b[i + 3];
    s0 += w[i] * d0 * d0;
    s1 += w[i + 1] * d1 * d1;
    s2 += w[i + 2] * d2 * d2;
    s3 += w[i + 3] * d3 * d3;
  }
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s0 += w[i] * d * d;
  }
  return std::sqrt((s0 + s1) + (s2 + s3));
}

double semimetric_eval(const SemiMetric& m, const Curve& x1, const Curve& x2) {
  if (!(x1.grid() == x2.grid())) fail(ErrorCode::GridMismatch, "curves live on different grids");
  const auto f1 = m.features(x1);
  const auto f2 = m.features(x2);
  const auto w = x1.grid().trapezoid_weights();
  return feature_distance(f1, f2, w);
}

Kernel parse_kernel(std::string_view name) {
  if (name == "quadratic") return Kernel::quadratic();
  fail(ErrorCode::Parse, "unknown kernel '" + std::string(name) + "'");
}

SemiMetric parse_semimetric(std::string_view name) {
  if (name == "l2") return SemiMetric::l2();
  if (name == "l2deriv1") return SemiMetric::l2_deriv(1);
  if (name == "l2deriv2") return SemiMetric::l2_deriv(2);
  fail(ErrorCode::Parse, "unknown semimetric '" + std::string(name) + "'");
}

std::string to_string(const SemiMetric& m) {
  switch (m.derivative_order()) {
    case 1: return "l2deriv1";
    case 2: return "l2deriv2";
    default: return "l2";
  }
}

std::string to_string(const Kernel&) { return "quadratic"; }

MetricDataset::MetricDataset(std::shared_ptr<const FunctionalDataset> data, SemiMetric metric)
    : data_(std::move(data)),
      metric_(metric),
      dim_(data_->grid().size()),
      weights_(data_->grid().trapezoid_weights()),
      features_(data_->size() * dim_) {
  const double h = data_->grid().spacing();
  for (std::size_t k = 0; k < data_->size(); ++k)
    metric_.features(data_->curve_values(k), h, {features_.data() + k * dim_, dim_});
}

std::vector<double> MetricDataset::query_features(const Curve& x) const {
  if (!(x.grid() == data_->grid()))
    fail(ErrorCode::GridMismatch, "query curve grid differs from dataset grid");
  return metric_.features(x);
}

std::vector<double> MetricDataset::distances(std::span<const double> query) const {
  std::vector<double> d(size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = distance(query, k);
  return d;
}

}  // namespace ftkreg
