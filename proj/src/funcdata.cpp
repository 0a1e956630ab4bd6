#include "ftkreg/funcdata.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ftkreg/error.hpp"

namespace ftkreg {

Grid::Grid(double start, double end, std::size_t n_points)
    : start_(start), end_(end), n_points_(n_points) {
  if (!std::isfinite(start) || !std::isfinite(end) || !(start < end))
    fail(ErrorCode::InvalidArgument, "grid requires finite start < end");
  if (n_points < 2) fail(ErrorCode::InvalidArgument, "grid requires at least 2 points");
  if (!(spacing() > 0.0)) fail(ErrorCode::InvalidArgument, "grid spacing underflows");
}

double Grid::at(std::size_t i) const noexcept {
  if (i + 1 == n_points_) return end_;
  return start_ + static_cast<double>(i) * spacing();
}

std::vector<double> Grid::trapezoid_weights() const {
  std::vector<double> w(n_points_, spacing());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

Curve::Curve(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    fail(ErrorCode::InvalidArgument, "curve has " + std::to_string(values_.size()) +
                                         " values, grid has " + std::to_string(grid_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "curve values must be finite");
}

FunctionalDataset::FunctionalDataset(Grid grid, double delta, std::vector<double> times,
                                     std::vector<std::uint8_t> zeta, std::vector<double> y,
                                     std::vector<double> values)
    : grid_(grid),
      delta_(delta),
      times_(std::move(times)),
      zeta_(std::move(zeta)),
      y_(std::move(y)),
      values_(std::move(values)) {
  if (!(delta_ > 0.0) || !std::isfinite(delta_))
    fail(ErrorCode::InvalidArgument, "sampling mesh must be positive");
  const std::size_t n = times_.size();
  if (n == 0) fail(ErrorCode::InvalidArgument, "dataset needs at least one observation");
  if (zeta_.size() != n || y_.size() != n || values_.size() != n * grid_.size())
    fail(ErrorCode::InvalidArgument, "dataset columns have inconsistent lengths");
  for (std::size_t k = 0; k < n; ++k) {
    const double expected = static_cast<double>(k + 1) * delta_;
    if (std::abs(times_[k] - expected) > 1e-9 * std::max(1.0, expected))
      fail(ErrorCode::InvalidArgument,
           "observation " + std::to_string(k) + " is not on the mesh t_k = k * delta");
    if (zeta_[k] > 1) fail(ErrorCode::InvalidArgument, "zeta must be 0 or 1");
    if (zeta_[k] == 1 && !std::isfinite(y_[k]))
      fail(ErrorCode::InvalidArgument, "observed response must be finite");
    if (zeta_[k] == 0) y_[k] = std::numeric_limits<double>::quiet_NaN();
  }
  for (double v : values_)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "curve values must be finite");
}

FunctionalDataset FunctionalDataset::from_observations(const Grid& grid, double delta,
                                                       const std::vector<Observation>& obs) {
  std::vector<double> times, y, values;
  std::vector<std::uint8_t> zeta;
  times.reserve(obs.size());
  values.reserve(obs.size() * grid.size());
  for (const auto& o : obs) {
    if (!(o.x.grid() == grid)) fail(ErrorCode::GridMismatch, "observation curve grid differs");
    if ((o.zeta == 1) != o.y.has_value())
      fail(ErrorCode::InvalidArgument, "zeta must be 1 exactly when y is present");
    times.push_back(o.t);
    zeta.push_back(o.zeta);
    y.push_back(o.y.value_or(std::numeric_limits<double>::quiet_NaN()));
    values.insert(values.end(), o.x.values().begin(), o.x.values().end());
  }
  return {grid, delta, std::move(times), std::move(zeta), std::move(y), std::move(values)};
}

std::optional<double> FunctionalDataset::response(std::size_t k) const {
  if (zeta_[k] == 0) return std::nullopt;
  return y_[k];
}

Curve FunctionalDataset::curve(std::size_t k) const {
  auto v = curve_values(k);
  return Curve(grid_, std::vector<double>(v.begin(), v.end()));
}

Observation FunctionalDataset::observation(std::size_t k) const {
  return Observation{times_[k], curve(k), response(k), zeta_[k]};
}

std::size_t FunctionalDataset::observed_count() const noexcept {
  std::size_t c = 0;
  for (auto z : zeta_) c += z;
  return c;
}

FunctionalDataset FunctionalDataset::subsample(std::size_t stride) const {
  if (stride == 0) fail(ErrorCode::InvalidArgument, "subsample stride must be positive");
  const std::size_t m = size() / stride;
  if (m == 0) fail(ErrorCode::InsufficientData, "subsample stride exceeds dataset size");
  const double mesh = delta_ * static_cast<double>(stride);
  const std::size_t p = grid_.size();
  std::vector<double> times(m), y(m), values(m * p);
  std::vector<std::uint8_t> zeta(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t k = (j + 1) * stride - 1;
    times[j] = static_cast<double>(j + 1) * mesh;
    zeta[j] = zeta_[k];
    y[j] = y_[k];
    auto src = curve_values(k);
    std::copy(src.begin(), src.end(), values.begin() + static_cast<std::ptrdiff_t>(j * p));
  }
  return {grid_, mesh, std::move(times), std::move(zeta), std::move(y), std::move(values)};
}

double integrate_values(std::span<const double> values, std::span<const double> weights) {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += weights[i] * values[i];
  return s;
}

double integrate_curve(const Curve& c) {
  const auto w = c.grid().trapezoid_weights();
  return integrate_values(c.values(), w);
}

void differentiate_values(std::span<const double> f, double h, int order, std::span<double> out) {
  const std::size_t n = f.size();
  if (order == 1) {
    const double inv = 1.0 / (2.0 * h);
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) * inv;
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv;
  } else {
    const double inv = 1.0 / (h * h);
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * inv;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv;
    out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * inv;
  }
}

Curve differentiate_curve(const Curve& c, int order) {
  if (order != 1 && order != 2)
    fail(ErrorCode::InvalidArgument, "derivative order must be 1 or 2");
  if (c.size() < static_cast<std::size_t>(order) + 2)
    fail(ErrorCode::GridTooCoarse, "grid too coarse for derivative of order " +
                                       std::to_string(order));
  std::vector<double> out(c.size());
  differentiate_values(c.values(), c.grid().spacing(), order, out);
  return Curve(c.grid(), std::move(out));
}

}  // namespace ftkreg
