#include "ftkreg/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ftkreg/error.hpp"

namespace ftkreg {

WeightProfile::WeightProfile(const MetricDataset& data, std::vector<double> distances, double h,
                             const Kernel& kernel)
    : data_(&data), kernel_(kernel), h_(h), dist_(std::move(distances)), delta_(dist_.size()) {
  if (!(h > 0.0)) fail(ErrorCode::InvalidArgument, "bandwidth must be positive");
  if (dist_.size() != data.size())
    fail(ErrorCode::InvalidArgument, "distance vector length differs from dataset size");
  for (std::size_t k = 0; k < dist_.size(); ++k) delta_[k] = kernel_(dist_[k] / h_);
}

WeightProfile make_profile(const MetricDataset& data, std::span<const double> query_features,
                           const EstimatorConfig& cfg, KnnCrossValidator* validator) {
  if (!(cfg.metric == data.metric()))
    fail(ErrorCode::InvalidArgument, "dataset was prepared for a different semi-metric");
  auto dist = data.distances(query_features);
  const auto choice = resolve_bandwidth(data, dist, cfg.bandwidth, cfg.kernel, validator);
  return WeightProfile(data, std::move(dist), choice.h, cfg.kernel);
}

WeightProfile make_profile(const MetricDataset& data, const Curve& x, const EstimatorConfig& cfg,
                           KnnCrossValidator* validator) {
  const auto q = data.query_features(x);
  return make_profile(data, q, cfg, validator);
}

double regress(const WeightProfile& w, const Psi& psi) {
  const auto& ds = w.data().data();
  const auto y = ds.responses();
  const auto delta = w.kernel_weights();
  double num = 0.0, den = 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    if (!ds.observed(k)) continue;
    const double v = psi(y[k]);
    num += delta[k] * v;
    den += delta[k];
    if (delta[k] > 0.0) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(den > 0.0))
    fail(ErrorCode::EmptyNeighborhood, "no observed response within the bandwidth");
  // Rounding must not push the ratio outside the contributing responses.
  return std::clamp(num / den, lo, hi);
}

double estimate_cdf(const WeightProfile& w, double y) {
  return std::clamp(regress(w, Psi::indicator(y)), 0.0, 1.0);
}

double estimate_quantile(const WeightProfile& w, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(ErrorCode::InvalidArgument, "quantile level must lie in (0, 1)");
  const auto& ds = w.data().data();
  const auto y = ds.responses();
  std::vector<double> support;
  for (std::size_t k = 0; k < ds.size(); ++k)
    if (w.mar_weight(k) > 0.0) support.push_back(y[k]);
  if (support.empty())
    fail(ErrorCode::EmptyNeighborhood, "no observed response within the bandwidth");
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());

  // First support point whose CDF value reaches alpha; the CDF is evaluated
  // by the same routine callers use, so F(q) >= alpha holds exactly.
  std::size_t lo = 0, hi = support.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (estimate_cdf(w, support[mid]) >= alpha)
      hi = mid;
    else
      lo = mid + 1;
  }
  return support[lo];
}

double estimate_p(const WeightProfile& w) {
  const auto& ds = w.data().data();
  const auto delta = w.kernel_weights();
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    num += ds.zeta(k) * delta[k];
    den += delta[k];
  }
  if (!(den > 0.0)) fail(ErrorCode::EmptyNeighborhood, "no curve within the bandwidth");
  return num / den;
}

double estimate_Fx(std::span<const double> distances, double u) {
  if (u < 0.0) fail(ErrorCode::NegativeArgument, "ball radius must be >= 0");
  if (distances.empty()) fail(ErrorCode::EmptyInput, "no distances");
  std::size_t c = 0;
  for (double d : distances) c += (d <= u);
  return static_cast<double>(c) / static_cast<double>(distances.size());
}

std::vector<double> estimate_tau0(std::span<const double> distances, double h,
                                  std::span<const double> u_grid) {
  if (distances.empty()) fail(ErrorCode::EmptyInput, "no distances");
  std::vector<double> sorted(distances.begin(), distances.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  auto F = [&](double r) {
    return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), r) -
                               sorted.begin()) /
           n;
  };
  const double Fh = F(h);
  if (!(Fh > 0.0)) fail(ErrorCode::DegenerateBall, "no curve inside the ball of radius h");
  std::vector<double> out(u_grid.size());
  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    if (u_grid[i] < 0.0 || u_grid[i] > 1.0)
      fail(ErrorCode::InvalidArgument, "tau0 grid must lie in [0, 1]");
    out[i] = F(u_grid[i] * h) / Fh;
  }
  return out;
}

double estimate_W2bar(const WeightProfile& w, const Psi& psi) {
  const double m = regress(w, psi);
  const auto& ds = w.data().data();
  const auto y = ds.responses();
  const auto delta = w.kernel_weights();
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    if (!ds.observed(k)) continue;
    const double r = psi(y[k]) - m;
    num += delta[k] * r * r;
    den += delta[k];
  }
  return num / den;
}

DensityEstimate estimate_cond_density(const WeightProfile& w, double y, double h_y,
                                      double floor) {
  if (!(h_y > 0.0)) fail(ErrorCode::InvalidArgument, "density window must be positive");
  DensityEstimate g;
  g.raw = (estimate_cdf(w, y + h_y) - estimate_cdf(w, y - h_y)) / (2.0 * h_y);
  g.floored = g.raw < floor;
  g.value = g.floored ? floor : g.raw;
  return g;
}

double default_density_bandwidth(const WeightProfile& w) {
  const auto& ds = w.data().data();
  const auto y = ds.responses();
  double sw = 0.0, sw2 = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const double wk = w.mar_weight(k);
    if (wk <= 0.0) continue;
    sw += wk;
    sw2 += wk * wk;
    sy += wk * y[k];
  }
  if (!(sw > 0.0)) fail(ErrorCode::EmptyNeighborhood, "no observed response within the bandwidth");
  const double mean = sy / sw;
  double var = 0.0;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const double wk = w.mar_weight(k);
    if (wk <= 0.0) continue;
    var += wk * (y[k] - mean) * (y[k] - mean);
  }
  var /= sw;
  const double n_eff = sw * sw / sw2;
  const double h = 1.06 * std::sqrt(var) * std::pow(n_eff, -0.2);
  return h > 0.0 ? h : 1e-6 * std::max(1.0, std::abs(mean));
}

Moments estimate_moments(const Kernel& kernel, std::span<const double> u_grid,
                         std::span<const double> tau0) {
  if (u_grid.size() != tau0.size() || u_grid.size() < 2)
    fail(ErrorCode::InvalidArgument, "tau0 needs a grid of at least 2 points");
  auto moment = [&](int j) {
    double integral = 0.0;
    double prev = kernel.power_derivative(j, u_grid[0]) * tau0[0];
    for (std::size_t i = 1; i < u_grid.size(); ++i) {
      const double cur = kernel.power_derivative(j, u_grid[i]) * tau0[i];
      integral += 0.5 * (prev + cur) * (u_grid[i] - u_grid[i - 1]);
      prev = cur;
    }
    return std::pow(kernel.at_one(), j) - integral;
  };
  return {moment(1), moment(2)};
}

std::vector<double> uniform_unit_grid(std::size_t points) {
  if (points < 2) fail(ErrorCode::InvalidArgument, "unit grid needs at least 2 points");
  std::vector<double> u(points);
  for (std::size_t i = 0; i < points; ++i)
    u[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  return u;
}

VarianceComponents estimate_components(const WeightProfile& w, const EstimatorConfig& cfg) {
  VarianceComponents c;
  c.Fx = estimate_Fx(w.distances(), w.bandwidth());
  c.p = estimate_p(w);
  c.u_grid = uniform_unit_grid(cfg.tau0_points);
  c.tau0 = estimate_tau0(w.distances(), w.bandwidth(), c.u_grid);
  const auto m = estimate_moments(w.kernel(), c.u_grid, c.tau0);
  c.M1 = m.M1;
  c.M2 = m.M2;
  return c;
}

double regress(const MetricDataset& data, const Curve& x, const Psi& psi,
               const EstimatorConfig& cfg) {
  return regress(make_profile(data, x, cfg), psi);
}

double estimate_cdf(const MetricDataset& data, const Curve& x, double y,
                    const EstimatorConfig& cfg) {
  return estimate_cdf(make_profile(data, x, cfg), y);
}

double estimate_quantile(const MetricDataset& data, const Curve& x, double alpha,
                         const EstimatorConfig& cfg) {
  return estimate_quantile(make_profile(data, x, cfg), alpha);
}

double estimate_p(const MetricDataset& data, const Curve& x, const EstimatorConfig& cfg) {
  return estimate_p(make_profile(data, x, cfg));
}

double estimate_Fx(const MetricDataset& data, const Curve& x, double u) {
  const auto q = data.query_features(x);
  return estimate_Fx(data.distances(q), u);
}

}  // namespace ftkreg
