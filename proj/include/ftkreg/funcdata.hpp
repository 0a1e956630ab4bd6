#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ftkreg {

/// Uniform abscissa grid shared by every curve of a dataset.
class Grid {
 public:
  Grid(double start, double end, std::size_t n_points);

  double start() const noexcept { return start_; }
  double end() const noexcept { return end_; }
  std::size_t size() const noexcept { return n_points_; }
  double spacing() const noexcept { return (end_ - start_) / static_cast<double>(n_points_ - 1); }
  double at(std::size_t i) const noexcept;

  /// Trapezoid quadrature weights: spacing in the interior, half at the ends.
  std::vector<double> trapezoid_weights() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double start_;
  double end_;
  std::size_t n_points_;
};

/// A real function sampled on a Grid.
class Curve {
 public:
  Curve(Grid grid, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  Grid grid_;
  std::vector<double> values_;
};

struct Observation {
  double t = 0.0;
  Curve x;
  std::optional<double> y;  // present iff zeta == 1
  std::uint8_t zeta = 0;
};

/// Regularly sampled functional time series with possibly missing responses.
///
/// Observation k (0-based) sits at time t = (k + 1) * delta. Curves are
/// stored row-major in one buffer; responses of unobserved instants are NaN
/// internally and exposed as std::nullopt.
class FunctionalDataset {
 public:
  FunctionalDataset(Grid grid, double delta, std::vector<double> times,
                    std::vector<std::uint8_t> zeta, std::vector<double> y,
                    std::vector<double> values);

  static FunctionalDataset from_observations(const Grid& grid, double delta,
                                             const std::vector<Observation>& obs);

  std::size_t size() const noexcept { return times_.size(); }
  const Grid& grid() const noexcept { return grid_; }
  double delta() const noexcept { return delta_; }
  double horizon() const noexcept { return delta_ * static_cast<double>(size()); }

  double time(std::size_t k) const noexcept { return times_[k]; }
  bool observed(std::size_t k) const noexcept { return zeta_[k] != 0; }
  std::uint8_t zeta(std::size_t k) const noexcept { return zeta_[k]; }
  std::optional<double> response(std::size_t k) const;
  /// Raw response column: NaN where zeta == 0.
  std::span<const double> responses() const noexcept { return y_; }
  std::span<const std::uint8_t> zetas() const noexcept { return zeta_; }
  std::span<const double> times() const noexcept { return times_; }

  std::span<const double> curve_values(std::size_t k) const noexcept {
    return {values_.data() + k * grid_.size(), grid_.size()};
  }
  std::span<const double> all_values() const noexcept { return values_; }
  Curve curve(std::size_t k) const;
  Observation observation(std::size_t k) const;

  std::size_t observed_count() const noexcept;

  /// Keeps every `stride`-th observation (indices stride-1, 2*stride-1, ...),
  /// re-timed on the mesh stride * delta.
  FunctionalDataset subsample(std::size_t stride) const;

 private:
  Grid grid_;
  double delta_;
  std::vector<double> times_;
  std::vector<std::uint8_t> zeta_;
  std::vector<double> y_;
  std::vector<double> values_;
};

/// Trapezoid-rule integral over [grid.start, grid.end].
double integrate_curve(const Curve& c);
double integrate_values(std::span<const double> values, std::span<const double> weights);

/// Finite-difference derivative of order 1 or 2 on the stored grid.
/// Throws GridTooCoarse when the grid has fewer than order + 2 points.
Curve differentiate_curve(const Curve& c, int order);
void differentiate_values(std::span<const double> values, double spacing, int order,
                          std::span<double> out);

}  // namespace ftkreg
