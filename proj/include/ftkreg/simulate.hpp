#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ftkreg/funcdata.hpp"
#include "ftkreg/stats.hpp"

namespace ftkreg {

/// dZ = theta (mu - Z) dt + sigma dW.
struct OUParams {
  double theta = 2.0;
  double mu = 5.0;
  double sigma = 7.0;
  double dt = 0.005;
  double z0 = 5.0;
  /// Draw Z_0 from the stationary law instead of using z0.
  bool stationary_start = true;
  /// Euler-Maruyama instead of the exact Gaussian transition.
  bool euler = false;

  double stationary_sd() const;
};

/// Path Z_0, ..., Z_{n_steps} on the dt clock. Z_0 is z0, or a stationary
/// draw when p.stationary_start is set.
std::vector<double> simulate_ou(const OUParams& p, std::size_t n_steps, CounterRng& rng);
/// One transition of length `step` (exact or Euler per p.euler).
double ou_step(const OUParams& p, double z, double step, double gaussian);

/// 1 + 2 z sign(z) - sign(z) (1 + sign(z)) / 2.
long num_index(long z);
double legendre_poly(int degree, double s);

/// Legendre polynomials tabulated on a grid, extended on demand.
class LegendreTable {
 public:
  explicit LegendreTable(const Grid& grid);
  std::span<const double> row(int degree);
  const Grid& grid() const noexcept { return grid_; }

 private:
  Grid grid_;
  std::vector<std::vector<double>> rows_;
};

/// Gamma(z) = (1 + fl(z) - z) P_num(fl(z)) + (z - fl(z)) P_num(fl(z) + 1).
Curve gamma_lift(double z, const Grid& grid);
void gamma_lift(double z, LegendreTable& table, std::span<double> out);
/// z (1 - sin(s - pi/3)).
Curve sine_shape(double z, const Grid& grid);
void sine_shape(double z, const Grid& grid, std::span<double> out);

enum class ResponseOp { IntegralSquare, DerivIntegralSquare };
double response_value(const Curve& x, ResponseOp op);

/// expit(int x^2 - offset).
double mar_probability(const Curve& x, double offset = 0.0);

struct SimSpec {
  enum class Model { LegendreLift, SineShape };
  enum class Noise { WienerDiff, GaussianIID };
  enum class Mar { None, Expit };

  Model model = Model::LegendreLift;
  OUParams ou;
  Grid grid{-1.0, 1.0, 400};
  ResponseOp response = ResponseOp::IntegralSquare;
  Noise noise = Noise::WienerDiff;
  /// Standard deviation of GaussianIID noise; scale factor for WienerDiff.
  double noise_sd = 1.0;
  Mar mar = Mar::None;
  double mar_offset = 0.0;
  double T = 50.0;
  double delta = 0.005;
  std::uint64_t seed = 42;

  /// Legendre lift on [-1, 1] x 400, Wiener-increment noise.
  static SimSpec legendre_default();
  /// Sine shape on [0, pi/3] x 100, N(0, 0.075^2) noise, n = 200 at delta 0.3.
  static SimSpec sine_default();

  std::size_t n_observations() const;
  void validate() const;
};

/// Covariate curve the model attaches to a latent value z.
void lift_curve(const SimSpec& spec, double z, LegendreTable& table, std::span<double> out);
Curve lift_curve(const SimSpec& spec, double z);

/// Dataset on t_k = k delta, k = 1..T/delta. The OU path, the noise and the
/// MAR coin flips use separate substreams of spec.seed.
FunctionalDataset generate(const SimSpec& spec);

/// Offset c such that the stationary mean of 1 - expit(int X^2 - c) equals
/// `missing_rate`, by bisection over a pilot of stationary draws.
double calibrate_mar_offset(const SimSpec& spec, double missing_rate, std::size_t pilot = 100000,
                            std::uint64_t seed = 7);

/// Independent draws from the stationary covariate law.
std::vector<Curve> draw_stationary_curves(const SimSpec& spec, std::size_t count,
                                          std::uint64_t seed, std::uint64_t stream);

}  // namespace ftkreg
