#include "ftkreg/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ftkreg/error.hpp"

namespace ftkreg {

namespace {

enum Stream : std::uint64_t { kOuShocks = 1, kNoise = 2, kMar = 3, kStart = 4 };

double start_value(const OUParams& p, CounterRng& rng) {
  return p.stationary_start ? p.mu + p.stationary_sd() * rng.normal() : p.z0;
}

}  // namespace

double OUParams::stationary_sd() const { return sigma / std::sqrt(2.0 * theta); }

double ou_step(const OUParams& p, double z, double step, double gaussian) {
  if (p.euler) return z + p.theta * (p.mu - z) * step + p.sigma * std::sqrt(step) * gaussian;
  const double decay = std::exp(-p.theta * step);
  const double sd = p.sigma * std::sqrt(-std::expm1(-2.0 * p.theta * step) / (2.0 * p.theta));
  return p.mu + (z - p.mu) * decay + sd * gaussian;
}

std::vector<double> simulate_ou(const OUParams& p, std::size_t n_steps, CounterRng& rng) {
  if (!(p.theta > 0.0 && p.sigma > 0.0 && p.dt > 0.0))
    fail(ErrorCode::SpecInvalid, "OU parameters theta, sigma, dt must be positive");
  std::vector<double> z(n_steps + 1);
  z[0] = start_value(p, rng);
  for (std::size_t k = 1; k <= n_steps; ++k) z[k] = ou_step(p, z[k - 1], p.dt, rng.normal());
  return z;
}

long num_index(long z) {
  const long s = (z > 0) - (z < 0);
  return 1 + 2 * z * s - s * (1 + s) / 2;
}

double legendre_poly(int degree, double s) {
  if (degree < 0) fail(ErrorCode::InvalidArgument, "Legendre degree must be >= 0");
  if (degree == 0) return 1.0;
  double prev = 1.0, cur = s;
  for (int j = 1; j < degree; ++j) {
    const double next = ((2.0 * j + 1.0) * s * cur - j * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

LegendreTable::LegendreTable(const Grid& grid) : grid_(grid) {
  rows_.emplace_back(grid_.size(), 1.0);
  std::vector<double> p1(grid_.size());
  for (std::size_t i = 0; i < p1.size(); ++i) p1[i] = grid_.at(i);
  rows_.push_back(std::move(p1));
}

std::span<const double> LegendreTable::row(int degree) {
  if (degree < 0) fail(ErrorCode::InvalidArgument, "Legendre degree must be >= 0");
  while (static_cast<int>(rows_.size()) <= degree) {
    const int j = static_cast<int>(rows_.size()) - 1;
    const auto& cur = rows_[j];
    const auto& prev = rows_[j - 1];
    std::vector<double> next(grid_.size());
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = ((2.0 * j + 1.0) * grid_.at(i) * cur[i] - j * prev[i]) / (j + 1.0);
    rows_.push_back(std::move(next));
  }
  return rows_[degree];
}

void gamma_lift(double z, LegendreTable& table, std::span<double> out) {
  if (!std::isfinite(z)) fail(ErrorCode::InvalidArgument, "lift argument must be finite");
  const double fl = std::floor(z);
  const long k = static_cast<long>(fl);
  const double wa = 1.0 + fl - z;
  const double wb = z - fl;
  const auto pa = table.row(static_cast<int>(num_index(k)));
  const auto pb = table.row(static_cast<int>(num_index(k + 1)));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = wa * pa[i] + wb * pb[i];
}

Curve gamma_lift(double z, const Grid& grid) {
  LegendreTable table(grid);
  std::vector<double> v(grid.size());
  gamma_lift(z, table, v);
  return Curve(grid, std::move(v));
}

void sine_shape(double z, const Grid& grid, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = z * (1.0 - std::sin(grid.at(i) - std::numbers::pi / 3.0));
}

Curve sine_shape(double z, const Grid& grid) {
  std::vector<double> v(grid.size());
  sine_shape(z, grid, v);
  return Curve(grid, std::move(v));
}

double response_value(const Curve& x, ResponseOp op) {
  if (op == ResponseOp::IntegralSquare) {
    const auto w = x.grid().trapezoid_weights();
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i] * x[i];
    return s;
  }
  const double v = integrate_curve(differentiate_curve(x, 1));
  return v * v;
}

double mar_probability(const Curve& x, double offset) {
  return expit(response_value(x, ResponseOp::IntegralSquare) - offset);
}

SimSpec SimSpec::legendre_default() { return SimSpec{}; }

SimSpec SimSpec::sine_default() {
  SimSpec s;
  s.model = Model::SineShape;
  s.grid = Grid(0.0, std::numbers::pi / 3.0, 100);
  s.response = ResponseOp::DerivIntegralSquare;
  s.noise = Noise::GaussianIID;
  s.noise_sd = 0.075;
  s.delta = 0.3;
  s.T = 60.0;
  return s;
}

std::size_t SimSpec::n_observations() const {
  if (!(delta > 0.0) || !(T > 0.0)) fail(ErrorCode::SpecInvalid, "T and delta must be positive");
  const double ratio = T / delta;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    fail(ErrorCode::SpecInvalid, "T must be an integer multiple of delta");
  return static_cast<std::size_t>(n);
}

void SimSpec::validate() const {
  n_observations();
  if (!(ou.theta > 0.0 && ou.sigma > 0.0 && ou.dt > 0.0))
    fail(ErrorCode::SpecInvalid, "OU parameters theta, sigma, dt must be positive");
  if (!std::isfinite(ou.mu) || !std::isfinite(ou.z0))
    fail(ErrorCode::SpecInvalid, "OU mean and start must be finite");
  if (!(noise_sd >= 0.0)) fail(ErrorCode::SpecInvalid, "noise_sd must be >= 0");
  if (!std::isfinite(mar_offset)) fail(ErrorCode::SpecInvalid, "mar offset must be finite");
  const bool legendre = model == Model::LegendreLift;
  const double lo = legendre ? -1.0 : 0.0;
  const double hi = legendre ? 1.0 : std::numbers::pi / 3.0;
  if (std::abs(grid.start() - lo) > 1e-12 || std::abs(grid.end() - hi) > 1e-12)
    fail(ErrorCode::SpecInvalid, legendre ? "Legendre lift needs the grid interval [-1, 1]"
                                          : "sine shape needs the grid interval [0, pi/3]");
  const std::size_t min_points = response == ResponseOp::DerivIntegralSquare ? 3 : 2;
  if (grid.size() < min_points) fail(ErrorCode::SpecInvalid, "curve grid too coarse");
}

void lift_curve(const SimSpec& spec, double z, LegendreTable& table, std::span<double> out) {
  if (spec.model == SimSpec::Model::LegendreLift)
    gamma_lift(z, table, out);
  else
    sine_shape(z, spec.grid, out);
}

Curve lift_curve(const SimSpec& spec, double z) {
  LegendreTable table(spec.grid);
  std::vector<double> v(spec.grid.size());
  lift_curve(spec, z, table, v);
  return Curve(spec.grid, std::move(v));
}

FunctionalDataset generate(const SimSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_observations();
  const std::size_t p = spec.grid.size();

  // Latent OU path sampled at t_k = k delta on the dt clock.
  CounterRng start_rng(spec.seed, kStart);
  CounterRng shock_rng(spec.seed, kOuShocks);
  const double dt = spec.ou.dt;
  const auto full_steps = static_cast<std::size_t>(std::floor(spec.delta / dt + 1e-9));
  const double remainder = spec.delta - static_cast<double>(full_steps) * dt;
  std::vector<double> z(n);
  double cur = start_value(spec.ou, start_rng);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t s = 0; s < full_steps; ++s) cur = ou_step(spec.ou, cur, dt, shock_rng.normal());
    if (remainder > 1e-12 * dt) cur = ou_step(spec.ou, cur, remainder, shock_rng.normal());
    z[k] = cur;
  }

  // Noise: Wiener increments over one time unit (lag ceil(1/delta) samples)
  // or i.i.d. Gaussian.
  CounterRng noise_rng(spec.seed, kNoise);
  std::vector<double> eps(n);
  if (spec.noise == SimSpec::Noise::WienerDiff) {
    const auto lag = static_cast<std::size_t>(std::ceil(1.0 / spec.delta - 1e-9));
    const double step_sd = std::sqrt(spec.delta);
    std::vector<double> u(n + lag + 1, 0.0);
    for (std::size_t i = 1; i < u.size(); ++i) u[i] = u[i - 1] + step_sd * noise_rng.normal();
    for (std::size_t k = 0; k < n; ++k) eps[k] = spec.noise_sd * (u[k + lag + 1] - u[k + 1]);
  } else {
    for (auto& e : eps) e = spec.noise_sd * noise_rng.normal();
  }

  CounterRng mar_rng(spec.seed, kMar);
  LegendreTable table(spec.grid);
  const auto w = spec.grid.trapezoid_weights();
  std::vector<double> values(n * p), times(n), y(n);
  std::vector<std::uint8_t> zeta(n);
  std::vector<double> deriv(p);
  for (std::size_t k = 0; k < n; ++k) {
    std::span<double> row(values.data() + k * p, p);
    lift_curve(spec, z[k], table, row);
    times[k] = static_cast<double>(k + 1) * spec.delta;

    double energy = 0.0;
    for (std::size_t i = 0; i < p; ++i) energy += w[i] * row[i] * row[i];
    double m;
    if (spec.response == ResponseOp::IntegralSquare) {
      m = energy;
    } else {
      differentiate_values(row, spec.grid.spacing(), 1, deriv);
      const double v = integrate_values(deriv, w);
      m = v * v;
    }
    const double coin = mar_rng.uniform();
    zeta[k] = spec.mar == SimSpec::Mar::None ? 1 : (coin < expit(energy - spec.mar_offset));
    y[k] = m + eps[k];
  }
  return FunctionalDataset(spec.grid, spec.delta, std::move(times), std::move(zeta), std::move(y),
                           std::move(values));
}

std::vector<Curve> draw_stationary_curves(const SimSpec& spec, std::size_t count,
                                          std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  LegendreTable table(spec.grid);
  std::vector<Curve> out;
  out.reserve(count);
  const double sd = spec.ou.stationary_sd();
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> v(spec.grid.size());
    lift_curve(spec, spec.ou.mu + sd * rng.normal(), table, v);
    out.emplace_back(spec.grid, std::move(v));
  }
  return out;
}

double calibrate_mar_offset(const SimSpec& spec, double missing_rate, std::size_t pilot,
                            std::uint64_t seed) {
  if (!(missing_rate > 0.0 && missing_rate < 1.0))
    fail(ErrorCode::InvalidArgument, "missing rate must lie in (0, 1)");
  if (pilot == 0) fail(ErrorCode::InvalidArgument, "pilot size must be positive");
  CounterRng rng(seed, 0xca11b);
  LegendreTable table(spec.grid);
  const auto w = spec.grid.trapezoid_weights();
  std::vector<double> energy(pilot);
  std::vector<double> row(spec.grid.size());
  const double sd = spec.ou.stationary_sd();
  for (std::size_t i = 0; i < pilot; ++i) {
    lift_curve(spec, spec.ou.mu + sd * rng.normal(), table, row);
    double e = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) e += w[j] * row[j] * row[j];
    energy[i] = e;
  }
  auto missing = [&](double c) {
    double s = 0.0;
    for (double e : energy) s += 1.0 - expit(e - c);
    return s / static_cast<double>(pilot);
  };
  // missing(c) increases with c.
  const auto [mn, mx] = std::minmax_element(energy.begin(), energy.end());
  double lo = *mn - 60.0, hi = *mx + 60.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (missing(mid) < missing_rate)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace ftkreg
