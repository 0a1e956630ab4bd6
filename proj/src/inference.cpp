#include "ftkreg/inference.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "ftkreg/error.hpp"

namespace ftkreg {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(ErrorCode::InvalidArgument, "interval risk alpha must lie in (0, 1)");
}

VarianceComponents checked_components(const WeightProfile& w, const EstimatorConfig& cfg) {
  auto c = estimate_components(w, cfg);
  if (!(c.p > 0.0)) fail(ErrorCode::ZeroMissingness, "no observed response in the neighbourhood");
  return c;
}

double w2bar_for(const WeightProfile& w, const Psi& psi, double m) {
  return psi.kind == Psi::Kind::IndicatorLeq ? w2bar_indicator(m) : estimate_W2bar(w, psi);
}

// sqrt(M2) / M1 * sqrt(v / (n Fx p))
double asymptotic_scale(const VarianceComponents& c, double v, std::size_t n) {
  return std::sqrt(c.M2) / c.M1 * std::sqrt(v / (static_cast<double>(n) * c.Fx * c.p));
}

}  // namespace

std::string to_string(CIMethod m) {
  return m == CIMethod::Asymptotic ? "asymptotic" : "bootstrap";
}

BootstrapWeights draw_bootstrap_weights(std::size_t n, WeightLaw law, CounterRng& rng) {
  BootstrapWeights out;
  out.law = law;
  out.w.assign(n, 0.0);
  if (law == WeightLaw::UnitExponential) {
    for (auto& v : out.w) v = rng.exponential();
  } else {
    for (std::size_t i = 0; i < n; ++i) out.w[rng.below(n)] += 1.0;
  }
  return out;
}

CIResult ci_asymptotic(const WeightProfile& w, const CIRequest& req, const EstimatorConfig& cfg) {
  check_alpha(req.alpha);
  CIResult r;
  r.method = CIMethod::Asymptotic;
  r.h = w.bandwidth();
  r.components = checked_components(w, cfg);
  r.point = regress(w, req.psi);
  r.components.W2bar = w2bar_for(w, req.psi, r.point);
  r.quantile_used = normal_quantile(1.0 - req.alpha / 2.0);
  const double half =
      r.quantile_used * asymptotic_scale(r.components, r.components.W2bar, w.data().size());
  r.lower = r.point - half;
  r.upper = r.point + half;
  return r;
}

CIResult ci_quantile(const WeightProfile& w, double alpha_q, double alpha,
                     const EstimatorConfig& cfg) {
  check_alpha(alpha);
  if (!(alpha_q > 0.0 && alpha_q < 1.0))
    fail(ErrorCode::InvalidArgument, "quantile level must lie in (0, 1)");
  CIResult r;
  r.method = CIMethod::Asymptotic;
  r.h = w.bandwidth();
  r.components = checked_components(w, cfg);
  r.point = estimate_quantile(w, alpha_q);
  r.components.W2bar = alpha_q * (1.0 - alpha_q);
  const double h_y =
      cfg.density_bandwidth > 0.0 ? cfg.density_bandwidth : default_density_bandwidth(w);
  const auto g = estimate_cond_density(w, r.point, h_y, cfg.density_floor);
  if (g.floored)
    fail(ErrorCode::DensityFloorHit, "conditional density at the quantile is below the floor");
  r.quantile_used = normal_quantile(1.0 - alpha / 2.0);
  const double half = r.quantile_used *
                      asymptotic_scale(r.components, r.components.W2bar, w.data().size()) /
                      g.value;
  r.lower = r.point - half;
  r.upper = r.point + half;
  return r;
}

std::vector<double> bootstrap_summands(const WeightProfile& w, const Psi& psi) {
  const auto& ds = w.data().data();
  const std::size_t n = ds.size();
  std::vector<double> xi(n, 0.0);
  const auto delta = w.kernel_weights();
  double mass = 0.0;
  for (std::size_t k = 0; k < n; ++k) mass += w.mar_weight(k);
  if (!(mass > 0.0)) return xi;

  const double m = regress(w, psi);
  const double fx = estimate_Fx(w.distances(), w.bandwidth());
  const double scale = std::sqrt(fx / static_cast<double>(n)) / (mass / static_cast<double>(n));
  const auto y = ds.responses();
  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!ds.observed(k)) continue;
    xi[k] = scale * (psi(y[k]) - m) * delta[k];
    mean += xi[k];
  }
  mean /= static_cast<double>(n);
  for (auto& v : xi) v -= mean;
  return xi;
}

double bootstrap_statistic(std::span<const double> xi, const BootstrapWeights& weights) {
  if (weights.w.size() != xi.size())
    fail(ErrorCode::InvalidArgument, "bootstrap weight vector has wrong length");
  if (xi.empty()) return 0.0;
  // Centring is shift invariant; shifting by W_0 keeps equal weights exactly at zero.
  const double w0 = weights.w[0];
  double wbar = 0.0;
  for (double v : weights.w) wbar += v - w0;
  wbar /= static_cast<double>(xi.size());
  double s = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) s += ((weights.w[k] - w0) - wbar) * xi[k];
  return s;
}

double bootstrap_statistic(const WeightProfile& w, const Psi& psi,
                           const BootstrapWeights& weights) {
  const auto xi = bootstrap_summands(w, psi);
  return bootstrap_statistic(xi, weights);
}

CIResult ci_bootstrap(const WeightProfile& w, const CIRequest& req, const EstimatorConfig& cfg) {
  check_alpha(req.alpha);
  if (req.B < 100) fail(ErrorCode::InvalidArgument, "bootstrap needs B >= 100");
  CIResult r;
  r.method = CIMethod::Bootstrap;
  r.h = w.bandwidth();
  r.components = checked_components(w, cfg);
  r.point = regress(w, req.psi);
  r.components.W2bar = w2bar_for(w, req.psi, r.point);

  const auto xi = bootstrap_summands(w, req.psi);
  const std::size_t n = xi.size();
  std::vector<double> stats(req.B);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t l = begin; l < end; ++l) {
      CounterRng rng(req.seed, l);
      const auto weights = draw_bootstrap_weights(n, req.law, rng);
      stats[l] = std::abs(bootstrap_statistic(xi, weights));
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(req.threads, 64));
  if (threads == 1) {
    run(0, req.B);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back(run, req.B * t / threads, req.B * (t + 1) / threads);
  }
  std::sort(stats.begin(), stats.end());
  auto rank = static_cast<std::size_t>(
      std::ceil((1.0 - req.alpha) * static_cast<double>(req.B) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, req.B);
  r.quantile_used = stats[rank - 1];
  const double half =
      r.quantile_used / std::sqrt(static_cast<double>(n) * r.components.Fx);
  r.lower = r.point - half;
  r.upper = r.point + half;
  return r;
}

CIResult confidence_interval(const WeightProfile& w, const CIRequest& req,
                             const EstimatorConfig& cfg) {
  return req.method == CIMethod::Asymptotic ? ci_asymptotic(w, req, cfg)
                                            : ci_bootstrap(w, req, cfg);
}

}  // namespace ftkreg
