#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ftkreg/estimator.hpp"
#include "ftkreg/stats.hpp"

namespace ftkreg {

enum class CIMethod { Asymptotic, Bootstrap };
enum class WeightLaw { UnitExponential, Multinomial };

std::string to_string(CIMethod m);

struct CIRequest {
  Psi psi;
  /// Risk alpha of a (1 - alpha) interval.
  double alpha = 0.05;
  CIMethod method = CIMethod::Asymptotic;
  std::size_t B = 1000;
  WeightLaw law = WeightLaw::UnitExponential;
  std::uint64_t seed = 42;
  /// Worker threads for bootstrap replicates; output does not depend on it.
  unsigned threads = 1;
};

struct CIResult {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double h = 0.0;
  VarianceComponents components;
  CIMethod method = CIMethod::Asymptotic;
  /// Gaussian quantile (asymptotic) or bootstrap critical value z*.
  double quantile_used = 0.0;
};

struct BootstrapWeights {
  std::vector<double> w;
  WeightLaw law = WeightLaw::UnitExponential;
};

BootstrapWeights draw_bootstrap_weights(std::size_t n, WeightLaw law, CounterRng& rng);

/// Asymptotic interval m +/- z (sqrt(M2)/M1) sqrt(W2 / (n Fx p)). For an
/// indicator psi, W2 is the plug-in F(1 - F).
CIResult ci_asymptotic(const WeightProfile& w, const CIRequest& req, const EstimatorConfig& cfg);

/// Interval for the alpha_q conditional quantile: the CDF half-width divided
/// by the conditional density at the estimated quantile.
CIResult ci_quantile(const WeightProfile& w, double alpha_q, double alpha,
                     const EstimatorConfig& cfg);

/// Centred summands xi_k of the exchangeable bootstrap:
/// sqrt(Fx / n) zeta_k (psi(Y_k) - m) Delta_k / mean_j(zeta_j Delta_j),
/// minus their mean over k. All zero when no observed response carries weight.
std::vector<double> bootstrap_summands(const WeightProfile& w, const Psi& psi);

/// S* = sum_k (W_k - mean W) xi_k.
double bootstrap_statistic(std::span<const double> summands, const BootstrapWeights& weights);
double bootstrap_statistic(const WeightProfile& w, const Psi& psi,
                           const BootstrapWeights& weights);

/// B replicates of |S*|; z* is the ceil((1 - alpha) B)-th order statistic and
/// the interval is m +/- z* / sqrt(n Fx).
CIResult ci_bootstrap(const WeightProfile& w, const CIRequest& req, const EstimatorConfig& cfg);

/// Dispatches on req.method.
CIResult confidence_interval(const WeightProfile& w, const CIRequest& req,
                             const EstimatorConfig& cfg);

}  // namespace ftkreg
