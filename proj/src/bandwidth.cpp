#include "ftkreg/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ftkreg/error.hpp"

namespace ftkreg {

namespace {

double nudge(double d) {
  if (d > 0.0) return d * (1.0 + 1e-12);
  return std::numeric_limits<double>::min();
}

}  // namespace

BandwidthRule BandwidthRule::fixed(double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    fail(ErrorCode::InvalidArgument, "fixed bandwidth must be positive");
  BandwidthRule r;
  r.kind = Kind::Fixed;
  r.h = h;
  return r;
}

BandwidthRule BandwidthRule::knn(std::vector<std::size_t> kappas) {
  if (kappas.empty()) fail(ErrorCode::InvalidArgument, "kappa grid must be nonempty");
  for (auto k : kappas)
    if (k == 0) fail(ErrorCode::InvalidArgument, "kappa values must be positive");
  BandwidthRule r;
  r.kind = Kind::KnnCV;
  r.kappas = std::move(kappas);
  return r;
}

BandwidthRule BandwidthRule::knn_default() {
  auto r = knn({5, 10, 15, 20, 30, 50});
  r.cap_to_data = true;
  return r;
}

double knn_radius(std::span<const double> dist, std::size_t kappa) {
  if (kappa == 0 || kappa > dist.size())
    fail(ErrorCode::InsufficientData, "kappa exceeds the number of candidate curves");
  std::vector<double> d(dist.begin(), dist.end());
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kappa - 1), d.end());
  return nudge(d[kappa - 1]);
}

KnnCrossValidator::KnnCrossValidator(const MetricDataset& data, BandwidthRule rule, Kernel kernel)
    : data_(data), rule_(std::move(rule)), kernel_(kernel), cache_(data.size()) {
  if (rule_.kind != BandwidthRule::Kind::KnnCV)
    fail(ErrorCode::InvalidArgument, "cross-validator needs a KnnCV rule");
  const auto& ds = data_.data();
  for (std::size_t k = 0; k < ds.size(); ++k)
    if (ds.observed(k)) observed_.push_back(k);
  const std::size_t n_obs = observed_.size();
  if (n_obs < 2) fail(ErrorCode::InsufficientData, "need at least 2 observed responses");
  for (auto k : rule_.kappas) {
    if (k == 0) fail(ErrorCode::InvalidArgument, "kappa values must be positive");
    if (k >= n_obs) {
      if (!rule_.cap_to_data)
        fail(ErrorCode::InsufficientData,
             "kappa " + std::to_string(k) + " needs more than " + std::to_string(n_obs) +
                 " observed responses");
      k = n_obs - 1;
    }
    kappas_.push_back(k);
  }
  if (kappas_.empty()) fail(ErrorCode::InvalidArgument, "kappa grid must be nonempty");
  std::sort(kappas_.begin(), kappas_.end());
  kappas_.erase(std::unique(kappas_.begin(), kappas_.end()), kappas_.end());
}

const std::vector<double>& KnnCrossValidator::loo_predictions(std::size_t j) {
  auto& slot = cache_[j];
  if (slot) return *slot;

  const auto& ds = data_.data();
  if (!ds.observed(j)) fail(ErrorCode::InvalidArgument, "validation curve has no response");
  const auto fj = data_.features(j);
  const double tj = ds.time(j);
  const auto y = ds.responses();

  std::vector<std::size_t> idx;
  std::vector<double> dist;
  idx.reserve(observed_.size());
  dist.reserve(observed_.size());
  for (auto k : observed_) {
    if (k == j) continue;
    if (rule_.cv_block > 0.0 && std::abs(ds.time(k) - tj) < rule_.cv_block) continue;
    idx.push_back(k);
    dist.push_back(data_.distance(fj, k));
  }
  if (kappas_.back() > dist.size())
    fail(ErrorCode::InsufficientData, "too few curves left for leave-one-out fit");

  std::vector<double> sorted = dist;
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> preds(kappas_.size());
  for (std::size_t i = 0; i < kappas_.size(); ++i) {
    const double h = nudge(sorted[kappas_[i] - 1]);
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < idx.size(); ++m) {
      if (dist[m] > h) continue;
      const double w = kernel_(dist[m] / h);
      num += w * y[idx[m]];
      den += w;
    }
    preds[i] = num / den;
  }
  slot = std::move(preds);
  return *slot;
}

BandwidthChoice KnnCrossValidator::select(std::span<const double> query_dist) {
  if (query_dist.size() != data_.size())
    fail(ErrorCode::InvalidArgument, "query distance vector has wrong length");

  std::vector<double> dobs(observed_.size());
  for (std::size_t i = 0; i < observed_.size(); ++i) dobs[i] = query_dist[observed_[i]];
  std::vector<double> sorted = dobs;
  std::sort(sorted.begin(), sorted.end());

  BandwidthChoice out;
  out.kappas = kappas_;
  std::vector<double> radii(kappas_.size());
  for (std::size_t i = 0; i < kappas_.size(); ++i) radii[i] = nudge(sorted[kappas_[i] - 1]);

  std::vector<std::size_t> order(observed_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dobs[a] < dobs[b]; });
  std::vector<std::size_t> validation;
  for (auto i : order) {
    if (dobs[i] > radii.back()) break;
    validation.push_back(observed_[i]);
  }
  if (rule_.max_validation > 0 && validation.size() > rule_.max_validation) {
    std::vector<std::size_t> thinned(rule_.max_validation);
    for (std::size_t i = 0; i < rule_.max_validation; ++i)
      thinned[i] = validation[i * validation.size() / rule_.max_validation];
    validation = std::move(thinned);
  }

  const auto y = data_.data().responses();
  out.scores.assign(kappas_.size(), 0.0);
  for (auto j : validation) {
    const auto& preds = loo_predictions(j);
    for (std::size_t i = 0; i < kappas_.size(); ++i) {
      const double e = y[j] - preds[i];
      out.scores[i] += e * e;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < kappas_.size(); ++i) {
    out.scores[i] /= static_cast<double>(validation.size());
    if (out.scores[i] < out.scores[best]) best = i;
  }
  out.kappa = kappas_[best];
  out.h = radii[best];
  return out;
}

BandwidthChoice resolve_bandwidth(const MetricDataset& data, std::span<const double> query_dist,
                                  const BandwidthRule& rule, const Kernel& kernel,
                                  KnnCrossValidator* validator) {
  if (rule.kind == BandwidthRule::Kind::Fixed) {
    if (!(rule.h > 0.0)) fail(ErrorCode::InvalidArgument, "fixed bandwidth must be positive");
    BandwidthChoice c;
    c.h = rule.h;
    return c;
  }
  if (validator) return validator->select(query_dist);
  KnnCrossValidator local(data, rule, kernel);
  return local.select(query_dist);
}

double resolve_bandwidth(const MetricDataset& data, const Curve& x, const BandwidthRule& rule,
                         const Kernel& kernel) {
  const auto q = data.query_features(x);
  const auto d = data.distances(q);
  return resolve_bandwidth(data, d, rule, kernel).h;
}

}  // namespace ftkreg
