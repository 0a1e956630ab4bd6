#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "ftkreg/funcdata.hpp"
#include "ftkreg/metrics.hpp"

namespace testsupport {

inline ftkreg::Curve sample(const ftkreg::Grid& g, const std::function<double(double)>& f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.at(i));
  return ftkreg::Curve(g, std::move(v));
}

// Composite Simpson on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double rel_err(double a, double b) {
  const double d = std::abs(a - b);
  return d / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Small dataset on a 5-point grid with hand-picked curves and responses.
struct HandData {
  ftkreg::Grid grid;
  std::vector<std::vector<double>> curves;
  std::vector<double> y;
  std::vector<std::uint8_t> zeta;
  double delta;

  std::shared_ptr<const ftkreg::FunctionalDataset> dataset() const {
    std::vector<double> t, yy, values;
    for (std::size_t k = 0; k < curves.size(); ++k) {
      t.push_back(static_cast<double>(k + 1) * delta);
      yy.push_back(zeta[k] ? y[k] : std::nan(""));
      values.insert(values.end(), curves[k].begin(), curves[k].end());
    }
    return std::make_shared<const ftkreg::FunctionalDataset>(grid, delta, t, zeta, yy, values);
  }
};

// Random dataset: curves a + b s + c s^2 with noisy response a + b^2.
inline HandData random_data(std::mt19937_64& rng, std::size_t n, std::size_t p,
                            double missing = 0.3) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  HandData d{ftkreg::Grid(0.0, 1.0, p), {}, {}, {}, 0.1};
  for (std::size_t k = 0; k < n; ++k) {
    const double a = N(rng), b = N(rng), c = 0.5 * N(rng);
    std::vector<double> v(p);
    for (std::size_t i = 0; i < p; ++i) {
      const double s = d.grid.at(i);
      v[i] = a + b * s + c * s * s;
    }
    d.curves.push_back(v);
    d.y.push_back(a + b * b + 0.3 * N(rng));
    d.zeta.push_back(U(rng) < missing ? 0 : 1);
  }
  d.zeta[0] = 1;
  return d;
}

}  // namespace testsupport
