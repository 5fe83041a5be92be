// Central finite differences of the batch loss, for validating backpropagation.
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "handshake/model/network.hpp"

namespace handshake::model {

struct CoordinateCheck {
  std::string tensor;
  Eigen::Index index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

struct GradientCheckReport {
  std::size_t coordinates = 0;
  double max_relative_error = 0.0;
  CoordinateCheck worst;
};

/// |a - f| / max(|a|, |f|, floor). The floor keeps coordinates whose true
/// gradient is zero from dividing by rounding noise.
inline double relative_error(double analytic, double numeric, double floor = 1e-8) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

/// Compares `analytic` against (L(x+h) - L(x-h)) / 2h on every coordinate.
inline GradientCheckReport check_gradient(std::span<const TrainingExample> batch, ModelParams params,
                                          const ModelParams &analytic, double step = 1e-5,
                                          double floor = 1e-8) {
  GradientCheckReport report;
  auto p = tensors(params);
  const auto g = tensors(analytic);
  for (std::size_t t = 0; t < p.size(); ++t) {
    for (Eigen::Index i = 0; i < p[t].size(); ++i) {
      const double saved = p[t].data[i];
      p[t].data[i] = saved + step;
      const double up = batch_loss(batch, params);
      p[t].data[i] = saved - step;
      const double down = batch_loss(batch, params);
      p[t].data[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double err = relative_error(g[t].data[i], numeric, floor);
      ++report.coordinates;
      if (err >= report.max_relative_error) {
        report.max_relative_error = err;
        report.worst = {p[t].name, i, g[t].data[i], numeric, err};
      }
    }
  }
  return report;
}

}  // namespace handshake::model
