#pragma once

#include <cmath>
#include <string>

#include "handshake/model/params.hpp"

namespace handshake::model {

enum class OptimizerKind { kGradientDescent, kAdam };

inline OptimizerKind parse_optimizer(const std::string &s) {
  if (s == "sgd" || s == "gd") return OptimizerKind::kGradientDescent;
  if (s == "adam") return OptimizerKind::kAdam;
  throw Error(ErrorKind::kInvalidInput, "unknown optimizer '" + s + "'");
}

inline const char *to_string(OptimizerKind k) {
  return k == OptimizerKind::kAdam ? "adam" : "sgd";
}

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Single writer of the parameters between steps.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, const ModelParams &shape,
            AdamSettings adam = {})
      : kind_(kind), lr_(learning_rate), adam_(adam) {
    if (!(learning_rate > 0.0)) throw Error(ErrorKind::kInvalidInput, "learning rate must be > 0");
    if (kind_ == OptimizerKind::kAdam) {
      first_ = zeros_like(shape);
      second_ = zeros_like(shape);
    }
  }

  void step(ModelParams &params, const ModelParams &grad) {
    ++steps_;
    auto p = tensors(params);
    const auto g = tensors(grad);
    if (kind_ == OptimizerKind::kGradientDescent) {
      for (std::size_t t = 0; t < p.size(); ++t) {
        for (Eigen::Index i = 0; i < p[t].size(); ++i) p[t].data[i] -= lr_ * g[t].data[i];
      }
      return;
    }
    auto m = tensors(first_);
    auto v = tensors(second_);
    const double c1 = 1.0 - std::pow(adam_.beta1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(adam_.beta2, static_cast<double>(steps_));
    for (std::size_t t = 0; t < p.size(); ++t) {
      for (Eigen::Index i = 0; i < p[t].size(); ++i) {
        const double gi = g[t].data[i];
        double &mi = m[t].data[i];
        double &vi = v[t].data[i];
        mi = adam_.beta1 * mi + (1.0 - adam_.beta1) * gi;
        vi = adam_.beta2 * vi + (1.0 - adam_.beta2) * gi * gi;
        p[t].data[i] -= lr_ * (mi / c1) / (std::sqrt(vi / c2) + adam_.epsilon);
      }
    }
  }

  std::size_t steps() const noexcept { return steps_; }

 private:
  OptimizerKind kind_;
  double lr_;
  AdamSettings adam_;
  ModelParams first_;
  ModelParams second_;
  std::size_t steps_ = 0;
};

}  // namespace handshake::model
