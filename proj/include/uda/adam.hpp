#pragma once

#include <vector>

#include "uda/types.hpp"

namespace uda {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moment accumulators mirroring the parameter shapes.
struct AdamState {
  AdamConfig config;
  long step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
};

AdamState make_adam_state(const std::vector<Matrix*>& params, const AdamConfig& config);

// One bias-corrected Adam update in place.
void adam_step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads,
               AdamState& state);

}  // namespace uda
