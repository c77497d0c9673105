#pragma once

#include <vector>

#include "uda/types.hpp"

namespace uda {

// Row-wise softmax with max subtraction; safe for logits up to +-1e3.
Matrix softmax(const Matrix& logits);
Vector softmax(const Vector& logits);

struct LossGrad {
  double value = 0.0;
  Matrix grad;
};

// Mean negative log-likelihood of the target class. probabilities rows must
// be valid probability vectors (e.g. softmax output); grad is taken w.r.t.
// the logits that produced them: (p - y) / batch.
LossGrad cross_entropy_loss(const Matrix& probabilities, const std::vector<int>& targets);

// Mean over the batch of the per-sample squared-error sum;
// grad = 2 (prediction - target) / batch.
LossGrad mse_loss(const Matrix& prediction, const Matrix& target);

}  // namespace uda
