#include "uda/losses.hpp"

#include <cmath>
#include <string>

namespace uda {

Matrix softmax(const Matrix& logits) {
  if (logits.size() == 0) throw ShapeError("softmax: empty input");
  if (!logits.allFinite()) throw UsageError("softmax: logits must be finite");
  Matrix out(logits.rows(), logits.cols());
  for (Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - m).exp();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

Vector softmax(const Vector& logits) {
  Matrix row = logits.transpose();
  return softmax(row).row(0).transpose();
}

LossGrad cross_entropy_loss(const Matrix& probabilities, const std::vector<int>& targets) {
  const Index n = probabilities.rows();
  const Index c = probabilities.cols();
  if (n == 0) throw UsageError("cross_entropy_loss: empty batch");
  if (static_cast<Index>(targets.size()) != n) {
    throw ShapeError("cross_entropy_loss: one target per row required");
  }
  LossGrad lg;
  lg.grad = probabilities;
  double loss = 0.0;
  for (Index r = 0; r < n; ++r) {
    const int t = targets[static_cast<std::size_t>(r)];
    if (t < 0 || t >= c) {
      throw UsageError("cross_entropy_loss: target index " + std::to_string(t) +
                       " out of range for " + std::to_string(c) + " classes");
    }
    // Clamp keeps the loss finite if a probability underflowed to zero.
    loss -= std::log(std::max(probabilities(r, t), 1e-300));
    lg.grad(r, t) -= 1.0;
  }
  lg.value = loss / static_cast<double>(n);
  lg.grad /= static_cast<double>(n);
  return lg;
}

LossGrad mse_loss(const Matrix& prediction, const Matrix& target) {
  if (prediction.rows() != target.rows() || prediction.cols() != target.cols()) {
    throw ShapeError("mse_loss: shapes differ");
  }
  if (prediction.rows() == 0) throw UsageError("mse_loss: empty batch");
  LossGrad lg;
  const double n = static_cast<double>(prediction.rows());
  Matrix diff = prediction - target;
  lg.value = diff.squaredNorm() / n;
  lg.grad = (2.0 / n) * diff;
  return lg;
}

}  // namespace uda
