#pragma once

#include <vector>

#include "uda/rng.hpp"
#include "uda/types.hpp"

namespace uda {

enum class Activation : int { identity = 0, relu = 1 };

struct Layer {
  Matrix weight;  // d_in x d_out
  Matrix bias;    // 1 x d_out
  Activation activation = Activation::identity;
};

// Plain fully connected stack. Dropout (inverted scaling) is applied after
// the activations of all layers except the last, only in train mode.
struct DenseNet {
  std::vector<Layer> layers;
  double dropout_rate = 0.0;

  Index input_dim() const { return layers.empty() ? 0 : layers.front().weight.rows(); }
  Index output_dim() const { return layers.empty() ? 0 : layers.back().weight.cols(); }
};

// Throws ShapeError unless consecutive layer dimensions chain.
void validate_net(const DenseNet& net);

struct LayerTape {
  Matrix input;   // batch x d_in of the layer
  Matrix preact;  // batch x d_out before activation
  Matrix mask;    // dropout mask (0 or 1/(1-p)); empty when no dropout applied
};

struct ForwardTape {
  std::vector<LayerTape> layers;
  bool train_mode = false;
};

// Runs the net on a batch (rows are samples). In train mode dropout masks are
// drawn from rng with kept units scaled by 1/(1-p); in eval mode no dropout is
// applied and rng/tape may be null.
Matrix net_forward(const DenseNet& net, const Matrix& input, bool train_mode,
                   RngStream* rng = nullptr, ForwardTape* tape = nullptr);

struct NetGradients {
  std::vector<Matrix> weight;
  std::vector<Matrix> bias;
  Matrix input;  // gradient w.r.t. the forward input
};

// Backpropagates output_gradient through a tape recorded by net_forward in
// train mode. Gradient shapes mirror the parameter shapes.
NetGradients net_backward(const DenseNet& net, const ForwardTape& tape,
                          const Matrix& output_gradient);

// Adds src gradients into dst (same topology).
void accumulate(NetGradients& dst, const NetGradients& src);

// Multi-layer perceptron with Glorot-uniform weights and zero biases. dims
// lists layer widths input-first; hidden layers get hidden_act, the last
// layer out_act.
DenseNet make_mlp(const std::vector<int>& dims, Activation hidden_act, Activation out_act,
                  double dropout_rate, RngStream& init_rng);

// Pointers to W0, b0, W1, b1, ... for the optimizer.
std::vector<Matrix*> trainable_params(DenseNet& net);
std::vector<const Matrix*> gradient_refs(const NetGradients& grads);

}  // namespace uda
