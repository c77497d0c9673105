#include "uda/net.hpp"

#include <cmath>
#include <string>

namespace uda {

void validate_net(const DenseNet& net) {
  if (net.layers.empty()) throw UsageError("net has no layers");
  if (net.dropout_rate < 0.0 || net.dropout_rate >= 1.0) {
    throw UsageError("dropout_rate must lie in [0, 1)");
  }
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const Layer& l = net.layers[i];
    if (l.bias.rows() != 1 || l.bias.cols() != l.weight.cols()) {
      throw ShapeError("layer " + std::to_string(i) + ": bias shape does not match weight");
    }
    if (i + 1 < net.layers.size() &&
        l.weight.cols() != net.layers[i + 1].weight.rows()) {
      throw ShapeError("layer " + std::to_string(i) + ": output dim does not chain into layer " +
                       std::to_string(i + 1));
    }
  }
}

Matrix net_forward(const DenseNet& net, const Matrix& input, bool train_mode,
                   RngStream* rng, ForwardTape* tape) {
  validate_net(net);
  if (input.cols() != net.input_dim()) {
    throw ShapeError("net_forward: input has " + std::to_string(input.cols()) +
                     " columns, net expects " + std::to_string(net.input_dim()));
  }
  const bool want_dropout = train_mode && net.dropout_rate > 0.0;
  if (want_dropout && rng == nullptr) {
    throw UsageError("net_forward: train-mode dropout requires an rng stream");
  }
  if (tape) {
    tape->layers.clear();
    tape->layers.resize(net.layers.size());
    tape->train_mode = train_mode;
  }

  Matrix act = input;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const Layer& l = net.layers[i];
    Matrix pre = act * l.weight;
    pre.rowwise() += l.bias.row(0);
    if (tape) {
      tape->layers[i].input = std::move(act);
      tape->layers[i].preact = pre;
    }
    act = (l.activation == Activation::relu) ? pre.cwiseMax(0.0) : std::move(pre);

    const bool intermediate = i + 1 < net.layers.size();
    if (want_dropout && intermediate) {
      const double p = net.dropout_rate;
      const double scale = 1.0 / (1.0 - p);
      Matrix mask(act.rows(), act.cols());
      for (Index k = 0; k < mask.size(); ++k) {
        mask.data()[k] = rng->uniform() >= p ? scale : 0.0;
      }
      act = act.cwiseProduct(mask);
      if (tape) tape->layers[i].mask = std::move(mask);
    }
  }
  return act;
}

NetGradients net_backward(const DenseNet& net, const ForwardTape& tape,
                          const Matrix& output_gradient) {
  validate_net(net);
  if (tape.layers.size() != net.layers.size() || !tape.train_mode) {
    throw UsageError("net_backward: tape is missing or was not recorded in train mode");
  }
  if (output_gradient.cols() != net.output_dim()) {
    throw ShapeError("net_backward: output_gradient width does not match net output dim");
  }

  NetGradients grads;
  grads.weight.resize(net.layers.size());
  grads.bias.resize(net.layers.size());

  Matrix g = output_gradient;
  for (std::size_t ii = net.layers.size(); ii-- > 0;) {
    const Layer& l = net.layers[ii];
    const LayerTape& t = tape.layers[ii];
    if (t.input.rows() != g.rows()) {
      throw UsageError("net_backward: tape does not match output_gradient batch size");
    }
    if (t.mask.size() > 0) g = g.cwiseProduct(t.mask);
    if (l.activation == Activation::relu) {
      g = g.cwiseProduct((t.preact.array() > 0.0).cast<double>().matrix());
    }
    grads.weight[ii] = t.input.transpose() * g;
    grads.bias[ii] = g.colwise().sum();
    if (ii > 0) g = g * l.weight.transpose();
  }
  grads.input = g * net.layers.front().weight.transpose();
  return grads;
}

void accumulate(NetGradients& dst, const NetGradients& src) {
  if (dst.weight.size() != src.weight.size()) {
    throw ShapeError("accumulate: gradient topologies differ");
  }
  for (std::size_t i = 0; i < dst.weight.size(); ++i) {
    dst.weight[i] += src.weight[i];
    dst.bias[i] += src.bias[i];
  }
}

DenseNet make_mlp(const std::vector<int>& dims, Activation hidden_act, Activation out_act,
                  double dropout_rate, RngStream& init_rng) {
  if (dims.size() < 2) throw UsageError("make_mlp: need at least input and output dims");
  DenseNet net;
  net.dropout_rate = dropout_rate;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const int fan_in = dims[i];
    const int fan_out = dims[i + 1];
    if (fan_in <= 0 || fan_out <= 0) throw UsageError("make_mlp: dims must be positive");
    Layer l;
    l.weight.resize(fan_in, fan_out);
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    for (Index k = 0; k < l.weight.size(); ++k) {
      l.weight.data()[k] = init_rng.uniform(-a, a);
    }
    l.bias = Matrix::Zero(1, fan_out);
    l.activation = (i + 2 < dims.size()) ? hidden_act : out_act;
    net.layers.push_back(std::move(l));
  }
  return net;
}

std::vector<Matrix*> trainable_params(DenseNet& net) {
  std::vector<Matrix*> out;
  out.reserve(net.layers.size() * 2);
  for (Layer& l : net.layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<const Matrix*> gradient_refs(const NetGradients& grads) {
  std::vector<const Matrix*> out;
  out.reserve(grads.weight.size() * 2);
  for (std::size_t i = 0; i < grads.weight.size(); ++i) {
    out.push_back(&grads.weight[i]);
    out.push_back(&grads.bias[i]);
  }
  return out;
}

}  // namespace uda
