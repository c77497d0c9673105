#pragma once

#include <cstdint>
#include <vector>

#include "uda/net.hpp"
#include "uda/types.hpp"

namespace uda {

struct TrainConfig {
  int epochs = 100;
  int batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

// One affine map d^x -> C followed by softmax.
struct ClassifierParams {
  DenseNet net;
  int class_count = 0;
  int feature_dim = 0;
};

// Trains from a fresh Glorot initialization on the given labelled samples.
// Samples are brought into canonical order before the seed-derived per-epoch
// shuffles, so the result depends only on the set, not its ordering.
// epoch_losses, when given, receives the mean training loss per epoch.
ClassifierParams train_classifier(const std::vector<FeatureSample>& train_set, int class_count,
                                  const TrainConfig& config,
                                  std::vector<double>* epoch_losses = nullptr);

struct Prediction {
  int predicted_class = 0;
  double confidence = 0.0;  // softmax max probability
};

// Argmax of the softmax per row; ties break toward the lower class index.
std::vector<Prediction> predict_with_confidence(const ClassifierParams& params,
                                                const Matrix& features);

// Fraction of samples whose predicted class equals the stored label.
double evaluate(const ClassifierParams& params, const std::vector<FeatureSample>& labelled_set);

}  // namespace uda
