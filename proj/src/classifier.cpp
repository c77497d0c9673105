#include "uda/classifier.hpp"

#include <algorithm>
#include <string>

#include "uda/adam.hpp"
#include "uda/losses.hpp"
#include "uda/rng.hpp"

namespace uda {

ClassifierParams train_classifier(const std::vector<FeatureSample>& train_set, int class_count,
                                  const TrainConfig& config, std::vector<double>* epoch_losses) {
  if (train_set.empty()) throw UsageError("train_classifier: empty training set");
  if (class_count < 2) throw UsageError("train_classifier: class_count must be >= 2");
  if (config.epochs <= 0 || config.batch_size <= 0 || config.learning_rate <= 0.0) {
    throw UsageError("train_classifier: epochs, batch_size and learning_rate must be positive");
  }
  const Index d = train_set.front().features.size();
  for (const FeatureSample& s : train_set) {
    if (s.features.size() != d) throw ShapeError("train_classifier: inconsistent feature dims");
    if (s.label < 0 || s.label >= class_count) {
      throw UsageError("train_classifier: label " + std::to_string(s.label) +
                       " out of range for " + std::to_string(class_count) + " classes");
    }
  }

  RngStream init_rng(config.seed, "classifier/init");
  RngStream shuffle_rng(config.seed, "classifier/shuffle");

  ClassifierParams params;
  params.class_count = class_count;
  params.feature_dim = static_cast<int>(d);
  params.net = make_mlp({static_cast<int>(d), class_count}, Activation::identity,
                        Activation::identity, 0.0, init_rng);

  const std::vector<std::size_t> order = canonical_order(train_set);
  const Index n = static_cast<Index>(train_set.size());
  std::vector<std::size_t> perm = order;

  std::vector<Matrix*> param_refs = trainable_params(params.net);
  AdamState adam = make_adam_state(param_refs, AdamConfig{config.learning_rate});

  if (epoch_losses) epoch_losses->clear();
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    perm = order;
    shuffle_rng.shuffle(perm);
    double loss_sum = 0.0;
    Index seen = 0;
    for (Index start = 0; start < n; start += config.batch_size) {
      const Index b = std::min<Index>(config.batch_size, n - start);
      Matrix x(b, d);
      std::vector<int> y(static_cast<std::size_t>(b));
      for (Index r = 0; r < b; ++r) {
        const FeatureSample& s = train_set[perm[static_cast<std::size_t>(start + r)]];
        x.row(r) = s.features.transpose();
        y[static_cast<std::size_t>(r)] = s.label;
      }
      ForwardTape tape;
      const Matrix logits = net_forward(params.net, x, /*train_mode=*/true, nullptr, &tape);
      const LossGrad ce = cross_entropy_loss(softmax(logits), y);
      NetGradients grads = net_backward(params.net, tape, ce.grad);
      adam_step(param_refs, gradient_refs(grads), adam);
      loss_sum += ce.value * static_cast<double>(b);
      seen += b;
    }
    if (epoch_losses) epoch_losses->push_back(loss_sum / static_cast<double>(seen));
  }
  return params;
}

std::vector<Prediction> predict_with_confidence(const ClassifierParams& params,
                                                const Matrix& features) {
  if (features.cols() != params.feature_dim) {
    throw ShapeError("predict_with_confidence: feature dim does not match classifier");
  }
  const Matrix probs = softmax(net_forward(params.net, features, /*train_mode=*/false));
  std::vector<Prediction> out(static_cast<std::size_t>(features.rows()));
  for (Index r = 0; r < probs.rows(); ++r) {
    int best = 0;
    double best_p = probs(r, 0);
    for (Index c = 1; c < probs.cols(); ++c) {
      if (probs(r, c) > best_p) {
        best = static_cast<int>(c);
        best_p = probs(r, c);
      }
    }
    out[static_cast<std::size_t>(r)] = Prediction{best, best_p};
  }
  return out;
}

double evaluate(const ClassifierParams& params, const std::vector<FeatureSample>& labelled_set) {
  if (labelled_set.empty()) throw UsageError("evaluate: empty set");
  const std::vector<Prediction> preds = predict_with_confidence(params, to_matrix(labelled_set));
  long correct = 0;
  for (std::size_t i = 0; i < labelled_set.size(); ++i) {
    if (labelled_set[i].label == kUnlabelled) {
      throw UsageError("evaluate: sample without label");
    }
    if (preds[i].predicted_class == labelled_set[i].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labelled_set.size());
}

}  // namespace uda
