#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uda/classifier.hpp"
#include "uda/dataio.hpp"
#include "uda/norm_vae.hpp"
#include "uda/pseudo_label.hpp"
#include "uda/report.hpp"
#include "uda/types.hpp"

namespace uda {

enum class Method { baseline, naive_spl, naive_spl_star, norm_vae_spl };

const char* method_name(Method m);
std::optional<Method> parse_method(const std::string& name);

enum class AugmentMode { off, cross, cross_recon };

struct PipelineConfig {
  Method method = Method::naive_spl;
  int iterations = 10;  // T
  TrainConfig classifier;
  VaeTrainConfig vae;
  AugmentMode augment = AugmentMode::cross;
  std::uint64_t seed = 0;
};

struct IterationTrace {
  int iteration = 0;
  std::vector<long> selected_per_class;
  long selected_total = 0;
  // Fraction of this iteration's selected pseudo-labels that match the ground
  // truth (the full initial assignment at k=0); NaN without truth.
  double pseudo_label_accuracy = 0.0;
  // Post-retrain classifier accuracy over the whole target set; NaN without truth.
  double target_accuracy = 0.0;
};

struct RunResult {
  ClassifierParams classifier;            // trained at k = T
  std::vector<int> predicted_labels;      // aligned with target.samples
  std::vector<IterationTrace> traces;     // k = 0..T
  std::vector<std::vector<PseudoLabelRecord>> selections;  // S_k for k = 1..T
  std::vector<FeatureSample> synthetic_final;  // last iteration's synthetic data
  std::optional<NormVaeParams> vae_final;      // last iteration's trained norm-VAE
};

using TraceSink = std::function<void(const IterationTrace&)>;

// Source-train / pseudo-label / select / retrain loop over T iterations.
// target samples must be unlabelled; ground truth, when supplied, is used for
// trace reporting only. The quota rule and augmentation follow config.method.
RunResult run_pipeline(const Dataset& source, const Dataset& target,
                       const PipelineConfig& config,
                       const std::vector<int>* target_truth = nullptr,
                       const TraceSink& sink = {});

RunResult run_baseline(const Dataset& source, const Dataset& target, PipelineConfig config,
                       const std::vector<int>* target_truth = nullptr);
RunResult run_naive_spl(const Dataset& source, const Dataset& target, PipelineConfig config,
                        const std::vector<int>* target_truth = nullptr);
RunResult run_naive_spl_star(const Dataset& source, const Dataset& target, PipelineConfig config,
                             const std::vector<int>* target_truth = nullptr);
RunResult run_norm_vae_spl(const Dataset& source, const Dataset& target, PipelineConfig config,
                           const std::vector<int>* target_truth = nullptr);

// Synthetic companions for classifier training: every source sample decoded
// into the target domain and every selected sample into the source domain;
// cross_recon adds the same-domain reconstructions. Fresh sequential ids.
std::vector<FeatureSample> synthesize_augmentation(const NormVaeParams& vae,
                                                   const std::vector<FeatureSample>& source_set,
                                                   const std::vector<FeatureSample>& selected,
                                                   AugmentMode mode, std::uint64_t seed);

struct AblationCellTrace {
  Method method = Method::naive_spl;
  std::uint64_t seed = 0;
  int iterations = 0;
  std::vector<IterationTrace> traces;
};

// Cartesian grid of (method, seed, T) runs; cells are independent and may be
// evaluated on several threads, results are ordered as the inputs regardless.
ExperimentReport run_ablation(const Dataset& source, const Dataset& target,
                              const std::string& task, const std::vector<Method>& methods,
                              const std::vector<std::uint64_t>& seeds,
                              const std::vector<int>& iteration_counts,
                              const PipelineConfig& base_config,
                              const std::vector<int>* target_truth = nullptr, int threads = 1,
                              std::vector<AblationCellTrace>* all_traces = nullptr);

}  // namespace uda
