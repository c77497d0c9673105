#pragma once

#include <filesystem>
#include <vector>

#include "uda/classifier.hpp"
#include "uda/types.hpp"

namespace uda {

struct PseudoLabelRecord {
  long sample_id = 0;
  int predicted_class = 0;
  double confidence = 0.0;
  int iteration = 0;
};

// One record per target sample, class/confidence per predict_with_confidence.
std::vector<PseudoLabelRecord> assign_pseudo_labels(const ClassifierParams& classifier,
                                                    const std::vector<FeatureSample>& target_set,
                                                    int iteration);

// Class-balanced selection cap for iteration k of T: floor(k*n_t / (T*C)),
// clamped above by n_hat. A positive fraction that floors to zero is raised
// to one so every observed class contributes from the first iteration.
long quota_naive(int k, int T, long n_t, int C, long n_hat);

// Proportional cap used by earlier selection schemes: floor(k*n_hat / T).
long quota_star(int k, int T, long n_hat);

// Picks, per class c, the quotas[c] highest-confidence records (ties broken by
// ascending sample_id). quotas must cover every class present in records; the
// result is sorted by (class, descending confidence, id) and is invariant to
// the input ordering.
std::vector<PseudoLabelRecord> select_subset(const std::vector<PseudoLabelRecord>& records,
                                             const std::vector<long>& quotas);

// Audit dump: sample_id,pseudo_class,confidence,iteration.
void write_selection_csv(const std::filesystem::path& path,
                         const std::vector<PseudoLabelRecord>& records);

}  // namespace uda
