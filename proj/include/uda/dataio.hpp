#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "uda/rng.hpp"
#include "uda/types.hpp"

namespace uda {

// Dataset CSV: header `#dim=<d>,classes=<C>`, then one sample per row as
// `id,domain,label,f_1,...,f_d` with domain in {S,T} and label an integer or
// `-`. Floats are written in shortest round-trip form, so save -> load is the
// identity. An id of `-` is assigned from the data row order.
Dataset load_feature_dataset(const std::filesystem::path& path);
void save_feature_dataset(const std::filesystem::path& path, const Dataset& dataset);

// Removes labels from every sample (the target-role ingestion step) and
// returns them, aligned with dataset.samples, for evaluation-only use.
std::vector<int> strip_labels(Dataset& dataset);

// Optional preprocessing (off by default everywhere): scales every feature
// vector to unit L2 norm. Zero vectors cannot be normalized.
void l2_normalize_features(Dataset& dataset);

// Per-class counts falling linearly from a max:min ratio of `ratio` while
// keeping the total near base * classes. ratio 1 is uniform.
std::vector<int> imbalanced_counts(int base, double ratio, int classes);

struct BenchmarkSpec {
  int class_count = 10;
  int dim = 64;
  // Per-class sample counts; a single entry is broadcast to all classes.
  std::vector<int> source_per_class{100};
  std::vector<int> target_per_class{100};
  double centroid_scale = 3.0;   // class centroids ~ N(0, scale^2 I)
  double spread = 1.0;           // within-class noise scale
  double shift_translation = 0.0;  // length of the global target offset
  double shift_rotation = 0.0;     // radians, applied to centroids plane-wise
  // Target within-class noise multiplier for the last class; the multiplier
  // interpolates linearly from 1 across classes (1 = no covariance shift).
  double covariance_scale = 1.0;
  std::uint64_t seed = 0;
};

struct Benchmark {
  Dataset source;             // labelled
  Dataset target;             // unlabelled
  std::vector<int> target_truth;  // aligned with target.samples
};

// Two-domain Gaussian-cluster benchmark with a fixed, class-consistent shift:
// target centroids are the rotated source centroids plus a global
// translation. Pure function of the spec.
Benchmark generate_benchmark(const BenchmarkSpec& spec);

// Deterministic disjoint split; part_a receives round(fraction*n) samples,
// clamped so both parts are non-empty when n >= 2.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction, RngStream& rng);

}  // namespace uda
