#include "uda/pseudo_label.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string>

namespace uda {

std::vector<PseudoLabelRecord> assign_pseudo_labels(const ClassifierParams& classifier,
                                                    const std::vector<FeatureSample>& target_set,
                                                    int iteration) {
  if (target_set.empty()) throw UsageError("assign_pseudo_labels: empty target set");
  const std::vector<Prediction> preds =
      predict_with_confidence(classifier, to_matrix(target_set));
  std::vector<PseudoLabelRecord> records(target_set.size());
  for (std::size_t i = 0; i < target_set.size(); ++i) {
    records[i] = PseudoLabelRecord{target_set[i].id, preds[i].predicted_class,
                                   preds[i].confidence, iteration};
  }
  return records;
}

long quota_naive(int k, int T, long n_t, int C, long n_hat) {
  if (k < 1 || k > T) throw UsageError("quota_naive: k must lie in [1, T]");
  if (n_t < 1 || C < 1) throw UsageError("quota_naive: n_t and C must be positive");
  if (n_hat < 0) throw UsageError("quota_naive: n_hat must be nonnegative");
  long cap = (static_cast<long>(k) * n_t) / (static_cast<long>(T) * C);
  if (cap == 0) cap = 1;  // rescue: small classes still contribute from k=1
  return std::min(cap, n_hat);
}

long quota_star(int k, int T, long n_hat) {
  if (k < 1 || k > T) throw UsageError("quota_star: k must lie in [1, T]");
  if (n_hat < 0) throw UsageError("quota_star: n_hat must be nonnegative");
  return (static_cast<long>(k) * n_hat) / T;
}

std::vector<PseudoLabelRecord> select_subset(const std::vector<PseudoLabelRecord>& records,
                                             const std::vector<long>& quotas) {
  std::vector<PseudoLabelRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(),
            [](const PseudoLabelRecord& a, const PseudoLabelRecord& b) {
              if (a.predicted_class != b.predicted_class) {
                return a.predicted_class < b.predicted_class;
              }
              if (a.confidence != b.confidence) return a.confidence > b.confidence;
              return a.sample_id < b.sample_id;
            });
  std::vector<PseudoLabelRecord> selected;
  long taken = 0;
  int current = -1;
  for (const PseudoLabelRecord& r : sorted) {
    if (r.predicted_class < 0 ||
        r.predicted_class >= static_cast<int>(quotas.size())) {
      throw UsageError("select_subset: quotas do not cover class " +
                       std::to_string(r.predicted_class));
    }
    if (r.predicted_class != current) {
      current = r.predicted_class;
      taken = 0;
    }
    if (taken < quotas[static_cast<std::size_t>(current)]) {
      selected.push_back(r);
      ++taken;
    }
  }
  return selected;
}

void write_selection_csv(const std::filesystem::path& path,
                         const std::vector<PseudoLabelRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("write_selection_csv: cannot open " + path.string());
  out << "sample_id,pseudo_class,confidence,iteration\n";
  char buf[64];
  for (const PseudoLabelRecord& r : records) {
    auto res = std::to_chars(buf, buf + sizeof(buf), r.confidence);
    out << r.sample_id << ',' << r.predicted_class << ','
        << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << ','
        << r.iteration << '\n';
  }
}

}  // namespace uda
