#include "uda/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>

namespace uda {

const char* method_name(Method m) {
  switch (m) {
    case Method::baseline: return "baseline";
    case Method::naive_spl: return "naive-spl";
    case Method::naive_spl_star: return "naive-spl-star";
    case Method::norm_vae_spl: return "norm-vae-spl";
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& name) {
  if (name == "baseline") return Method::baseline;
  if (name == "naive-spl") return Method::naive_spl;
  if (name == "naive-spl-star") return Method::naive_spl_star;
  if (name == "norm-vae-spl") return Method::norm_vae_spl;
  return std::nullopt;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<long> class_histogram(const std::vector<PseudoLabelRecord>& records, int classes) {
  std::vector<long> hist(static_cast<std::size_t>(classes), 0);
  for (const PseudoLabelRecord& r : records) {
    hist[static_cast<std::size_t>(r.predicted_class)] += 1;
  }
  return hist;
}

std::vector<long> quotas_for(Method method, int k, int T, long n_t, int classes,
                             const std::vector<long>& n_hat) {
  std::vector<long> quotas(static_cast<std::size_t>(classes), 0);
  for (int c = 0; c < classes; ++c) {
    const long hat = n_hat[static_cast<std::size_t>(c)];
    switch (method) {
      case Method::baseline:
        // no selection: an unbounded quota admits every pseudo-labelled sample
        quotas[static_cast<std::size_t>(c)] = std::numeric_limits<long>::max();
        break;
      case Method::naive_spl_star:
        quotas[static_cast<std::size_t>(c)] = quota_star(k, T, hat);
        break;
      case Method::naive_spl:
      case Method::norm_vae_spl:
        quotas[static_cast<std::size_t>(c)] = quota_naive(k, T, n_t, classes, hat);
        break;
    }
  }
  return quotas;
}

double agreement(const std::vector<PseudoLabelRecord>& records,
                 const std::unordered_map<long, int>& truth_by_id) {
  if (truth_by_id.empty() || records.empty()) return kNaN;
  long correct = 0;
  for (const PseudoLabelRecord& r : records) {
    if (truth_by_id.at(r.sample_id) == r.predicted_class) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

}  // namespace

RunResult run_pipeline(const Dataset& source, const Dataset& target,
                       const PipelineConfig& config, const std::vector<int>* target_truth,
                       const TraceSink& sink) {
  if (config.iterations < 1) throw UsageError("run_pipeline: iterations must be >= 1");
  if (source.classes != target.classes) {
    throw UsageError("run_pipeline: source and target class counts differ");
  }
  if (source.dim != target.dim) {
    throw UsageError("run_pipeline: source and target feature dims differ");
  }
  if (source.samples.empty() || target.samples.empty()) {
    throw UsageError("run_pipeline: empty source or target set");
  }
  for (const FeatureSample& t : target.samples) {
    if (t.label != kUnlabelled) {
      throw UsageError("run_pipeline: target samples must be unlabelled (strip labels first)");
    }
  }
  if (target_truth && target_truth->size() != target.samples.size()) {
    throw UsageError("run_pipeline: truth size does not match target set");
  }

  const int classes = source.classes;
  const int T = config.iterations;
  const long n_t = static_cast<long>(target.samples.size());

  {
    std::unordered_map<long, bool> seen;
    for (const FeatureSample& s : source.samples) {
      if (!seen.emplace(s.id, true).second) {
        throw UsageError("run_pipeline: duplicate source sample id " + std::to_string(s.id));
      }
    }
  }
  std::unordered_map<long, int> truth_by_id;
  std::unordered_map<long, std::size_t> index_by_id;
  for (std::size_t i = 0; i < target.samples.size(); ++i) {
    const long id = target.samples[i].id;
    if (!index_by_id.emplace(id, i).second) {
      throw UsageError("run_pipeline: duplicate target sample id " + std::to_string(id));
    }
    if (target_truth) truth_by_id.emplace(id, (*target_truth)[i]);
  }

  auto classifier_config = [&](int k) {
    TrainConfig tc = config.classifier;
    tc.seed = RngStream::derive_seed(config.seed, "pipeline/classifier/k=" + std::to_string(k));
    return tc;
  };

  RunResult result;

  ClassifierParams clf = train_classifier(source.samples, classes, classifier_config(0));
  std::vector<PseudoLabelRecord> records = assign_pseudo_labels(clf, target.samples, 0);

  {
    IterationTrace t0;
    t0.iteration = 0;
    t0.selected_per_class.assign(static_cast<std::size_t>(classes), 0);
    t0.selected_total = 0;
    t0.pseudo_label_accuracy = agreement(records, truth_by_id);
    t0.target_accuracy = t0.pseudo_label_accuracy;
    result.traces.push_back(t0);
    if (sink) sink(t0);
  }

  for (int k = 1; k <= T; ++k) {
    const std::vector<long> n_hat = class_histogram(records, classes);
    const std::vector<long> quotas = quotas_for(config.method, k, T, n_t, classes, n_hat);
    std::vector<PseudoLabelRecord> selected_records = select_subset(records, quotas);

    std::vector<FeatureSample> train_set = source.samples;
    std::vector<FeatureSample> selected_samples;
    selected_samples.reserve(selected_records.size());
    for (const PseudoLabelRecord& r : selected_records) {
      FeatureSample s = target.samples[index_by_id.at(r.sample_id)];
      s.label = r.predicted_class;
      selected_samples.push_back(std::move(s));
    }
    train_set.insert(train_set.end(), selected_samples.begin(), selected_samples.end());

    if (config.method == Method::norm_vae_spl && config.augment != AugmentMode::off) {
      VaeTrainConfig vc = config.vae;
      vc.seed = RngStream::derive_seed(config.seed, "pipeline/vae/k=" + std::to_string(k));
      std::optional<NormVaeParams> vae =
          train_norm_vae(source.samples, selected_samples, vc);
      if (vae) {
        std::vector<FeatureSample> synthetic = synthesize_augmentation(
            *vae, source.samples, selected_samples, config.augment,
            RngStream::derive_seed(config.seed, "pipeline/augment/k=" + std::to_string(k)));
        if (k == T) {
          result.synthetic_final = synthetic;
          result.vae_final = std::move(vae);
        }
        train_set.insert(train_set.end(), synthetic.begin(), synthetic.end());
      }
    }

    clf = train_classifier(train_set, classes, classifier_config(k));
    records = assign_pseudo_labels(clf, target.samples, k);

    IterationTrace trace;
    trace.iteration = k;
    trace.selected_per_class = class_histogram(selected_records, classes);
    trace.selected_total = static_cast<long>(selected_records.size());
    trace.pseudo_label_accuracy = agreement(selected_records, truth_by_id);
    trace.target_accuracy = agreement(records, truth_by_id);
    result.traces.push_back(trace);
    result.selections.push_back(std::move(selected_records));
    if (sink) sink(trace);
  }

  result.classifier = std::move(clf);
  result.predicted_labels.reserve(records.size());
  for (const PseudoLabelRecord& r : records) result.predicted_labels.push_back(r.predicted_class);
  return result;
}

RunResult run_baseline(const Dataset& source, const Dataset& target, PipelineConfig config,
                       const std::vector<int>* target_truth) {
  config.method = Method::baseline;
  return run_pipeline(source, target, config, target_truth);
}

RunResult run_naive_spl(const Dataset& source, const Dataset& target, PipelineConfig config,
                        const std::vector<int>* target_truth) {
  config.method = Method::naive_spl;
  return run_pipeline(source, target, config, target_truth);
}

RunResult run_naive_spl_star(const Dataset& source, const Dataset& target, PipelineConfig config,
                             const std::vector<int>* target_truth) {
  config.method = Method::naive_spl_star;
  return run_pipeline(source, target, config, target_truth);
}

RunResult run_norm_vae_spl(const Dataset& source, const Dataset& target, PipelineConfig config,
                           const std::vector<int>* target_truth) {
  config.method = Method::norm_vae_spl;
  return run_pipeline(source, target, config, target_truth);
}

std::vector<FeatureSample> synthesize_augmentation(const NormVaeParams& vae,
                                                   const std::vector<FeatureSample>& source_set,
                                                   const std::vector<FeatureSample>& selected,
                                                   AugmentMode mode, std::uint64_t seed) {
  if (mode == AugmentMode::off) return {};
  std::vector<FeatureSample> out;
  long next_id = 0;
  auto emit = [&](const FeatureSample& seed_sample, Domain from, Domain to) {
    RngStream rng(seed, "gen/" + std::to_string(next_id));
    FeatureSample s = generate_cross_domain(vae, seed_sample, from, to, rng);
    s.id = next_id++;
    out.push_back(std::move(s));
  };
  for (std::size_t i : canonical_order(source_set)) {
    emit(source_set[i], Domain::source, Domain::target);
  }
  for (std::size_t i : canonical_order(selected)) {
    emit(selected[i], Domain::target, Domain::source);
  }
  if (mode == AugmentMode::cross_recon) {
    for (std::size_t i : canonical_order(source_set)) {
      emit(source_set[i], Domain::source, Domain::source);
    }
    for (std::size_t i : canonical_order(selected)) {
      emit(selected[i], Domain::target, Domain::target);
    }
  }
  return out;
}

ExperimentReport run_ablation(const Dataset& source, const Dataset& target,
                              const std::string& task, const std::vector<Method>& methods,
                              const std::vector<std::uint64_t>& seeds,
                              const std::vector<int>& iteration_counts,
                              const PipelineConfig& base_config,
                              const std::vector<int>* target_truth, int threads,
                              std::vector<AblationCellTrace>* all_traces) {
  if (methods.empty() || seeds.empty() || iteration_counts.empty()) {
    throw UsageError("run_ablation: methods, seeds and iteration counts must be non-empty");
  }
  struct Cell {
    Method method;
    std::uint64_t seed;
    int iterations;
  };
  std::vector<Cell> cells;
  for (Method m : methods) {
    for (std::uint64_t s : seeds) {
      for (int t : iteration_counts) cells.push_back(Cell{m, s, t});
    }
  }

  std::vector<ReportRow> rows(cells.size());
  std::vector<AblationCellTrace> traces(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& cell = cells[i];
      PipelineConfig cfg = base_config;
      cfg.method = cell.method;
      cfg.seed = cell.seed;
      cfg.iterations = cell.iterations;
      const RunResult r = run_pipeline(source, target, cfg, target_truth);
      rows[i] = ReportRow{task,
                          method_name(cell.method),
                          cell.seed,
                          cell.iterations,
                          r.traces.front().target_accuracy,
                          r.traces.back().target_accuracy};
      traces[i] = AblationCellTrace{cell.method, cell.seed, cell.iterations, r.traces};
    }
  };

  const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(cells.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  if (all_traces) *all_traces = std::move(traces);
  return make_report(std::move(rows));
}

}  // namespace uda
