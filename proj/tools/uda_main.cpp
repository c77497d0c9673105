// Command-line driver: benchmark generation, pipeline runs, ablation grids
// and 2-D projection export. All outputs are deterministic for a fixed flag
// set (seed included), so repeated invocations are byte-identical.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "uda/checkpoint.hpp"
#include "uda/dataio.hpp"
#include "uda/pca.hpp"
#include "uda/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TrainFlags {
  std::string method = "naive-spl";
  int iterations = 10;
  std::uint64_t seed = 0;
  int epochs = 100;
  double lr = 1e-3;
  int batch = 64;
  int latent_dim = 64;
  int hidden_dim = 512;
  double dropout = 0.5;
  int vae_epochs = 50;
  double vae_lr = 1e-3;
  int vae_batch = 64;
  std::string augment = "cross";
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--method", f.method, "baseline|naive-spl|naive-spl-star|norm-vae-spl")
      ->check(CLI::IsMember({"baseline", "naive-spl", "naive-spl-star", "norm-vae-spl"}));
  cmd->add_option("--iterations", f.iterations, "pseudo-labelling rounds T")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--epochs", f.epochs, "classifier epochs")->check(CLI::PositiveNumber);
  cmd->add_option("--lr", f.lr, "classifier learning rate")->check(CLI::PositiveNumber);
  cmd->add_option("--batch", f.batch, "classifier batch size")->check(CLI::PositiveNumber);
  cmd->add_option("--latent-dim", f.latent_dim, "norm-VAE latent dim")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--hidden-dim", f.hidden_dim, "norm-VAE hidden width")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--dropout", f.dropout, "norm-VAE dropout rate")
      ->check(CLI::Range(0.0, 0.999));
  cmd->add_option("--vae-epochs", f.vae_epochs, "norm-VAE epochs")->check(CLI::PositiveNumber);
  cmd->add_option("--vae-lr", f.vae_lr, "norm-VAE learning rate")->check(CLI::PositiveNumber);
  cmd->add_option("--vae-batch", f.vae_batch, "norm-VAE batch size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--augment", f.augment, "cross|cross+recon|off")
      ->check(CLI::IsMember({"cross", "cross+recon", "off"}));
}

uda::PipelineConfig pipeline_config(const TrainFlags& f) {
  uda::PipelineConfig cfg;
  cfg.method = *uda::parse_method(f.method);
  cfg.iterations = f.iterations;
  cfg.seed = f.seed;
  cfg.classifier.epochs = f.epochs;
  cfg.classifier.batch_size = f.batch;
  cfg.classifier.learning_rate = f.lr;
  cfg.vae.epochs = f.vae_epochs;
  cfg.vae.batch_size = f.vae_batch;
  cfg.vae.learning_rate = f.vae_lr;
  cfg.vae.latent_dim = f.latent_dim;
  cfg.vae.hidden_dim = f.hidden_dim;
  cfg.vae.dropout_rate = f.dropout;
  if (f.augment == "off") {
    cfg.augment = uda::AugmentMode::off;
  } else if (f.augment == "cross+recon") {
    cfg.augment = uda::AugmentMode::cross_recon;
  } else {
    cfg.augment = uda::AugmentMode::cross;
  }
  return cfg;
}

uda::Dataset load_as_role(const fs::path& path, uda::Domain role) {
  uda::Dataset ds = uda::load_feature_dataset(path);
  for (uda::FeatureSample& s : ds.samples) s.domain = role;
  return ds;
}

// Truth is usable only when every target sample carries a label.
std::optional<std::vector<int>> take_truth(uda::Dataset& target) {
  std::vector<int> truth = uda::strip_labels(target);
  for (int t : truth) {
    if (t == uda::kUnlabelled) return std::nullopt;
  }
  return truth;
}

json trace_line(const std::string& task, const std::string& method, std::uint64_t seed,
                int iterations, const uda::IterationTrace& t) {
  return json{{"task", task},
              {"method", method},
              {"seed", seed},
              {"iterations", iterations},
              {"k", t.iteration},
              {"selected_per_class", t.selected_per_class},
              {"selected_total", t.selected_total},
              {"pseudo_label_accuracy", t.pseudo_label_accuracy},
              {"target_accuracy", t.target_accuracy}};
}

std::string default_task(const fs::path& source, const fs::path& target) {
  return source.stem().string() + "->" + target.stem().string();
}

int cmd_run(const TrainFlags& flags, const fs::path& source_path, const fs::path& target_path,
            const fs::path& out_dir, std::string task, const fs::path& eval_path,
            bool l2_normalize) {
  uda::Dataset source = load_as_role(source_path, uda::Domain::source);
  for (const uda::FeatureSample& s : source.samples) {
    if (s.label == uda::kUnlabelled) {
      throw uda::UsageError("run: every source sample must carry a label");
    }
  }
  uda::Dataset target = load_as_role(target_path, uda::Domain::target);
  if (l2_normalize) {
    uda::l2_normalize_features(source);
    uda::l2_normalize_features(target);
  }
  const std::optional<std::vector<int>> truth = take_truth(target);

  if (task.empty()) task = default_task(source_path, target_path);
  fs::create_directories(out_dir);

  const uda::PipelineConfig cfg = pipeline_config(flags);
  std::ofstream trace_out(out_dir / "trace.jsonl");
  auto sink = [&](const uda::IterationTrace& t) {
    trace_out << trace_line(task, flags.method, flags.seed, flags.iterations, t).dump()
              << '\n';
    trace_out.flush();
  };
  const uda::RunResult result =
      uda::run_pipeline(source, target, cfg, truth ? &*truth : nullptr, sink);

  std::vector<uda::ReportRow> rows{uda::ReportRow{task, flags.method, flags.seed,
                                                  flags.iterations,
                                                  result.traces.front().target_accuracy,
                                                  result.traces.back().target_accuracy}};
  const uda::ExperimentReport report = uda::make_report(std::move(rows));
  uda::write_report_csv(out_dir / "report.csv", report);
  uda::write_report_md(out_dir / "report.md", report);

  std::vector<uda::PseudoLabelRecord> all_selected;
  for (const auto& sel : result.selections) {
    all_selected.insert(all_selected.end(), sel.begin(), sel.end());
  }
  uda::write_selection_csv(out_dir / "selected.csv", all_selected);

  uda::save_classifier_checkpoint(out_dir / "classifier.json", result.classifier);
  if (result.vae_final) {
    uda::save_norm_vae_checkpoint(out_dir / "norm_vae.json", *result.vae_final);
  }

  {
    std::ofstream pred(out_dir / "predictions.csv");
    pred << "id,predicted_class\n";
    for (std::size_t i = 0; i < target.samples.size(); ++i) {
      pred << target.samples[i].id << ',' << result.predicted_labels[i] << '\n';
    }
  }

  if (!result.synthetic_final.empty()) {
    uda::Dataset synthetic;
    synthetic.dim = source.dim;
    synthetic.classes = source.classes;
    synthetic.samples = result.synthetic_final;
    uda::save_feature_dataset(out_dir / "synthetic.csv", synthetic);
  }

  std::cout << task << " " << flags.method << " seed=" << flags.seed
            << " iter0=" << uda::format_double(result.traces.front().target_accuracy)
            << " final=" << uda::format_double(result.traces.back().target_accuracy) << '\n';

  if (!eval_path.empty()) {
    uda::Dataset held_out = load_as_role(eval_path, uda::Domain::target);
    if (l2_normalize) uda::l2_normalize_features(held_out);
    for (const uda::FeatureSample& s : held_out.samples) {
      if (s.label == uda::kUnlabelled) {
        throw uda::UsageError("run: --eval samples must carry labels");
      }
    }
    const double acc = uda::evaluate(result.classifier, held_out.samples);
    std::cout << "held-out accuracy " << uda::format_double(acc) << '\n';
  }
  return 0;
}

int cmd_benchgen(uda::BenchmarkSpec spec, int source_count, int target_count, double imbalance,
                 const fs::path& out_dir) {
  spec.source_per_class.assign(static_cast<std::size_t>(spec.class_count), source_count);
  spec.target_per_class = uda::imbalanced_counts(target_count, imbalance, spec.class_count);
  const uda::Benchmark bench = uda::generate_benchmark(spec);

  fs::create_directories(out_dir);
  uda::save_feature_dataset(out_dir / "source.csv", bench.source);
  uda::Dataset target_with_truth = bench.target;
  for (std::size_t i = 0; i < target_with_truth.samples.size(); ++i) {
    target_with_truth.samples[i].label = bench.target_truth[i];
  }
  uda::save_feature_dataset(out_dir / "target.csv", target_with_truth);
  std::cout << "wrote " << (out_dir / "source.csv").string() << " ("
            << bench.source.samples.size() << " samples) and "
            << (out_dir / "target.csv").string() << " (" << bench.target.samples.size()
            << " samples)\n";
  return 0;
}

int cmd_ablate(const TrainFlags& flags, const fs::path& source_path,
               const fs::path& target_path, const std::vector<std::string>& method_names,
               const std::vector<std::uint64_t>& seeds, const std::vector<int>& t_values,
               int threads, const fs::path& out_dir, std::string task, bool l2_normalize) {
  std::vector<uda::Method> methods;
  for (const std::string& name : method_names) {
    const auto m = uda::parse_method(name);
    if (!m) throw uda::UsageError("ablate: unknown method '" + name + "'");
    methods.push_back(*m);
  }
  uda::Dataset source = load_as_role(source_path, uda::Domain::source);
  uda::Dataset target = load_as_role(target_path, uda::Domain::target);
  if (l2_normalize) {
    uda::l2_normalize_features(source);
    uda::l2_normalize_features(target);
  }
  const std::optional<std::vector<int>> truth = take_truth(target);
  if (task.empty()) task = default_task(source_path, target_path);

  std::vector<uda::AblationCellTrace> traces;
  const uda::ExperimentReport report =
      uda::run_ablation(source, target, task, methods, seeds, t_values,
                        pipeline_config(flags), truth ? &*truth : nullptr, threads, &traces);

  fs::create_directories(out_dir);
  uda::write_report_csv(out_dir / "report.csv", report);
  uda::write_report_md(out_dir / "report.md", report);
  std::ofstream trace_out(out_dir / "trace.jsonl");
  for (const uda::AblationCellTrace& cell : traces) {
    for (const uda::IterationTrace& t : cell.traces) {
      trace_out << trace_line(task, uda::method_name(cell.method), cell.seed, cell.iterations,
                              t)
                       .dump()
                << '\n';
    }
  }
  for (const uda::AggregateRow& a : report.aggregates) {
    std::cout << a.task << " " << a.method << " T=" << a.iterations << " mean final "
              << uda::format_double(a.mean_final) << " over " << a.runs << " runs\n";
  }
  return 0;
}

int cmd_project(const fs::path& source_path, const fs::path& target_path,
                const fs::path& synthetic_path, const fs::path& out_dir) {
  std::vector<uda::FeatureSample> merged;
  auto append = [&](const fs::path& p, uda::Domain role, bool synthetic) {
    if (p.empty()) return;
    uda::Dataset ds = uda::load_feature_dataset(p);
    for (uda::FeatureSample& s : ds.samples) {
      if (!synthetic) s.domain = role;
      s.synthetic = synthetic;
      merged.push_back(std::move(s));
    }
  };
  append(source_path, uda::Domain::source, false);
  append(target_path, uda::Domain::target, false);
  append(synthetic_path, uda::Domain::source, true);  // keeps the file's own domain tags

  const std::vector<uda::ProjectedPoint> points = uda::pca_project(merged);
  fs::create_directories(out_dir);
  uda::write_projection_csv(out_dir / "projection.csv", points);
  std::cout << "projected " << points.size() << " samples to "
            << (out_dir / "projection.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"class-balanced selective pseudo-labelling with norm-VAE feature augmentation"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "flat key=value config file, keys prefixed by the subcommand "
                 "(e.g. run.iterations=5); explicit flags win over file entries");

  // run
  auto* run = app.add_subcommand("run", "run one adaptation pipeline");
  TrainFlags run_flags;
  fs::path run_source, run_target, run_out = "out", run_eval;
  std::string run_task;
  bool run_l2 = false;
  run->add_option("--source", run_source, "labelled source dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--target", run_target, "target dataset CSV (labels, if any, are held out)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "output directory");
  run->add_option("--task", run_task, "task name for reports (default <source>-><target>)");
  run->add_option("--eval", run_eval, "labelled held-out target CSV for inductive evaluation")
      ->check(CLI::ExistingFile);
  run->add_flag("--l2-normalize", run_l2, "scale every feature vector to unit L2 norm");
  add_train_flags(run, run_flags);

  // benchgen
  auto* gen = app.add_subcommand("benchgen", "generate a two-domain synthetic benchmark");
  uda::BenchmarkSpec gen_spec;
  int gen_source_count = 100, gen_target_count = 100;
  double gen_imbalance = 1.0;
  fs::path gen_out = "bench";
  gen->add_option("--classes", gen_spec.class_count)->check(CLI::Range(2, 1000));
  gen->add_option("--dim", gen_spec.dim)->check(CLI::PositiveNumber);
  gen->add_option("--source-per-class", gen_source_count)->check(CLI::PositiveNumber);
  gen->add_option("--target-per-class", gen_target_count)->check(CLI::PositiveNumber);
  gen->add_option("--centroid-scale", gen_spec.centroid_scale)->check(CLI::PositiveNumber);
  gen->add_option("--spread", gen_spec.spread)->check(CLI::PositiveNumber);
  gen->add_option("--shift-translation", gen_spec.shift_translation);
  gen->add_option("--shift-rotation", gen_spec.shift_rotation, "radians");
  gen->add_option("--cov-scale", gen_spec.covariance_scale,
                  "target noise multiplier for the last class")
      ->check(CLI::PositiveNumber);
  gen->add_option("--imbalance", gen_imbalance, "max:min target class count ratio")
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_spec.seed);
  gen->add_option("--out", gen_out, "output directory");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "method x seed x T grid");
  TrainFlags ablate_flags;
  fs::path ablate_source, ablate_target, ablate_out = "out";
  std::string ablate_task;
  std::vector<std::string> ablate_methods{"baseline", "naive-spl-star", "naive-spl"};
  std::vector<std::uint64_t> ablate_seeds{0, 1, 2, 3, 4};
  std::vector<int> ablate_ts{10};
  int ablate_threads = 1;
  bool ablate_l2 = false;
  ablate->add_option("--source", ablate_source)->required()->check(CLI::ExistingFile);
  ablate->add_option("--target", ablate_target)->required()->check(CLI::ExistingFile);
  ablate->add_option("--methods", ablate_methods, "methods to compare")->delimiter(',');
  ablate->add_option("--seeds", ablate_seeds, "seeds to average over")->delimiter(',');
  ablate->add_option("--T-values", ablate_ts, "iteration counts")->delimiter(',');
  ablate->add_option("--threads", ablate_threads, "parallel grid cells")
      ->check(CLI::PositiveNumber);
  ablate->add_option("--out", ablate_out, "output directory");
  ablate->add_option("--task", ablate_task, "task name for reports");
  ablate->add_flag("--l2-normalize", ablate_l2, "scale every feature vector to unit L2 norm");
  add_train_flags(ablate, ablate_flags);

  // project
  auto* project = app.add_subcommand("project", "export a 2-D principal-axis projection");
  fs::path proj_source, proj_target, proj_synth, proj_out = "out";
  project->add_option("--source", proj_source)->check(CLI::ExistingFile);
  project->add_option("--target", proj_target)->check(CLI::ExistingFile);
  project->add_option("--synthetic", proj_synth, "synthetic feature CSV (domain tags kept)")
      ->check(CLI::ExistingFile);
  project->add_option("--out", proj_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  try {
    if (run->parsed()) {
      return cmd_run(run_flags, run_source, run_target, run_out, run_task, run_eval, run_l2);
    }
    if (gen->parsed()) {
      return cmd_benchgen(gen_spec, gen_source_count, gen_target_count, gen_imbalance,
                          gen_out);
    }
    if (ablate->parsed()) {
      return cmd_ablate(ablate_flags, ablate_source, ablate_target, ablate_methods,
                        ablate_seeds, ablate_ts, ablate_threads, ablate_out, ablate_task,
                        ablate_l2);
    }
    if (project->parsed()) {
      if (proj_source.empty() && proj_target.empty() && proj_synth.empty()) {
        std::cerr << "project: provide at least one of --source/--target/--synthetic\n";
        return 2;
      }
      return cmd_project(proj_source, proj_target, proj_synth, proj_out);
    }
  } catch (const uda::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
