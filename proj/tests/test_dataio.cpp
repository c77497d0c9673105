#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "uda/classifier.hpp"
#include "uda/dataio.hpp"

using namespace uda;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& name)
      : path(std::filesystem::temp_directory_path() / name) {}
  ~TempFile() { std::filesystem::remove(path); }
};

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("a small file loads with the declared dimensions") {
  TempFile f("uda_small.csv");
  write_text(f.path, "#dim=3,classes=2\n0,S,1,0.5,-1.25,3\n1,T,-,4,5,6.5\n");
  const Dataset ds = load_feature_dataset(f.path);
  CHECK(ds.dim == 3);
  CHECK(ds.classes == 2);
  REQUIRE(ds.samples.size() == 2);
  CHECK(ds.samples[0].label == 1);
  CHECK(ds.samples[0].domain == Domain::source);
  CHECK(ds.samples[1].label == kUnlabelled);
  CHECK(ds.samples[1].domain == Domain::target);
  CHECK(ds.samples[1].features(2) == 6.5);
}

TEST_CASE("missing ids fall back to the row order") {
  TempFile f("uda_noid.csv");
  write_text(f.path, "#dim=2,classes=2\n-,S,0,1,2\n-,S,1,3,4\n");
  const Dataset ds = load_feature_dataset(f.path);
  CHECK(ds.samples[0].id == 0);
  CHECK(ds.samples[1].id == 1);
}

TEST_CASE("parse failures name the offending line") {
  TempFile f("uda_bad.csv");

  SUBCASE("ragged row") {
    write_text(f.path, "#dim=3,classes=2\n0,S,1,0.5,-1.25\n");
    CHECK_THROWS_WITH_AS(load_feature_dataset(f.path),
                         doctest::Contains("line 2"), ParseError);
  }
  SUBCASE("non-numeric feature") {
    write_text(f.path, "#dim=2,classes=2\n0,S,1,0.5,zebra\n");
    CHECK_THROWS_AS(load_feature_dataset(f.path), ParseError);
  }
  SUBCASE("unknown domain tag") {
    write_text(f.path, "#dim=2,classes=2\n0,Q,1,0.5,1\n");
    CHECK_THROWS_AS(load_feature_dataset(f.path), ParseError);
  }
  SUBCASE("label out of range") {
    write_text(f.path, "#dim=2,classes=2\n0,S,7,0.5,1\n");
    CHECK_THROWS_AS(load_feature_dataset(f.path), ParseError);
  }
  SUBCASE("bad header") {
    write_text(f.path, "dim 3\n");
    CHECK_THROWS_AS(load_feature_dataset(f.path), ParseError);
  }
}

TEST_CASE("save then load is the identity") {
  BenchmarkSpec spec;
  spec.class_count = 3;
  spec.dim = 5;
  spec.source_per_class = {4};
  spec.target_per_class = {4};
  spec.seed = 9;
  const Benchmark bench = generate_benchmark(spec);

  TempFile f("uda_roundtrip.csv");
  save_feature_dataset(f.path, bench.source);
  const Dataset loaded = load_feature_dataset(f.path);
  CHECK(loaded.dim == bench.source.dim);
  CHECK(loaded.classes == bench.source.classes);
  REQUIRE(loaded.samples.size() == bench.source.samples.size());
  for (std::size_t i = 0; i < loaded.samples.size(); ++i) {
    CHECK(loaded.samples[i].id == bench.source.samples[i].id);
    CHECK(loaded.samples[i].label == bench.source.samples[i].label);
    CHECK(loaded.samples[i].domain == bench.source.samples[i].domain);
    CHECK(loaded.samples[i].features == bench.source.samples[i].features);  // bit exact
  }
}

TEST_CASE("strip_labels blinds the dataset and returns the truth") {
  BenchmarkSpec spec;
  spec.class_count = 2;
  spec.dim = 3;
  spec.source_per_class = {5};
  spec.target_per_class = {5};
  Benchmark bench = generate_benchmark(spec);
  Dataset labelled = bench.source;
  const std::vector<int> truth = strip_labels(labelled);
  REQUIRE(truth.size() == labelled.samples.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    CHECK(labelled.samples[i].label == kUnlabelled);
    CHECK(truth[i] == bench.source.samples[i].label);
  }
}

TEST_CASE("benchmark generation is a pure function of its spec") {
  BenchmarkSpec spec;
  spec.class_count = 4;
  spec.dim = 6;
  spec.source_per_class = {10};
  spec.target_per_class = {10};
  spec.shift_translation = 2.0;
  spec.shift_rotation = 0.3;
  spec.seed = 123;
  const Benchmark a = generate_benchmark(spec);
  const Benchmark b = generate_benchmark(spec);
  REQUIRE(a.source.samples.size() == b.source.samples.size());
  for (std::size_t i = 0; i < a.source.samples.size(); ++i) {
    CHECK(a.source.samples[i].features == b.source.samples[i].features);
  }
  for (std::size_t i = 0; i < a.target.samples.size(); ++i) {
    CHECK(a.target.samples[i].features == b.target.samples[i].features);
  }
  CHECK(a.target_truth == b.target_truth);
}

TEST_CASE("zero shift keeps both domains statistically aligned") {
  BenchmarkSpec spec;
  spec.class_count = 4;
  spec.dim = 8;
  spec.source_per_class = {40};
  spec.target_per_class = {40};
  spec.centroid_scale = 3.0;
  spec.spread = 0.8;
  spec.seed = 0;
  const Benchmark bench = generate_benchmark(spec);

  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.learning_rate = 0.02;
  cfg.seed = 0;
  const ClassifierParams clf = train_classifier(bench.source.samples, 4, cfg);
  const double source_acc = evaluate(clf, bench.source.samples);

  std::vector<FeatureSample> target_labelled = bench.target.samples;
  for (std::size_t i = 0; i < target_labelled.size(); ++i) {
    target_labelled[i].label = bench.target_truth[i];
  }
  const double target_acc = evaluate(clf, target_labelled);
  CHECK(std::abs(source_acc - target_acc) < 0.05);

  // a large translation relative to the spread breaks transfer
  BenchmarkSpec shifted = spec;
  shifted.shift_translation = 14.0;
  shifted.shift_rotation = 0.8;
  const Benchmark hard = generate_benchmark(shifted);
  std::vector<FeatureSample> hard_target = hard.target.samples;
  for (std::size_t i = 0; i < hard_target.size(); ++i) {
    hard_target[i].label = hard.target_truth[i];
  }
  const ClassifierParams clf2 = train_classifier(hard.source.samples, 4, cfg);
  const double hard_acc = evaluate(clf2, hard_target);
  CHECK(hard_acc < evaluate(clf2, hard.source.samples) - 0.2);
}

TEST_CASE("split is disjoint, exhaustive and deterministic") {
  BenchmarkSpec spec;
  spec.class_count = 2;
  spec.dim = 3;
  spec.source_per_class = {20};
  const Benchmark bench = generate_benchmark(spec);

  RngStream r1(7, "split"), r2(7, "split");
  const auto [a1, b1] = split(bench.source, 0.25, r1);
  const auto [a2, b2] = split(bench.source, 0.25, r2);
  CHECK(a1.samples.size() == 10);
  CHECK(a1.samples.size() + b1.samples.size() == bench.source.samples.size());
  REQUIRE(a1.samples.size() == a2.samples.size());
  for (std::size_t i = 0; i < a1.samples.size(); ++i) {
    CHECK(a1.samples[i].id == a2.samples[i].id);
  }

  std::set<long> seen;
  for (const FeatureSample& s : a1.samples) seen.insert(s.id);
  for (const FeatureSample& s : b1.samples) {
    CHECK(seen.count(s.id) == 0);
    seen.insert(s.id);
  }
  CHECK(seen.size() == bench.source.samples.size());

  // both halves stay non-empty for any valid fraction when n >= 2
  Dataset tiny;
  tiny.dim = 3;
  tiny.classes = 2;
  tiny.samples = {bench.source.samples[0], bench.source.samples[1]};
  RngStream r3(1, "split");
  const auto [ta, tb] = split(tiny, 0.01, r3);
  CHECK(ta.samples.size() == 1);
  CHECK(tb.samples.size() == 1);

  CHECK_THROWS_AS(split(tiny, 0.0, r3), UsageError);
  CHECK_THROWS_AS(split(tiny, 1.0, r3), UsageError);
}

TEST_CASE("feature normalization scales rows to the unit sphere") {
  BenchmarkSpec spec;
  spec.class_count = 2;
  spec.dim = 4;
  spec.source_per_class = {6};
  Dataset ds = generate_benchmark(spec).source;
  l2_normalize_features(ds);
  for (const FeatureSample& s : ds.samples) {
    CHECK(std::abs(s.features.norm() - 1.0) < 1e-12);
  }

  ds.samples[0].features.setZero();
  CHECK_THROWS_AS(l2_normalize_features(ds), UsageError);
}

TEST_CASE("imbalanced counts honour the requested ratio and total") {
  const std::vector<int> counts = imbalanced_counts(100, 4.0, 10);
  REQUIRE(counts.size() == 10);
  CHECK(counts.front() == 160);
  CHECK(counts.back() == 40);
  CHECK(counts.front() == 4 * counts.back());
  int total = 0;
  for (int c : counts) total += c;
  CHECK(std::abs(total - 1000) <= 10);
  for (std::size_t i = 1; i < counts.size(); ++i) CHECK(counts[i] <= counts[i - 1]);

  const std::vector<int> uniform = imbalanced_counts(50, 1.0, 5);
  for (int c : uniform) CHECK(c == 50);
}
