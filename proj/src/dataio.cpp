#include "uda/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace uda {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_double(std::string_view field, long line_no) {
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw ParseError("non-numeric field '" + std::string(field) + "'", line_no);
  }
  return value;
}

long parse_long(std::string_view field, long line_no) {
  long value = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw ParseError("non-integer field '" + std::string(field) + "'", line_no);
  }
  return value;
}

void format_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

Dataset load_feature_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_feature_dataset: cannot open " + path.string());

  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++line_no;
  int dim = 0;
  int classes = 0;
  if (std::sscanf(line.c_str(), "#dim=%d,classes=%d", &dim, &classes) != 2) {
    throw ParseError("malformed header, expected #dim=<d>,classes=<C>", line_no);
  }
  if (dim <= 0 || classes < 2) throw ParseError("header dims must satisfy d>=1, C>=2", line_no);

  Dataset ds;
  ds.dim = dim;
  ds.classes = classes;
  long row_index = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = split_fields(line);
    if (static_cast<int>(fields.size()) != dim + 3) {
      throw ParseError("ragged row: expected " + std::to_string(dim + 3) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    FeatureSample s;
    s.id = fields[0] == "-" ? row_index : parse_long(fields[0], line_no);
    if (fields[1] == "S") {
      s.domain = Domain::source;
    } else if (fields[1] == "T") {
      s.domain = Domain::target;
    } else {
      throw ParseError("unknown domain tag '" + std::string(fields[1]) + "'", line_no);
    }
    if (fields[2] == "-") {
      s.label = kUnlabelled;
    } else {
      const long lbl = parse_long(fields[2], line_no);
      if (lbl < 0 || lbl >= classes) {
        throw ParseError("label " + std::to_string(lbl) + " out of range", line_no);
      }
      s.label = static_cast<int>(lbl);
    }
    s.features.resize(dim);
    for (int j = 0; j < dim; ++j) {
      const double v = parse_double(fields[static_cast<std::size_t>(j + 3)], line_no);
      if (!std::isfinite(v)) throw ParseError("non-finite feature value", line_no);
      s.features(j) = v;
    }
    ds.samples.push_back(std::move(s));
    ++row_index;
  }
  return ds;
}

void save_feature_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw Error("save_feature_dataset: cannot open " + path.string());
  out << "#dim=" << dataset.dim << ",classes=" << dataset.classes << "\n";
  std::string line;
  for (const FeatureSample& s : dataset.samples) {
    if (s.features.size() != dataset.dim) {
      throw ShapeError("save_feature_dataset: sample dim differs from dataset dim");
    }
    line.clear();
    line += std::to_string(s.id);
    line += ',';
    line += domain_tag(s.domain);
    line += ',';
    if (s.label == kUnlabelled) {
      line += '-';
    } else {
      line += std::to_string(s.label);
    }
    for (Index j = 0; j < s.features.size(); ++j) {
      line += ',';
      format_double(line, s.features(j));
    }
    line += '\n';
    out << line;
  }
}

std::vector<int> strip_labels(Dataset& dataset) {
  std::vector<int> truth;
  truth.reserve(dataset.samples.size());
  for (FeatureSample& s : dataset.samples) {
    truth.push_back(s.label);
    s.label = kUnlabelled;
  }
  return truth;
}

void l2_normalize_features(Dataset& dataset) {
  for (FeatureSample& s : dataset.samples) {
    const double n = s.features.norm();
    if (n == 0.0) {
      throw UsageError("l2_normalize_features: sample " + std::to_string(s.id) +
                       " has a zero feature vector");
    }
    s.features /= n;
  }
}

std::vector<int> imbalanced_counts(int base, double ratio, int classes) {
  if (base < 1 || classes < 1 || ratio < 1.0) {
    throw UsageError("imbalanced_counts: need base >= 1, classes >= 1, ratio >= 1");
  }
  const double hi = 2.0 * base * ratio / (ratio + 1.0);
  const double lo = 2.0 * base / (ratio + 1.0);
  std::vector<int> counts(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    const double frac = classes > 1 ? static_cast<double>(c) / (classes - 1) : 0.0;
    counts[static_cast<std::size_t>(c)] = static_cast<int>(std::llround(hi + (lo - hi) * frac));
  }
  return counts;
}

namespace {

std::vector<int> broadcast_counts(const std::vector<int>& counts, int classes,
                                  const char* what) {
  if (counts.empty()) throw UsageError(std::string(what) + ": counts must not be empty");
  std::vector<int> out;
  if (counts.size() == 1) {
    out.assign(static_cast<std::size_t>(classes), counts[0]);
  } else if (static_cast<int>(counts.size()) == classes) {
    out = counts;
  } else {
    throw UsageError(std::string(what) + ": need 1 or class_count entries");
  }
  for (int c : out) {
    if (c < 0) throw UsageError(std::string(what) + ": counts must be nonnegative");
  }
  return out;
}

// Plane-wise rotation by angle on coordinate pairs (0,1), (2,3), ...
Vector rotate_planewise(const Vector& v, double angle) {
  Vector out = v;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (Index i = 0; i + 1 < v.size(); i += 2) {
    out(i) = c * v(i) - s * v(i + 1);
    out(i + 1) = s * v(i) + c * v(i + 1);
  }
  return out;
}

}  // namespace

Benchmark generate_benchmark(const BenchmarkSpec& spec) {
  if (spec.class_count < 2) throw UsageError("generate_benchmark: class_count must be >= 2");
  if (spec.dim < 1) throw UsageError("generate_benchmark: dim must be positive");
  if (spec.centroid_scale <= 0.0 || spec.spread <= 0.0 || spec.covariance_scale <= 0.0) {
    throw UsageError("generate_benchmark: scales must be positive");
  }
  const std::vector<int> n_src =
      broadcast_counts(spec.source_per_class, spec.class_count, "source_per_class");
  const std::vector<int> n_tgt =
      broadcast_counts(spec.target_per_class, spec.class_count, "target_per_class");

  RngStream centroid_rng(spec.seed, "bench/centroids");
  RngStream translation_rng(spec.seed, "bench/translation");
  RngStream source_rng(spec.seed, "bench/source-noise");
  RngStream target_rng(spec.seed, "bench/target-noise");

  std::vector<Vector> centroids(static_cast<std::size_t>(spec.class_count));
  for (Vector& c : centroids) {
    c.resize(spec.dim);
    for (Index j = 0; j < spec.dim; ++j) c(j) = spec.centroid_scale * centroid_rng.normal();
  }

  Vector translation = Vector::Zero(spec.dim);
  if (spec.shift_translation != 0.0) {
    for (Index j = 0; j < spec.dim; ++j) translation(j) = translation_rng.normal();
    translation *= spec.shift_translation / translation.norm();
  }

  Benchmark bench;
  bench.source.dim = bench.target.dim = spec.dim;
  bench.source.classes = bench.target.classes = spec.class_count;

  long id = 0;
  for (int c = 0; c < spec.class_count; ++c) {
    for (int i = 0; i < n_src[static_cast<std::size_t>(c)]; ++i) {
      FeatureSample s;
      s.id = id++;
      s.domain = Domain::source;
      s.label = c;
      s.features.resize(spec.dim);
      for (Index j = 0; j < spec.dim; ++j) {
        s.features(j) = centroids[static_cast<std::size_t>(c)](j) + spec.spread * source_rng.normal();
      }
      bench.source.samples.push_back(std::move(s));
    }
  }

  id = 0;
  for (int c = 0; c < spec.class_count; ++c) {
    const Vector shifted =
        rotate_planewise(centroids[static_cast<std::size_t>(c)], spec.shift_rotation) +
        translation;
    const double class_frac =
        spec.class_count > 1 ? static_cast<double>(c) / (spec.class_count - 1) : 0.0;
    const double noise = spec.spread * (1.0 + (spec.covariance_scale - 1.0) * class_frac);
    for (int i = 0; i < n_tgt[static_cast<std::size_t>(c)]; ++i) {
      FeatureSample t;
      t.id = id++;
      t.domain = Domain::target;
      t.label = kUnlabelled;
      t.features.resize(spec.dim);
      for (Index j = 0; j < spec.dim; ++j) {
        t.features(j) = shifted(j) + noise * target_rng.normal();
      }
      bench.target.samples.push_back(std::move(t));
      bench.target_truth.push_back(c);
    }
  }
  return bench;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction, RngStream& rng) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw UsageError("split: fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = dataset.samples.size();
  if (n < 2) throw UsageError("split: need at least two samples");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  rng.shuffle(idx);
  std::size_t na = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  na = std::clamp<std::size_t>(na, 1, n - 1);

  Dataset a, b;
  a.dim = b.dim = dataset.dim;
  a.classes = b.classes = dataset.classes;
  for (std::size_t i = 0; i < n; ++i) {
    (i < na ? a : b).samples.push_back(dataset.samples[idx[i]]);
  }
  return {std::move(a), std::move(b)};
}

}  // namespace uda
