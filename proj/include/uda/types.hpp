#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uda {

// Dense storage is row-major throughout so that serialized weights and
// per-sample feature rows share one layout.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

using Index = Eigen::Index;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// API misuse: empty inputs, stale tapes, labels out of range, untrained models.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, long line)
      : Error(message + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const { return line_; }

 private:
  long line_ = 0;
};

enum class Domain : int { source = 0, target = 1 };

inline const char* domain_tag(Domain d) { return d == Domain::source ? "S" : "T"; }

constexpr int kUnlabelled = -1;

struct FeatureSample {
  long id = 0;
  Domain domain = Domain::source;
  int label = kUnlabelled;
  bool synthetic = false;
  Vector features;
};

struct Dataset {
  std::vector<FeatureSample> samples;
  int dim = 0;
  int classes = 0;
};

// Stacks sample features into an n x d matrix, validating a uniform dimension.
Matrix to_matrix(const std::vector<FeatureSample>& samples);

// Canonical training order: real before synthetic, source before target,
// then by sample id. Makes results independent of container ordering.
std::vector<std::size_t> canonical_order(const std::vector<FeatureSample>& samples);

}  // namespace uda
