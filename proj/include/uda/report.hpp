#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace uda {

struct ReportRow {
  std::string task;
  std::string method;
  std::uint64_t seed = 0;
  int iterations = 0;
  double accuracy_iter0 = 0.0;
  double accuracy_final = 0.0;
};

// Mean over seeds for one (task, method, iterations) group.
struct AggregateRow {
  std::string task;
  std::string method;
  int iterations = 0;
  double mean_iter0 = 0.0;
  double mean_final = 0.0;
  int runs = 0;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::vector<AggregateRow> aggregates;
};

// Groups rows by (task, method, iterations) in first-appearance order and
// fills the aggregate means.
ExperimentReport make_report(std::vector<ReportRow> rows);

void write_report_csv(const std::filesystem::path& path, const ExperimentReport& report);

// Accuracy table with one column per task, mirroring per-task benchmark
// layouts; cells are mean final accuracies in percent.
void write_report_md(const std::filesystem::path& path, const ExperimentReport& report);

// Shortest round-trip decimal form, shared by all CSV writers.
std::string format_double(double v);

}  // namespace uda
