#include "uda/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "uda/types.hpp"

namespace uda {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ExperimentReport make_report(std::vector<ReportRow> rows) {
  ExperimentReport report;
  report.rows = std::move(rows);
  std::vector<std::tuple<std::string, std::string, int>> seen;
  for (const ReportRow& row : report.rows) {
    const auto key = std::tuple(row.task, row.method, row.iterations);
    bool found = false;
    for (const auto& k : seen) {
      if (k == key) {
        found = true;
        break;
      }
    }
    if (found) continue;
    seen.push_back(key);
    AggregateRow agg;
    agg.task = row.task;
    agg.method = row.method;
    agg.iterations = row.iterations;
    double sum0 = 0.0, sum_final = 0.0;
    int n = 0;
    for (const ReportRow& r : report.rows) {
      if (std::tuple(r.task, r.method, r.iterations) != key) continue;
      sum0 += r.accuracy_iter0;
      sum_final += r.accuracy_final;
      ++n;
    }
    agg.mean_iter0 = sum0 / n;
    agg.mean_final = sum_final / n;
    agg.runs = n;
    report.aggregates.push_back(std::move(agg));
  }
  return report;
}

void write_report_csv(const std::filesystem::path& path, const ExperimentReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("write_report_csv: cannot open " + path.string());
  out << "task,method,seed,iterations,accuracy_iter0,accuracy_final\n";
  for (const ReportRow& r : report.rows) {
    out << r.task << ',' << r.method << ',' << r.seed << ',' << r.iterations << ','
        << format_double(r.accuracy_iter0) << ',' << format_double(r.accuracy_final) << '\n';
  }
  for (const AggregateRow& a : report.aggregates) {
    out << a.task << ',' << a.method << ",mean," << a.iterations << ','
        << format_double(a.mean_iter0) << ',' << format_double(a.mean_final) << '\n';
  }
}

namespace {

std::string percent(double fraction) {
  if (std::isnan(fraction)) return "n/a";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << 100.0 * fraction;
  return os.str();
}

}  // namespace

void write_report_md(const std::filesystem::path& path, const ExperimentReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("write_report_md: cannot open " + path.string());

  std::vector<std::string> tasks;
  std::vector<std::pair<std::string, int>> methods;  // (method, iterations)
  for (const AggregateRow& a : report.aggregates) {
    if (std::find(tasks.begin(), tasks.end(), a.task) == tasks.end()) tasks.push_back(a.task);
    const auto m = std::pair(a.method, a.iterations);
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
  }
  const bool multi_t = [&] {
    for (const auto& m : methods) {
      if (m.second != methods.front().second) return true;
    }
    return false;
  }();

  out << "| Method |";
  for (const std::string& t : tasks) out << ' ' << t << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < tasks.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& [method, iters] : methods) {
    out << "| " << method;
    if (multi_t) out << " (T=" << iters << ")";
    out << " |";
    for (const std::string& t : tasks) {
      std::string cell = "-";
      for (const AggregateRow& a : report.aggregates) {
        if (a.task == t && a.method == method && a.iterations == iters) {
          cell = percent(a.mean_final);
          break;
        }
      }
      out << ' ' << cell << " |";
    }
    out << '\n';
  }
}

}  // namespace uda
