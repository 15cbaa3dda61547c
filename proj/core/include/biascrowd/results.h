#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace biascrowd {

// One accuracy measurement: one method, one axis value, one replication.
struct ResultRecord {
  std::string experiment;
  std::string dataset;
  // Lower-case method id: mv, ips-mv, ds, ips-ds, glad, ips-glad.
  std::string method;
  // 1-bit MC gamma for estimated propensities; empty for base methods and
  // oracle propensities.
  std::optional<double> gamma;
  // labels_per_task, rho or injected_count.
  std::string axis;
  double axis_value = 0.0;
  // Share of labels from injected workers (injection experiments only).
  std::optional<double> malicious_fraction;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double wall_time = 0.0;

  // Row label used in summaries, e.g. "IPS-D&S (gamma=10)".
  std::string method_label() const;
};

// Ordering used before emission: experiment, dataset, method, gamma, axis
// value, seed.
bool record_key_less(const ResultRecord& a, const ResultRecord& b);
void sort_records(std::vector<ResultRecord>& records);

struct SummaryRow {
  std::string experiment;
  std::string dataset;
  std::string method_label;
  std::string axis;
  double axis_value = 0.0;
  double mean_accuracy = 0.0;
  int n_seeds = 0;
  std::optional<double> malicious_fraction;
};

// Mean accuracy per (experiment, dataset, method label, axis value).
std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records);

// Writes into `dir`:
//   results_long.csv  every record
//   summary.csv       one row per SummaryRow
//   table_<experiment>_<dataset>.csv  method label x axis value pivot of mean
//                                     accuracy
//   plot_<experiment>_<dataset>.csv   x = axis value, one mean-accuracy column
//                                     per method
// Empty input still produces the first two files with headers.
void emit_results(std::vector<ResultRecord> records, const std::filesystem::path& dir);

void write_records_csv(const std::vector<ResultRecord>& records,
                       const std::filesystem::path& path);
std::vector<ResultRecord> read_records_csv(const std::filesystem::path& path);

}  // namespace biascrowd
