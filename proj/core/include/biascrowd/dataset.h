#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace biascrowd {

// Error raised for malformed input files and rows.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Error raised when a value falls outside its declared domain (label >= K,
// non-positive propensity, mismatched dimensions, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A (worker, task) pair was observed more than once.
class DuplicateObservationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operation needs gold labels that the dataset does not carry.
class MissingGoldError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Predictions do not cover every gold-labeled task.
class CoverageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Observation {
  int worker = 0;
  int task = 0;
  int label = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Immutable sparse collection of crowd labels.
//
// Observations are stored sorted by (task, worker); per-observation arrays
// used by the aggregators (weights, propensities) follow this order. Workers
// and tasks without any observation keep their index.
class LabelDataset {
 public:
  LabelDataset(int n_workers, int n_tasks, int n_classes,
               std::vector<Observation> labels,
               std::vector<std::optional<int>> gold = {});

  int n_workers() const { return n_workers_; }
  int n_tasks() const { return n_tasks_; }
  int n_classes() const { return n_classes_; }
  std::size_t n_labels() const { return labels_.size(); }

  std::span<const Observation> labels() const { return labels_; }

  // Observations for task j, contiguous in labels().
  std::span<const Observation> task_labels(int task) const;
  // Offset of task j's first observation in labels().
  std::size_t task_offset(int task) const { return task_begin_[task]; }

  // Indices into labels() of worker i's observations.
  std::span<const std::size_t> worker_label_indices(int worker) const;

  bool has_gold() const;
  // Gold label per task; std::nullopt where unknown. Empty when no gold.
  const std::vector<std::optional<int>>& gold() const { return gold_; }
  std::optional<int> gold_label(int task) const;

  // Dense 0/1 observation indicator, n_workers x n_tasks.
  Eigen::MatrixXd observation_matrix() const;

  // Display names. Default to decimal indices.
  const std::vector<std::string>& worker_names() const { return worker_names_; }
  const std::vector<std::string>& task_names() const { return task_names_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  void set_names(std::vector<std::string> workers, std::vector<std::string> tasks,
                 std::vector<std::string> classes);

  // Same names and gold, different observations (and possibly more workers).
  LabelDataset with_labels(int n_workers, std::vector<Observation> labels,
                           std::vector<std::string> extra_worker_names = {}) const;

 private:
  int n_workers_;
  int n_tasks_;
  int n_classes_;
  std::vector<Observation> labels_;
  std::vector<std::optional<int>> gold_;
  std::vector<std::size_t> task_begin_;
  std::vector<std::size_t> worker_begin_;
  std::vector<std::size_t> worker_index_;
  std::vector<std::string> worker_names_;
  std::vector<std::string> task_names_;
  std::vector<std::string> class_names_;
};

// Reads the `worker,task,label` CSV (and optional `task,label` gold CSV).
//
// Worker, task and class tokens are arbitrary strings mapped to dense indices.
// Class tokens that are all integers are ordered numerically; otherwise they
// are ordered by first appearance (gold file first, then labels file). Tasks
// are indexed by first appearance in the same order, workers by first
// appearance in the labels file.
LabelDataset load_dataset(const std::filesystem::path& labels_path,
                          const std::optional<std::filesystem::path>& gold_path,
                          int n_classes);

// Parses from in-memory CSV text, same rules as load_dataset.
LabelDataset parse_dataset(const std::string& labels_csv,
                           const std::optional<std::string>& gold_csv,
                           int n_classes);

void write_labels_csv(const LabelDataset& ds, const std::filesystem::path& path);
void write_gold_csv(const LabelDataset& ds, const std::filesystem::path& path);
// `index,name` mapping of dense class indices to the original tokens.
void write_class_map_csv(const LabelDataset& ds, const std::filesystem::path& path);

// Converts a tab-separated `worker<TAB>task<TAB>label` file to the labels CSV.
// Blank lines and lines starting with '#' or '!' are skipped.
void convert_tsv_to_csv(const std::filesystem::path& tsv_path,
                        const std::filesystem::path& csv_path);

// Converts the five-column annotation format
// `id<TAB>worker<TAB>task<TAB>response<TAB>gold` (as used by the RTE, TEMP and
// WSD releases) to a labels CSV and a gold CSV. Comment lines as above.
void convert_annotation_tsv(const std::filesystem::path& tsv_path,
                            const std::filesystem::path& labels_path,
                            const std::filesystem::path& gold_path);

// Observation probabilities e_ij, each in (0, 1].
class PropensityMatrix {
 public:
  explicit PropensityMatrix(Eigen::MatrixXd values);

  static PropensityMatrix constant(int n_workers, int n_tasks, double value);

  int n_workers() const { return static_cast<int>(values_.rows()); }
  int n_tasks() const { return static_cast<int>(values_.cols()); }
  double operator()(int worker, int task) const { return values_(worker, task); }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  Eigen::MatrixXd values_;
};

// Headerless numeric CSV, one matrix row per line.
void write_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& path);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

// Per-observation weights aligned with LabelDataset::labels().
std::vector<double> unit_weights(const LabelDataset& ds);
// 1 / e_ij for each observation.
std::vector<double> ips_weights(const LabelDataset& ds, const PropensityMatrix& e);

// q(Z_j = k), one row per task, plus the class prior.
struct LabelPosterior {
  Eigen::MatrixXd q;
  Eigen::VectorXd prior;

  // argmax per task, ties to the lowest class index.
  std::vector<int> predictions() const;
};

}  // namespace biascrowd
