#pragma once

#include <optional>
#include <span>
#include <vector>

#include "biascrowd/dataset.h"

namespace biascrowd {

class ZeroVarianceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct WorkerStats {
  // Fraction of tasks the worker labeled, n_i / m.
  std::vector<double> propensity;
  // Fraction of the worker's labels that match gold. Only labels on
  // gold-annotated tasks count; nullopt when there are none.
  std::vector<std::optional<double>> accuracy;
};

// Throws MissingGoldError when the dataset carries no gold labels.
WorkerStats worker_stats(const LabelDataset& ds);

double pearson_correlation(std::span<const double> x, std::span<const double> y);
// Pearson correlation of average ranks.
double spearman_correlation(std::span<const double> x, std::span<const double> y);

// Pearson correlation between propensity and accuracy over workers whose
// accuracy is defined.
double propensity_accuracy_correlation(const WorkerStats& stats);

// Fraction of gold-labeled tasks predicted correctly. `predictions` is
// indexed by task; a negative entry counts as missing.
double accuracy(std::span<const int> predictions,
                const std::vector<std::optional<int>>& gold);

}  // namespace biascrowd
