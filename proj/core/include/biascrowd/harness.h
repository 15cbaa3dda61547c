#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biascrowd/dataset.h"
#include "biascrowd/dawid_skene.h"
#include "biascrowd/glad.h"
#include "biascrowd/propensity.h"
#include "biascrowd/results.h"
#include "biascrowd/simulate.h"
#include "biascrowd/stats.h"

namespace biascrowd {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Method { kMV, kIpsMV, kDS, kIpsDS, kGLAD, kIpsGLAD };

std::string_view method_id(Method m);
Method parse_method(std::string_view id);
bool is_ips(Method m);
Method base_method(Method m);
// Comma-separated list, e.g. "mv,ips-mv".
std::vector<Method> parse_methods(std::string_view list);
std::vector<Method> all_methods();

enum class Experiment {
  kSyntheticSweep,
  kRealSubsample,
  kSpamRobustness,
  kCollusionRobustness,
  kWorkerCorrelation,
};

std::string_view experiment_id(Experiment e);
Experiment parse_experiment(std::string_view id);

// Evenly spaced grid over [-1, 1].
std::vector<double> rho_grid(int points = 21);

struct ExperimentConfig {
  Experiment experiment = Experiment::kRealSubsample;
  std::vector<Method> methods = all_methods();
  std::vector<double> gammas = {0.1, 1.0, 10.0};
  std::vector<int> labels_per_task = {2, 5, 8};
  std::vector<double> rhos = rho_grid();
  // Empty: sweep 0, 1, ..., max_injection_count.
  std::vector<int> inject_counts;
  int reps = 5;
  std::uint64_t seed = 42;
  std::string dataset_name = "dataset";
  SynthConfig synth;
  DSOptions ds;
  GLADOptions glad;
  MCConfig mc;
  // 0: hardware concurrency.
  int threads = 0;

  // Throws ConfigError.
  void validate() const;
};

// Runs one aggregation method. `e` is required for IPS methods.
std::vector<int> aggregate(const LabelDataset& ds, Method method,
                           const PropensityMatrix* e,
                           const ExperimentConfig& cfg);

// MV vs IPS-MV with oracle propensities over the rho grid. Replication r uses
// seed cfg.seed + r at every rho.
std::vector<ResultRecord> run_synthetic_sweep(const ExperimentConfig& cfg);

// Per labels-per-task value and replication r: subsample with seed
// cfg.seed + r, estimate propensities by 1-bit MC for every gamma, run every
// method.
std::vector<ResultRecord> run_real_subsample(const LabelDataset& ds,
                                             const ExperimentConfig& cfg);

// Per injected count and replication r: inject with seed cfg.seed + r,
// re-estimate propensities, run every method.
std::vector<ResultRecord> run_injection(const LabelDataset& ds,
                                        const ExperimentConfig& cfg,
                                        InjectionKind kind);

struct WorkerCorrelation {
  WorkerStats stats;
  double pearson = 0.0;
  double spearman = 0.0;
};

WorkerCorrelation run_worker_correlation(const LabelDataset& ds);
void write_worker_stats_csv(const LabelDataset& ds, const WorkerCorrelation& wc,
                            const std::filesystem::path& dir);

// Calls fn(i) for i in [0, n) over `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace biascrowd
