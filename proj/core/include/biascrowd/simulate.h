#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "biascrowd/dataset.h"

namespace biascrowd {

using Rng = std::mt19937_64;

// Seeds a generator from a 64-bit seed via splitmix64 mixing, so nearby
// seeds (base + index) give unrelated streams.
Rng make_rng(std::uint64_t seed);

struct SynthConfig {
  int n_workers = 20;
  int n_tasks = 100;
  int n_classes = 2;
  double mean_e = 0.15;
  double mean_c = 0.75;
  double sd_e = 0.075;
  double sd_c = 0.125;
  double rho = 0.0;
  std::uint64_t seed = 0;
  // Replaces e_ij clipped to exactly 0 in the returned propensities. Such
  // cells never carry a label.
  double clip_floor = 0.01;
};

struct SyntheticData {
  LabelDataset dataset;
  // Clipped observation probabilities (zeros raised to clip_floor).
  PropensityMatrix propensity;
  // Gaussian draws before clipping.
  Eigen::MatrixXd raw_e;
  Eigen::MatrixXd raw_c;
  // Clipped correct-answer probabilities.
  Eigen::MatrixXd correct_prob;
};

SyntheticData generate_synthetic(const SynthConfig& cfg);

// Keeps min(labels_per_task, available) labels per task, sampled uniformly
// without replacement.
LabelDataset subsample_labels(const LabelDataset& ds, int labels_per_task,
                              std::uint64_t seed);

enum class InjectionKind { kSpam, kColluding };

struct InjectionConfig {
  InjectionKind kind = InjectionKind::kSpam;
  int count = 0;
  std::uint64_t seed = 0;
};

// Largest worker count whose full-coverage labels stay within half of all
// labels: floor(|labels| / m).
int max_injection_count(const LabelDataset& ds);

// Fraction of labels contributed by `count` injected full-coverage workers.
double malicious_fraction(const LabelDataset& original, int count);

// Appends `count` workers labeling every task uniformly at random.
LabelDataset inject_spam(const LabelDataset& ds, const InjectionConfig& cfg);

// Appends `count` workers that share one uniformly drawn label per task.
LabelDataset inject_collusion(const LabelDataset& ds, const InjectionConfig& cfg);

LabelDataset inject(const LabelDataset& ds, const InjectionConfig& cfg);

}  // namespace biascrowd
