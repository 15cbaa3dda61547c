#pragma once

#include <random>
#include <vector>

#include "biascrowd/dataset.h"
#include "biascrowd/simulate.h"

namespace biascrowd::testing {

// Random dataset where each (worker, task) is observed with probability
// `density`; every task gets at least one label. Gold is drawn uniformly and
// labels agree with gold with probability `agreement`.
inline LabelDataset random_dataset(int n, int m, int K, double density, std::uint64_t seed,
                                   double agreement = 0.7) {
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> cls(0, K - 1);
  std::uniform_int_distribution<int> worker(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::optional<int>> gold(m);
  for (auto& g : gold) g = cls(rng);
  std::vector<Observation> obs;
  for (int j = 0; j < m; ++j) {
    const int forced = worker(rng);
    for (int i = 0; i < n; ++i) {
      if (i != forced && unit(rng) >= density) continue;
      int label = *gold[j];
      if (unit(rng) >= agreement) label = cls(rng);
      obs.push_back({i, j, label});
    }
  }
  return LabelDataset(n, m, K, std::move(obs), std::move(gold));
}

inline PropensityMatrix random_propensity(int n, int m, std::uint64_t seed, double lo = 0.05) {
  Rng rng = make_rng(seed ^ 0xabcdefULL);
  std::uniform_real_distribution<double> unit(lo, 1.0);
  Eigen::MatrixXd e(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) e(i, j) = unit(rng);
  }
  return PropensityMatrix(e);
}

}  // namespace biascrowd::testing
