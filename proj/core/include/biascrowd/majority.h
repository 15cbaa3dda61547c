#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "biascrowd/dataset.h"

namespace biascrowd {

struct VoteResult {
  std::vector<int> predictions;
  // a_j^(k): m x K.
  Eigen::MatrixXd scores;
  // Tasks without any label; predicted as class 0.
  std::vector<bool> unlabeled;
};

// Accumulates weighted votes and takes the argmax per task (ties go to the
// lowest class index). `weights` follows ds.labels().
VoteResult weighted_vote(const LabelDataset& ds, std::span<const double> weights);

VoteResult majority_vote(const LabelDataset& ds);

// Votes weighted by 1 / e_ij. Throws DomainError if an observed cell has a
// non-positive propensity.
VoteResult ips_majority_vote(const LabelDataset& ds, const PropensityMatrix& e);

}  // namespace biascrowd
