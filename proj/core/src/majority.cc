#include "biascrowd/majority.h"

namespace biascrowd {

VoteResult weighted_vote(const LabelDataset& ds, std::span<const double> weights) {
  if (weights.size() != ds.n_labels()) throw DomainError("one weight per observation required");
  VoteResult out;
  out.scores = Eigen::MatrixXd::Zero(ds.n_tasks(), ds.n_classes());
  out.predictions.assign(ds.n_tasks(), 0);
  out.unlabeled.assign(ds.n_tasks(), false);
  const auto labels = ds.labels();
  for (std::size_t l = 0; l < labels.size(); ++l) {
    out.scores(labels[l].task, labels[l].label) += weights[l];
  }
  for (int j = 0; j < ds.n_tasks(); ++j) {
    if (ds.task_labels(j).empty()) {
      out.unlabeled[j] = true;
      continue;
    }
    int best = 0;
    for (int k = 1; k < ds.n_classes(); ++k) {
      if (out.scores(j, k) > out.scores(j, best)) best = k;
    }
    out.predictions[j] = best;
  }
  return out;
}

VoteResult majority_vote(const LabelDataset& ds) {
  return weighted_vote(ds, unit_weights(ds));
}

VoteResult ips_majority_vote(const LabelDataset& ds, const PropensityMatrix& e) {
  return weighted_vote(ds, ips_weights(ds, e));
}

}  // namespace biascrowd
