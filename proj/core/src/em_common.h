#pragma once

// Helpers shared by the D&S and GLAD EM engines.

#include <cmath>
#include <limits>
#include <span>

#include <Eigen/Dense>

#include "biascrowd/dataset.h"
#include "biascrowd/dawid_skene.h"
#include "biascrowd/majority.h"

namespace biascrowd::detail {

inline void check_weights(const LabelDataset& ds, std::span<const double> weights) {
  if (weights.size() != ds.n_labels()) throw DomainError("one weight per observation required");
  for (const double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw DomainError("weights must be finite and >= 0");
  }
}

// x * ln(y) with 0 * ln(0) = 0.
inline double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

// Row-wise softmax of log scores; rows entirely -inf are an error. Entries
// below 1e-250 are flushed to zero so later products cannot underflow into
// a zero probability paired with a nonzero weight.
inline Eigen::MatrixXd normalize_log_rows(Eigen::MatrixXd log_q) {
  for (Eigen::Index j = 0; j < log_q.rows(); ++j) {
    const double mx = log_q.row(j).maxCoeff();
    if (!std::isfinite(mx)) {
      throw DegeneratePosteriorError("every class has zero likelihood for task " +
                                     std::to_string(j));
    }
    log_q.row(j) = (log_q.row(j).array() - mx).exp();
    log_q.row(j) = (log_q.row(j).array() < 1e-250).select(0.0, log_q.row(j));
    log_q.row(j) /= log_q.row(j).sum();
  }
  return log_q;
}

// sum_j sum_k q_jk ln(p_k / q_jk)
inline double prior_entropy_term(const Eigen::MatrixXd& q, const Eigen::VectorXd& prior) {
  double value = 0.0;
  for (Eigen::Index j = 0; j < q.rows(); ++j) {
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
      const double qk = q(j, k);
      if (qk > 0.0) value += qk * (std::log(prior(k)) - std::log(qk));
    }
  }
  return value;
}

// Normalized vote scores; unlabeled tasks get a uniform row.
inline LabelPosterior vote_posterior(const VoteResult& votes, int n_classes) {
  LabelPosterior post;
  post.q = votes.scores;
  for (Eigen::Index j = 0; j < post.q.rows(); ++j) {
    const double s = post.q.row(j).sum();
    if (s > 0.0) {
      post.q.row(j) /= s;
    } else {
      post.q.row(j).setConstant(1.0 / n_classes);
    }
  }
  post.prior = Eigen::VectorXd::Constant(n_classes, 1.0 / n_classes);
  return post;
}

}  // namespace biascrowd::detail
