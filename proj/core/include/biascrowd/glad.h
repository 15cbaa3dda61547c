#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "biascrowd/dataset.h"
#include "biascrowd/dawid_skene.h"

namespace biascrowd {

// Worker ability alpha_i and task log-sharpness b_j (beta_j = exp(b_j);
// 1 / beta_j is the task difficulty).
struct GLADParams {
  Eigen::VectorXd alpha;
  Eigen::VectorXd log_beta;
};

struct GLADOptions {
  EmOptions em;
  // Gradient-ascent iterations per M-step.
  int max_steps = 25;
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  // Halvings tried before a line search is declared failed.
  int max_backtracks = 40;
  // An M-step ends early once one sweep gains less than
  // step_tol * (1 + |objective|).
  double step_tol = 1e-10;
};

// ln p(l | z, alpha, beta) for the GLAD model.
double glad_label_logprob(int label, int truth, double alpha, double beta,
                          int n_classes);

// Uniform prior; q(Z_j = k) proportional to exp(sum_i w_ij ln p(L_ij | k)).
LabelPosterior glad_e_step(const LabelDataset& ds, const GLADParams& params,
                           std::span<const double> weights);

// Expected complete-data log-likelihood
//   sum_obs w_ij sum_k q_jk ln p(L_ij | k, alpha_i, beta_j).
double glad_expected_loglik(const LabelDataset& ds, const LabelPosterior& q,
                            const GLADParams& params,
                            std::span<const double> weights);

struct GLADGradient {
  Eigen::VectorXd alpha;
  Eigen::VectorXd log_beta;
};

GLADGradient glad_gradient(const LabelDataset& ds, const LabelPosterior& q,
                           const GLADParams& params,
                           std::span<const double> weights);

struct GLADStepResult {
  GLADParams params;
  // Some line search failed to find an ascent step; that block kept its
  // previous values.
  bool line_search_failed = false;
};

// Block gradient ascent (alpha, then b) with Armijo backtracking; never
// decreases glad_expected_loglik.
GLADStepResult glad_m_step(const LabelDataset& ds, const LabelPosterior& q,
                           const GLADParams& params,
                           std::span<const double> weights,
                           const GLADOptions& opts = {});

// glad_expected_loglik plus the entropy/prior term under the uniform prior.
double glad_objective(const LabelDataset& ds, const LabelPosterior& q,
                      const GLADParams& params, std::span<const double> weights);

struct GLADResult {
  LabelPosterior posterior;
  GLADParams params;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;

  std::vector<int> predictions() const { return posterior.predictions(); }
};

GLADResult glad_run(const LabelDataset& ds, const PropensityMatrix* e,
                    const GLADOptions& opts = {});

GLADResult glad_run_weighted(const LabelDataset& ds,
                             std::span<const double> weights,
                             const GLADOptions& opts = {});

}  // namespace biascrowd
