#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "biascrowd/dataset.h"

namespace biascrowd {

// Outer EM loop controls shared by Dawid-Skene and GLAD.
struct EmOptions {
  int max_iters = 100;
  // Stop when the objective increases by less than this (absolute).
  double tol = 1e-6;
};

// Every step of a posterior computation produced -inf for all classes.
class DegeneratePosteriorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DSParams {
  // One K x K row-stochastic matrix per worker: row = true class,
  // column = given label.
  std::vector<Eigen::MatrixXd> confusions;
  Eigen::VectorXd prior;
};

struct DSOptions {
  EmOptions em;
  // Pseudo-count added to every confusion cell in the M-step.
  double smoothing = 0.01;
};

// q(Z_j = k) proportional to p(k) * prod_i pi^(i)_{k, L_ij}^{w_ij}, in log space.
LabelPosterior ds_e_step(const LabelDataset& ds, const DSParams& params,
                         std::span<const double> weights);

// Weighted confusion counts plus smoothing, row-normalized. The prior is the
// unweighted mean of q.
DSParams ds_m_step(const LabelDataset& ds, const LabelPosterior& q,
                   std::span<const double> weights, double smoothing);

// Weighted lower bound
//   sum_obs w_ij sum_k q_jk ln pi^(i)_{k,L_ij} + sum_j sum_k q_jk ln(p_k / q_jk)
// plus the smoothing term  smoothing * sum_i sum_{k,k'} ln pi^(i)_{kk'}  that
// the smoothed M-step maximizes. With smoothing = 0 this is exactly the bound.
double ds_objective(const LabelDataset& ds, const LabelPosterior& q,
                    const DSParams& params, std::span<const double> weights,
                    double smoothing);

struct DSResult {
  LabelPosterior posterior;
  DSParams params;
  // Objective after every M-step.
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;

  std::vector<int> predictions() const { return posterior.predictions(); }
};

// Plain D&S when `e` is empty, IPS-D&S with w_ij = 1 / e_ij otherwise.
DSResult ds_run(const LabelDataset& ds, const PropensityMatrix* e,
                const DSOptions& opts = {});

// Same loop with explicit observation weights.
DSResult ds_run_weighted(const LabelDataset& ds, std::span<const double> weights,
                         const DSOptions& opts = {});

}  // namespace biascrowd
