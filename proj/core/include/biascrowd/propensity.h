#pragma once

#include <vector>

#include <Eigen/Dense>

#include "biascrowd/dataset.h"

namespace biascrowd {

struct MCConfig {
  // Nuclear-norm radius is gamma * sqrt(n * m).
  double gamma = 1.0;
  double step_init = 4.0;
  int max_iters = 500;
  // Relative objective decrease below which the solver stops.
  double tol = 1e-7;
  double clip_floor = 0.01;
};

// Euclidean projection onto { X : ||X||_* <= radius }.
Eigen::MatrixXd nuclear_ball_project(const Eigen::MatrixXd& a, double radius);

// Projection of a nonnegative vector onto { x >= 0 : sum x <= radius }.
Eigen::VectorXd l1_ball_project_nonneg(const Eigen::VectorXd& v, double radius);

double nuclear_norm(const Eigen::MatrixXd& a);

// Bernoulli negative log-likelihood of O under sigma(A), summed over all cells.
double bernoulli_nll(const Eigen::MatrixXd& observed, const Eigen::MatrixXd& a);

struct MCFit {
  Eigen::MatrixXd a;
  // Objective at the start and after each accepted step.
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

// Projected gradient descent from A = 0 with backtracking.
MCFit fit_1bit_mc_raw(const Eigen::MatrixXd& observed, const MCConfig& cfg);

// clip(sigma(A), clip_floor, 1 - 1e-6) from a 1-bit matrix completion fit.
PropensityMatrix fit_1bit_mc(const Eigen::MatrixXd& observed, const MCConfig& cfg);

// Rank-1 independence estimate n_i * m_j / |labels|, clipped to
// [clip_floor, 1].
PropensityMatrix empirical_propensity(const Eigen::MatrixXd& observed,
                                      double clip_floor = 0.01);

}  // namespace biascrowd
