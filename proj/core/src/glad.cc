#include "biascrowd/glad.h"

#include <algorithm>
#include <cmath>

#include "biascrowd/majority.h"

#include "em_common.h"

namespace biascrowd {
namespace {

// ln sigma(x) without overflow.
double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double ex = std::exp(x);
  return ex / (1.0 + ex);
}

void check_params(const LabelDataset& ds, const GLADParams& params) {
  if (params.alpha.size() != ds.n_workers() || params.log_beta.size() != ds.n_tasks()) {
    throw DomainError("GLAD parameters do not match dataset dimensions");
  }
}

enum class Block { kAlpha, kLogBeta };

}  // namespace

double glad_label_logprob(int label, int truth, double alpha, double beta, int n_classes) {
  const double x = alpha * beta;
  if (label == truth) return log_sigmoid(x);
  return log_sigmoid(-x) - std::log(static_cast<double>(n_classes - 1));
}

LabelPosterior glad_e_step(const LabelDataset& ds, const GLADParams& params,
                           std::span<const double> weights) {
  detail::check_weights(ds, weights);
  check_params(ds, params);
  const int K = ds.n_classes();
  const double log_wrong = std::log(static_cast<double>(K - 1));
  Eigen::MatrixXd log_q = Eigen::MatrixXd::Zero(ds.n_tasks(), K);
  const auto labels = ds.labels();
  for (std::size_t l = 0; l < labels.size(); ++l) {
    if (weights[l] == 0.0) continue;
    const auto& o = labels[l];
    const double x = params.alpha(o.worker) * std::exp(params.log_beta(o.task));
    const double ls = log_sigmoid(x);
    const double right = weights[l] * ls;
    const double wrong = weights[l] * (ls - x - log_wrong);
    for (int k = 0; k < K; ++k) log_q(o.task, k) += (k == o.label) ? right : wrong;
  }
  return {detail::normalize_log_rows(std::move(log_q)),
          Eigen::VectorXd::Constant(K, 1.0 / K)};
}

double glad_expected_loglik(const LabelDataset& ds, const LabelPosterior& q,
                            const GLADParams& params, std::span<const double> weights) {
  const double log_wrong = std::log(static_cast<double>(ds.n_classes() - 1));
  double value = 0.0;
  const auto labels = ds.labels();
  for (std::size_t l = 0; l < labels.size(); ++l) {
    if (weights[l] == 0.0) continue;
    const auto& o = labels[l];
    const double x = params.alpha(o.worker) * std::exp(params.log_beta(o.task));
    const double q_right = q.q(o.task, o.label);
    const double ls = log_sigmoid(x);
    value += weights[l] * (q_right * ls + (1.0 - q_right) * (ls - x - log_wrong));
  }
  return value;
}

GLADGradient glad_gradient(const LabelDataset& ds, const LabelPosterior& q,
                           const GLADParams& params, std::span<const double> weights) {
  check_params(ds, params);
  GLADGradient g{Eigen::VectorXd::Zero(ds.n_workers()), Eigen::VectorXd::Zero(ds.n_tasks())};
  const auto labels = ds.labels();
  for (std::size_t l = 0; l < labels.size(); ++l) {
    if (weights[l] == 0.0) continue;
    const auto& o = labels[l];
    const double alpha = params.alpha(o.worker);
    const double beta = std::exp(params.log_beta(o.task));
    // d/dx of the expected term is w * (q(Z_j = L_ij) - sigma(x)).
    const double dx = weights[l] * (q.q(o.task, o.label) - sigmoid(alpha * beta));
    g.alpha(o.worker) += dx * beta;
    g.log_beta(o.task) += dx * alpha * beta;
  }
  return g;
}

GLADStepResult glad_m_step(const LabelDataset& ds, const LabelPosterior& q,
                           const GLADParams& params, std::span<const double> weights,
                           const GLADOptions& opts) {
  detail::check_weights(ds, weights);
  check_params(ds, params);
  GLADStepResult out{params, false};
  double f0 = glad_expected_loglik(ds, q, out.params, weights);
  // Each block's line search starts from twice its last accepted step,
  // capped at initial_step.
  double t_start[2] = {opts.initial_step, opts.initial_step};
  for (int step = 0; step < opts.max_steps; ++step) {
    const double f_sweep = f0;
    bool moved = false;
    for (const Block block : {Block::kAlpha, Block::kLogBeta}) {
      const GLADGradient grad = glad_gradient(ds, q, out.params, weights);
      const Eigen::VectorXd& g = block == Block::kAlpha ? grad.alpha : grad.log_beta;
      const double gnorm2 = g.squaredNorm();
      if (!(gnorm2 > 1e-20)) continue;
      double& t0 = t_start[block == Block::kAlpha ? 0 : 1];
      double t = t0;
      bool accepted = false;
      for (int bt = 0; bt <= opts.max_backtracks; ++bt, t *= opts.shrink) {
        GLADParams cand = out.params;
        (block == Block::kAlpha ? cand.alpha : cand.log_beta) += t * g;
        const double f1 = glad_expected_loglik(ds, q, cand, weights);
        if (f1 >= f0 + opts.armijo * t * gnorm2) {
          out.params = std::move(cand);
          f0 = f1;
          accepted = true;
          break;
        }
      }
      if (accepted) {
        moved = true;
        t0 = std::min(opts.initial_step, t / opts.shrink);
      } else {
        out.line_search_failed = true;
      }
    }
    if (!moved || f0 - f_sweep < opts.step_tol * (1.0 + std::abs(f0))) break;
  }
  return out;
}

double glad_objective(const LabelDataset& ds, const LabelPosterior& q,
                      const GLADParams& params, std::span<const double> weights) {
  const int K = ds.n_classes();
  return glad_expected_loglik(ds, q, params, weights) +
         detail::prior_entropy_term(q.q, Eigen::VectorXd::Constant(K, 1.0 / K));
}

GLADResult glad_run_weighted(const LabelDataset& ds, std::span<const double> weights,
                             const GLADOptions& opts) {
  detail::check_weights(ds, weights);
  GLADResult out;
  out.posterior = detail::vote_posterior(weighted_vote(ds, weights), ds.n_classes());
  out.params = {Eigen::VectorXd::Ones(ds.n_workers()), Eigen::VectorXd::Zero(ds.n_tasks())};

  auto m_step = [&] {
    auto step = glad_m_step(ds, out.posterior, out.params, weights, opts);
    out.params = std::move(step.params);
    out.line_search_failed = out.line_search_failed || step.line_search_failed;
  };

  m_step();
  double prev = glad_objective(ds, out.posterior, out.params, weights);
  out.trace.push_back(prev);
  for (int it = 1; it <= opts.em.max_iters; ++it) {
    out.posterior = glad_e_step(ds, out.params, weights);
    m_step();
    const double cur = glad_objective(ds, out.posterior, out.params, weights);
    out.trace.push_back(cur);
    out.iterations = it;
    if (cur - prev < opts.em.tol) {
      out.converged = true;
      break;
    }
    prev = cur;
  }
  return out;
}

GLADResult glad_run(const LabelDataset& ds, const PropensityMatrix* e,
                    const GLADOptions& opts) {
  return glad_run_weighted(ds, e ? ips_weights(ds, *e) : unit_weights(ds), opts);
}

}  // namespace biascrowd
