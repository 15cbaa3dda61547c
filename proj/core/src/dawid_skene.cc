#include "biascrowd/dawid_skene.h"

#include <cmath>
#include <limits>

#include "biascrowd/majority.h"

#include "em_common.h"

namespace biascrowd {

LabelPosterior ds_e_step(const LabelDataset& ds, const DSParams& params,
                         std::span<const double> weights) {
  detail::check_weights(ds, weights);
  const int m = ds.n_tasks();
  const int K = ds.n_classes();
  if (static_cast<int>(params.confusions.size()) != ds.n_workers() ||
      params.prior.size() != K) {
    throw DomainError("D&S parameters do not match dataset dimensions");
  }

  Eigen::MatrixXd log_q(m, K);
  for (int k = 0; k < K; ++k) log_q.col(k).setConstant(std::log(params.prior(k)));
  const auto labels = ds.labels();
  for (std::size_t l = 0; l < labels.size(); ++l) {
    if (weights[l] == 0.0) continue;
    const auto& o = labels[l];
    const auto& pi = params.confusions[o.worker];
    for (int k = 0; k < K; ++k) log_q(o.task, k) += weights[l] * std::log(pi(k, o.label));
  }
  return {detail::normalize_log_rows(std::move(log_q)), params.prior};
}

DSParams ds_m_step(const LabelDataset& ds, const LabelPosterior& q,
                   std::span<const double> weights, double smoothing) {
  detail::check_weights(ds, weights);
  if (smoothing < 0.0) throw DomainError("smoothing must be nonnegative");
  const int K = ds.n_classes();
  DSParams params;
  params.confusions.assign(ds.n_workers(), Eigen::MatrixXd::Constant(K, K, smoothing));
  const auto labels = ds.labels();
  for (std::size_t l = 0; l < labels.size(); ++l) {
    const auto& o = labels[l];
    params.confusions[o.worker].col(o.label) += weights[l] * q.q.row(o.task).transpose();
  }
  for (auto& pi : params.confusions) {
    for (int k = 0; k < K; ++k) {
      const double s = pi.row(k).sum();
      if (s > 0.0) {
        pi.row(k) /= s;
      } else {
        pi.row(k).setConstant(1.0 / K);
      }
    }
  }
  if (ds.n_tasks() > 0) {
    params.prior = q.q.colwise().sum().transpose() / static_cast<double>(ds.n_tasks());
    params.prior /= params.prior.sum();
  } else {
    params.prior = Eigen::VectorXd::Constant(K, 1.0 / K);
  }
  return params;
}

double ds_objective(const LabelDataset& ds, const LabelPosterior& q,
                    const DSParams& params, std::span<const double> weights,
                    double smoothing) {
  const int K = ds.n_classes();
  double value = 0.0;
  const auto labels = ds.labels();
  for (std::size_t l = 0; l < labels.size(); ++l) {
    const auto& o = labels[l];
    const auto& pi = params.confusions[o.worker];
    for (int k = 0; k < K; ++k) {
      value += weights[l] * detail::xlogy(q.q(o.task, k), pi(k, o.label));
    }
  }
  value += detail::prior_entropy_term(q.q, params.prior);
  if (smoothing > 0.0) {
    for (const auto& pi : params.confusions) value += smoothing * pi.array().log().sum();
  }
  return value;
}

DSResult ds_run_weighted(const LabelDataset& ds, std::span<const double> weights,
                         const DSOptions& opts) {
  detail::check_weights(ds, weights);
  DSResult out;
  out.posterior = detail::vote_posterior(weighted_vote(ds, weights), ds.n_classes());
  out.params = ds_m_step(ds, out.posterior, weights, opts.smoothing);
  double prev = ds_objective(ds, out.posterior, out.params, weights, opts.smoothing);
  out.trace.push_back(prev);
  for (int it = 1; it <= opts.em.max_iters; ++it) {
    out.posterior = ds_e_step(ds, out.params, weights);
    out.params = ds_m_step(ds, out.posterior, weights, opts.smoothing);
    const double cur = ds_objective(ds, out.posterior, out.params, weights, opts.smoothing);
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

DSResult ds_run(const LabelDataset& ds, const PropensityMatrix* e, const DSOptions& opts) {
  return ds_run_weighted(ds, e ? ips_weights(ds, *e) : unit_weights(ds), opts);
}

}  // namespace biascrowd
