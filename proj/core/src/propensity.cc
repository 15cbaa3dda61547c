#include "biascrowd/propensity.h"

#include <algorithm>
#include <cmath>
#include <functional>

namespace biascrowd {
namespace {

double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double ex = std::exp(x);
  return ex / (1.0 + ex);
}

}  // namespace

Eigen::VectorXd l1_ball_project_nonneg(const Eigen::VectorXd& v, double radius) {
  if (!(radius > 0.0)) throw DomainError("projection radius must be positive");
  if (v.sum() <= radius) return v;
  std::vector<double> s(v.data(), v.data() + v.size());
  std::ranges::sort(s, std::greater<>());
  // Water level: largest rho with s_rho > (sum_{<=rho} s - radius) / rho.
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t r = 0; r < s.size(); ++r) {
    cumsum += s[r];
    const double candidate = (cumsum - radius) / static_cast<double>(r + 1);
    if (s[r] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0).matrix();
}

double nuclear_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues().sum();
}

Eigen::MatrixXd nuclear_ball_project(const Eigen::MatrixXd& a, double radius) {
  if (!(radius > 0.0)) throw DomainError("projection radius must be positive");
  if (a.size() == 0) return a;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw std::runtime_error("SVD failed in nuclear-ball projection");
  const Eigen::VectorXd& sigma = svd.singularValues();
  if (sigma.sum() <= radius) return a;
  const Eigen::VectorXd shrunk = l1_ball_project_nonneg(sigma, radius);
  return svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
}

double bernoulli_nll(const Eigen::MatrixXd& observed, const Eigen::MatrixXd& a) {
  double value = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double o = observed(i, j);
      const double x = a(i, j);
      value -= o * log_sigmoid(x) + (1.0 - o) * log_sigmoid(-x);
    }
  }
  return value;
}

MCFit fit_1bit_mc_raw(const Eigen::MatrixXd& observed, const MCConfig& cfg) {
  if (!(cfg.gamma > 0.0)) throw DomainError("gamma must be positive");
  if (!(cfg.step_init > 0.0)) throw DomainError("step_init must be positive");
  if (observed.size() == 0) throw DomainError("observation matrix is empty");
  const double radius =
      cfg.gamma * std::sqrt(static_cast<double>(observed.rows()) * observed.cols());

  MCFit fit;
  fit.a = Eigen::MatrixXd::Zero(observed.rows(), observed.cols());
  double f = bernoulli_nll(observed, fit.a);
  fit.trace.push_back(f);
  double step = cfg.step_init;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const Eigen::MatrixXd grad = fit.a.unaryExpr(&sigmoid) - observed;
    bool accepted = false;
    Eigen::MatrixXd next;
    double f_next = f;
    for (int bt = 0; bt < 60; ++bt) {
      next = nuclear_ball_project(fit.a - step * grad, radius);
      const Eigen::MatrixXd d = next - fit.a;
      f_next = bernoulli_nll(observed, next);
      // Sufficient decrease for projected gradient with step `step`.
      if (f_next <= f + (grad.array() * d.array()).sum() + d.squaredNorm() / (2.0 * step) &&
          f_next <= f) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    fit.iterations = it;
    if (!accepted) {
      fit.converged = true;
      break;
    }
    const double decrease = f - f_next;
    fit.a = std::move(next);
    f = f_next;
    fit.trace.push_back(f);
    if (decrease < cfg.tol * std::max(1.0, std::abs(f))) {
      fit.converged = true;
      break;
    }
    step = std::min(2.0 * step, 64.0 * cfg.step_init);
  }
  return fit;
}

PropensityMatrix fit_1bit_mc(const Eigen::MatrixXd& observed, const MCConfig& cfg) {
  if (!(cfg.clip_floor > 0.0 && cfg.clip_floor < 0.5)) {
    throw DomainError("clip_floor must lie in (0, 0.5)");
  }
  const MCFit fit = fit_1bit_mc_raw(observed, cfg);
  const double hi = 1.0 - 1e-6;
  return PropensityMatrix(
      fit.a.unaryExpr([&](double x) { return std::clamp(sigmoid(x), cfg.clip_floor, hi); }));
}

PropensityMatrix empirical_propensity(const Eigen::MatrixXd& observed, double clip_floor) {
  if (!(clip_floor > 0.0 && clip_floor <= 1.0)) throw DomainError("clip_floor must lie in (0, 1]");
  const double total = observed.sum();
  if (!(total > 0.0)) throw DomainError("empirical propensity needs at least one label");
  const Eigen::VectorXd per_worker = observed.rowwise().sum();
  const Eigen::RowVectorXd per_task = observed.colwise().sum();
  Eigen::MatrixXd e = (per_worker * per_task) / total;
  return PropensityMatrix(e.cwiseMax(clip_floor).cwiseMin(1.0));
}

}  // namespace biascrowd
