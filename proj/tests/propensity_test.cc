#include <gtest/gtest.h>

#include <cmath>

#include "biascrowd/propensity.h"
#include "test_util.h"

namespace biascrowd {
namespace {

Eigen::MatrixXd random_matrix(int n, int m, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd a(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = normal(rng);
  }
  return a;
}

TEST(L1BallProject, Waterfilling) {
  const auto p = l1_ball_project_nonneg(Eigen::Vector3d(3, 1, 0.5), 2.0);
  EXPECT_NEAR(p(0), 2.0, 1e-15);
  EXPECT_NEAR(p(1), 0.0, 1e-15);
  EXPECT_NEAR(p(2), 0.0, 1e-15);
  // Threshold 0.5: (2.5, 1.5, 0) sums to 4.
  const auto q = l1_ball_project_nonneg(Eigen::Vector3d(3, 2, 0.5), 4.0);
  EXPECT_NEAR(q(0), 2.5, 1e-15);
  EXPECT_NEAR(q(1), 1.5, 1e-15);
  EXPECT_NEAR(q(2), 0.0, 1e-15);
  EXPECT_THROW(l1_ball_project_nonneg(Eigen::Vector3d(1, 1, 1), 0.0), DomainError);
}

TEST(NuclearBallProject, DiagonalExamples) {
  const Eigen::MatrixXd a = Eigen::Vector2d(3, 1).asDiagonal();
  const Eigen::MatrixXd p = nuclear_ball_project(a, 2.0);
  EXPECT_NEAR(p(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(p(1, 1), 0.0, 1e-12);
  EXPECT_NEAR(p(0, 1), 0.0, 1e-12);
  EXPECT_TRUE(nuclear_ball_project(a, 4.0) == a);
  EXPECT_TRUE(nuclear_ball_project(a, 10.0) == a);
}

TEST(NuclearBallProject, FeasibleAndIdempotent) {
  Rng rng = make_rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + trial % 7;
    const int m = 2 + (trial * 3) % 11;
    const Eigen::MatrixXd a = random_matrix(n, m, rng, 2.0);
    const double radius = 0.1 + 0.2 * trial;
    const Eigen::MatrixXd p = nuclear_ball_project(a, radius);
    EXPECT_LE(nuclear_norm(p), radius + 1e-8);
    const Eigen::MatrixXd pp = nuclear_ball_project(p, radius);
    EXPECT_LT((pp - p).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(NuclearBallProject, CloserThanOtherFeasiblePoints) {
  Rng rng = make_rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd a = random_matrix(6, 9, rng, 2.0);
    const double radius = 3.0;
    const double best = (a - nuclear_ball_project(a, radius)).norm();
    for (int k = 0; k < 20; ++k) {
      Eigen::MatrixXd y = random_matrix(6, 9, rng);
      y *= radius / nuclear_norm(y) * 0.999;
      EXPECT_LE(best, (a - y).norm() + 1e-12);
    }
  }
}

TEST(Fit1BitMc, AllOnesSaturates) {
  const Eigen::MatrixXd o = Eigen::MatrixXd::Ones(8, 12);
  MCConfig cfg;
  cfg.gamma = 10.0;
  const auto e = fit_1bit_mc(o, cfg);
  EXPECT_GE(e.values().minCoeff(), 0.99);
}

TEST(Fit1BitMc, TinyGammaGivesOneHalf) {
  Rng rng = make_rng(3);
  std::bernoulli_distribution coin(0.3);
  Eigen::MatrixXd o(10, 15);
  for (Eigen::Index j = 0; j < o.cols(); ++j) {
    for (Eigen::Index i = 0; i < o.rows(); ++i) o(i, j) = coin(rng);
  }
  MCConfig cfg;
  cfg.gamma = 1e-9;
  const auto e = fit_1bit_mc(o, cfg);
  EXPECT_NEAR(e.values().minCoeff(), 0.5, 1e-6);
  EXPECT_NEAR(e.values().maxCoeff(), 0.5, 1e-6);
}

// Observation pattern drawn from p_ij = u_i * v_j.
Eigen::MatrixXd rank_one_probabilities(int n, int m, Rng& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95), v(0.2, 1.0);
  Eigen::VectorXd ru(n), cv(m);
  for (auto& x : ru) x = u(rng);
  for (auto& x : cv) x = v(rng);
  return ru * cv.transpose();
}

Eigen::MatrixXd draw(const Eigen::MatrixXd& p, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return p.unaryExpr([&](double x) { return unit(rng) < x ? 1.0 : 0.0; });
}

double log_loss(const Eigen::MatrixXd& o, const Eigen::MatrixXd& e) {
  double v = 0.0;
  for (Eigen::Index j = 0; j < o.cols(); ++j) {
    for (Eigen::Index i = 0; i < o.rows(); ++i) {
      v -= o(i, j) * std::log(e(i, j)) + (1 - o(i, j)) * std::log(1 - e(i, j));
    }
  }
  return v / static_cast<double>(o.size());
}

TEST(Fit1BitMc, BeatsColumnMeanOnHeldOutDraw) {
  Rng rng = make_rng(21);
  const Eigen::MatrixXd p = rank_one_probabilities(30, 40, rng);
  const Eigen::MatrixXd train = draw(p, rng);
  const Eigen::MatrixXd held_out = draw(p, rng);
  MCConfig cfg;
  cfg.gamma = 1.0;
  const auto e = fit_1bit_mc(train, cfg);
  Eigen::MatrixXd baseline(30, 40);
  for (int j = 0; j < 40; ++j) {
    const double mean = std::clamp(train.col(j).mean(), 0.01, 1.0 - 1e-6);
    baseline.col(j).setConstant(mean);
  }
  EXPECT_LT(log_loss(held_out, e.values()), log_loss(held_out, baseline));
}

TEST(Fit1BitMc, ObjectiveMonotoneAcrossStepsAndGamma) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng = make_rng(seed);
    const Eigen::MatrixXd o = draw(rank_one_probabilities(15, 25, rng), rng);
    double previous_gamma_obj = std::numeric_limits<double>::infinity();
    for (const double gamma : {0.1, 1.0, 10.0}) {
      MCConfig cfg;
      cfg.gamma = gamma;
      const auto fit = fit_1bit_mc_raw(o, cfg);
      for (std::size_t t = 1; t < fit.trace.size(); ++t) {
        ASSERT_LE(fit.trace[t], fit.trace[t - 1]);
      }
      EXPECT_LE(nuclear_norm(fit.a), gamma * std::sqrt(15.0 * 25.0) * (1 + 1e-9));
      EXPECT_LE(fit.trace.back(), previous_gamma_obj);
      previous_gamma_obj = fit.trace.back();
    }
  }
}

TEST(Fit1BitMc, OutputClipped) {
  Rng rng = make_rng(8);
  const Eigen::MatrixXd o = draw(rank_one_probabilities(10, 20, rng), rng);
  MCConfig cfg;
  cfg.gamma = 10.0;
  cfg.clip_floor = 0.05;
  const auto e = fit_1bit_mc(o, cfg);
  EXPECT_GE(e.values().minCoeff(), 0.05);
  EXPECT_LT(e.values().maxCoeff(), 1.0);
  cfg.clip_floor = 0.0;
  EXPECT_THROW(fit_1bit_mc(o, cfg), DomainError);
}

TEST(EmpiricalPropensity, Examples) {
  EXPECT_TRUE((empirical_propensity(Eigen::MatrixXd::Ones(3, 4)).values().array() == 1.0).all());

  Eigen::MatrixXd o(2, 2);
  o << 1, 1, 1, 0;
  // n_i = (2, 1), m_j = (2, 1), |labels| = 3.
  const auto e = empirical_propensity(o).values();
  EXPECT_NEAR(e(0, 0), 1.0, 1e-15);  // 4/3 clipped
  EXPECT_NEAR(e(0, 1), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(e(1, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(e(1, 1), 1.0 / 3.0, 1e-15);

  Eigen::MatrixXd single(1, 4);
  single << 1, 0, 1, 0;
  const auto s = empirical_propensity(single, 0.01).values();
  EXPECT_NEAR(s(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(s(0, 1), 0.01, 1e-15);

  EXPECT_THROW(empirical_propensity(Eigen::MatrixXd::Zero(2, 2)), DomainError);
}

TEST(EmpiricalPropensity, RowSumsMatchWorkerCounts) {
  Rng rng = make_rng(4);
  const Eigen::MatrixXd o = draw(Eigen::MatrixXd::Constant(6, 9, 0.3), rng);
  const auto e = empirical_propensity(o, 1e-9).values();
  if ((e.array() < 1.0).all()) {
    for (int i = 0; i < 6; ++i) {
      if (o.row(i).sum() > 0) EXPECT_NEAR(e.row(i).sum(), o.row(i).sum(), 1e-7);
    }
  }
}

}  // namespace
}  // namespace biascrowd
