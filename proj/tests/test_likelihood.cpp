#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pennmm/errors.hpp"
#include "pennmm/likelihood.hpp"

using namespace pennmm;

namespace {

Eigen::MatrixXd random_design(std::mt19937_64& gen, Eigen::Index n, Eigen::Index d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = normal(gen);
  return x;
}

LikelihoodModel random_model(std::mt19937_64& gen, Family family, Eigen::Index n,
                             Eigen::Index d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Dataset data;
  data.design = random_design(gen, n, d);
  Eigen::VectorXd beta(d);
  for (Eigen::Index j = 0; j < d; ++j) beta[j] = 0.8 * normal(gen);
  const Eigen::VectorXd eta = data.design * beta;
  data.response.resize(n);
  switch (family) {
    case Family::Linear:
      for (Eigen::Index i = 0; i < n; ++i) data.response[i] = eta[i] + normal(gen);
      break;
    case Family::Logistic:
      for (Eigen::Index i = 0; i < n; ++i)
        data.response[i] = unif(gen) < 1.0 / (1.0 + std::exp(-eta[i])) ? 1.0 : 0.0;
      break;
    case Family::Poisson:
      for (Eigen::Index i = 0; i < n; ++i) {
        const double mu = std::exp(0.5 * eta[i]);
        // crude Poisson draw, adequate for oracle checks
        double u = unif(gen), p = std::exp(-mu), acc = p;
        int k = 0;
        while (u > acc && k < 1000) {
          ++k;
          p *= mu / k;
          acc += p;
        }
        data.response[i] = k;
      }
      break;
    case Family::Cox: {
      data.status = Eigen::VectorXd(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double t = -std::log(1.0 - unif(gen)) * std::exp(-eta[i]);
        const double c = -std::log(1.0 - unif(gen)) * 2.0;
        data.response[i] = std::min(t, c);
        (*data.status)[i] = t <= c ? 1.0 : 0.0;
      }
      break;
    }
  }
  return LikelihoodModel(family, std::move(data));
}

}  // namespace

TEST_CASE("dataset validation") {
  Dataset d;
  d.design = Eigen::MatrixXd::Ones(4, 2);
  d.response = Eigen::VectorXd::Ones(4);
  CHECK_THROWS_AS(LikelihoodModel(Family::Cox, d), InvalidSpecError);
  d.status = Eigen::VectorXd::Ones(4);
  CHECK_THROWS_AS(LikelihoodModel(Family::Linear, d), InvalidSpecError);
  (*d.status)[0] = 0.5;
  CHECK_THROWS_AS(LikelihoodModel(Family::Cox, d), InvalidSpecError);
  (*d.status)[0] = 0.0;
  CHECK_NOTHROW(LikelihoodModel(Family::Cox, d));
  d.response[1] = -1.0;
  CHECK_THROWS_AS(LikelihoodModel(Family::Cox, d), InvalidSpecError);
}

TEST_CASE("logistic loglik at zero") {
  std::mt19937_64 gen = oracle::rng(31);
  auto model = random_model(gen, Family::Logistic, 200, 5);
  CHECK(model.loglik(Eigen::VectorXd::Zero(5)) ==
        doctest::Approx(-200.0 * std::log(2.0)).epsilon(1e-12));
  // score at zero: X' (y - 1/2)
  const Eigen::VectorXd expect =
      model.data().design.transpose() *
      (model.data().response.array() - 0.5).matrix();
  CHECK((model.score(Eigen::VectorXd::Zero(5)) - expect).cwiseAbs().maxCoeff() < 1e-10);
  // curvature at zero: -X'X/4
  const Eigen::MatrixXd h0 = model.curvature(Eigen::VectorXd::Zero(5));
  const Eigen::MatrixXd expect_h =
      -0.25 * model.data().design.transpose() * model.data().design;
  CHECK((h0 - expect_h).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("cox single failure with risk set of size m") {
  const int n = 7;
  Dataset d;
  d.design = Eigen::MatrixXd::Zero(n, 2);
  d.design.setRandom();
  d.response = Eigen::VectorXd::LinSpaced(n, 1.0, 7.0);
  d.status = Eigen::VectorXd::Zero(n);
  (*d.status)[2] = 1.0;  // time 3; risk set {3,4,...,7} has m = 5 members
  LikelihoodModel model(Family::Cox, d);
  CHECK(model.loglik(Eigen::VectorXd::Zero(2)) ==
        doctest::Approx(-std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("linear loglik maximal at OLS, score zero there") {
  std::mt19937_64 gen = oracle::rng(32);
  auto model = random_model(gen, Family::Linear, 60, 4);
  const auto& x = model.data().design;
  const Eigen::VectorXd ols =
      (x.transpose() * x).ldlt().solve(x.transpose() * model.data().response);
  CHECK(model.score(ols).cwiseAbs().maxCoeff() < 1e-9);
  const double top = model.loglik(ols);
  std::normal_distribution<double> normal(0.0, 0.3);
  for (int k = 0; k < 10; ++k) {
    Eigen::VectorXd pert = ols;
    for (Eigen::Index j = 0; j < 4; ++j) pert[j] += normal(gen);
    CHECK(model.loglik(pert) < top);
  }
}

TEST_CASE("score and curvature agree with finite differences (all families)") {
  std::mt19937_64 gen = oracle::rng(33);
  for (Family family :
       {Family::Linear, Family::Logistic, Family::Poisson, Family::Cox}) {
    for (int rep = 0; rep < 25; ++rep) {
      auto model = random_model(gen, family, 40, 3);
      std::normal_distribution<double> normal(0.0, 0.5);
      Eigen::VectorXd beta(3);
      for (Eigen::Index j = 0; j < 3; ++j) beta[j] = normal(gen);

      const Eigen::VectorXd g = model.score(beta);
      const Eigen::VectorXd g_fd = oracle::fd_gradient(
          [&](const Eigen::VectorXd& b) { return model.loglik(b); }, beta);
      const double gscale = std::max(1.0, g.cwiseAbs().maxCoeff());
      CHECK((g - g_fd).cwiseAbs().maxCoeff() / gscale < 1e-6);

      const Eigen::MatrixXd h = model.curvature(beta);
      const Eigen::MatrixXd h_fd = oracle::fd_jacobian(
          [&](const Eigen::VectorXd& b) { return model.score(b); }, beta);
      const double hscale = std::max(1.0, h.cwiseAbs().maxCoeff());
      CHECK((h - h_fd).cwiseAbs().maxCoeff() / hscale < 1e-5);
    }
  }
}

TEST_CASE("curvature is negative definite for full-rank designs") {
  std::mt19937_64 gen = oracle::rng(34);
  std::normal_distribution<double> normal(0.0, 0.4);
  for (Family family :
       {Family::Linear, Family::Logistic, Family::Poisson, Family::Cox}) {
    auto model = random_model(gen, family, 50, 4);
    Eigen::VectorXd beta(4);
    for (Eigen::Index j = 0; j < 4; ++j) beta[j] = normal(gen);
    const Eigen::MatrixXd h = model.curvature(beta);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    for (int k = 0; k < 10; ++k) {
      Eigen::VectorXd v(4);
      for (Eigen::Index j = 0; j < 4; ++j) v[j] = normal(gen);
      if (v.norm() < 1e-8) continue;
      CHECK(v.dot(h * v) < 0.0);
    }
  }
}

TEST_CASE("per-observation scores sum to the score") {
  std::mt19937_64 gen = oracle::rng(35);
  std::normal_distribution<double> normal(0.0, 0.4);
  for (Family family :
       {Family::Linear, Family::Logistic, Family::Poisson, Family::Cox}) {
    auto model = random_model(gen, family, 45, 3);
    Eigen::VectorXd beta(3);
    for (Eigen::Index j = 0; j < 3; ++j) beta[j] = normal(gen);
    const Eigen::VectorXd g = model.score(beta);
    const Eigen::MatrixXd rows = model.per_observation_scores(beta);
    CHECK((rows.colwise().sum().transpose() - g).norm() <=
          1e-10 * std::max(1.0, g.norm()));
  }

  // linear rows are x_i (y_i - x_i' beta)
  auto model = random_model(gen, Family::Linear, 20, 3);
  Eigen::VectorXd beta(3);
  beta << 0.2, -1.0, 0.5;
  const Eigen::MatrixXd rows = model.per_observation_scores(beta);
  for (Eigen::Index i = 0; i < 20; ++i) {
    const double r = model.data().response[i] - model.data().design.row(i).dot(beta);
    CHECK((rows.row(i) - r * model.data().design.row(i)).cwiseAbs().maxCoeff() < 1e-12);
  }

  // n = 1: the single row is the score
  Dataset single;
  single.design = Eigen::MatrixXd::Constant(1, 2, 1.5);
  single.response = Eigen::VectorXd::Constant(1, 2.0);
  LikelihoodModel one(Family::Linear, single);
  Eigen::VectorXd b2 = Eigen::VectorXd::Zero(2);
  CHECK((one.per_observation_scores(b2).row(0).transpose() - one.score(b2)).norm() == 0.0);
}

TEST_CASE("cox partial likelihood invariant to time shifts") {
  std::mt19937_64 gen = oracle::rng(36);
  auto model = random_model(gen, Family::Cox, 40, 3);
  Dataset shifted = model.data();
  shifted.response.array() += 5.0;
  LikelihoodModel model2(Family::Cox, shifted);
  Eigen::VectorXd beta(3);
  beta << 0.4, -0.2, 0.7;
  CHECK(model.loglik(beta) == doctest::Approx(model2.loglik(beta)).epsilon(1e-14));
  CHECK((model.score(beta) - model2.score(beta)).norm() < 1e-12);
}

TEST_CASE("moving against the score decreases the log-likelihood") {
  std::mt19937_64 gen = oracle::rng(37);
  for (Family family : {Family::Logistic, Family::Poisson}) {
    auto model = random_model(gen, family, 60, 4);
    Eigen::VectorXd beta = Eigen::VectorXd::Constant(4, 0.3);
    const Eigen::VectorXd g = model.score(beta);
    REQUIRE(g.norm() > 1e-6);
    const double base = model.loglik(beta);
    CHECK(model.loglik(beta - 1e-4 * g / g.norm()) < base);
  }
}

TEST_CASE("poisson loglik overflow carries the offending predictor") {
  Dataset d;
  d.design = Eigen::MatrixXd::Constant(3, 1, 1.0);
  d.response = Eigen::VectorXd::Constant(3, 2.0);
  LikelihoodModel model(Family::Poisson, d);
  Eigen::VectorXd wild(1);
  wild << 800.0;
  CHECK_THROWS_AS(model.loglik(wild), LoglikOverflowError);
  try {
    model.loglik(wild);
  } catch (const LoglikOverflowError& e) {
    CHECK(e.predictor == doctest::Approx(800.0));
  }
  // mean evaluation clamps instead of overflowing
  CHECK(std::isfinite(model.score(wild).cwiseAbs().maxCoeff()));
  CHECK(model.clamp_events() > 0);
}

TEST_CASE("spline basis") {
  std::mt19937_64 gen = oracle::rng(38);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd t(60);
  for (Eigen::Index i = 0; i < 60; ++i) t[i] = 3.0 * normal(gen) + 10.0;
  const Eigen::MatrixXd basis = spline_basis(t);
  CHECK(basis.cols() == 9);
  CHECK((basis.col(0).array() == 1.0).all());

  // standardized column has mean 0, sd 1
  CHECK(std::abs(basis.col(1).mean()) < 1e-12);

  // rows below the first knot have zero truncated terms
  const Eigen::VectorXd z = basis.col(1);
  Eigen::Index lowest;
  z.minCoeff(&lowest);
  for (int j = 4; j < 9; ++j) CHECK(basis(lowest, j) == 0.0);

  // truncated power is exactly zero at its own knot
  std::vector<double> sorted(z.data(), z.data() + z.size());
  std::sort(sorted.begin(), sorted.end());
  Eigen::VectorXd t2(60);
  for (Eigen::Index i = 0; i < 60; ++i) t2[i] = t[i];
  // place one observation exactly at the median so the knot coincides with it
  const Eigen::MatrixXd b2 = spline_basis(t2, {0.5});
  Eigen::Index mid = -1;
  double knot = 0.0;
  for (Eigen::Index i = 0; i < 60; ++i)
    if (b2(i, 4) == 0.0 && b2(i, 1) >= knot) {
      knot = b2(i, 1);
      mid = i;
    }
  CHECK(mid >= 0);

  CHECK_THROWS_AS(spline_basis(Eigen::VectorXd::Ones(20)), DomainError);
  Eigen::VectorXd tiny(5);
  tiny << 1, 2, 3, 4, 5;
  CHECK_THROWS_AS(spline_basis(tiny), DomainError);

  // heavy ties make quantiles collide
  Eigen::VectorXd tied(20);
  tied.setZero();
  tied[0] = 1.0;
  CHECK_THROWS_AS(spline_basis(tied), DomainError);
}
