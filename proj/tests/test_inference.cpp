#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pennmm/inference.hpp"

using namespace pennmm;

namespace {

LikelihoodModel linear_model(std::mt19937_64& gen, Eigen::Index n,
                             const Eigen::VectorXd& beta, double sigma) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data;
  data.design.resize(n, beta.size());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < beta.size(); ++j) data.design(i, j) = normal(gen);
  data.response = data.design * beta;
  for (Eigen::Index i = 0; i < n; ++i) data.response[i] += sigma * normal(gen);
  return LikelihoodModel(Family::Linear, std::move(data));
}

LikelihoodModel logistic_model(std::mt19937_64& gen, Eigen::Index n,
                               const Eigen::VectorXd& beta) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Dataset data;
  data.design.resize(n, beta.size());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < beta.size(); ++j) data.design(i, j) = normal(gen);
  const Eigen::VectorXd eta = data.design * beta;
  data.response.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    data.response[i] = unif(gen) < 1.0 / (1.0 + std::exp(-eta[i])) ? 1.0 : 0.0;
  return LikelihoodModel(Family::Logistic, std::move(data));
}

// direct textbook computation of the robust sandwich at the OLS solution
Eigen::MatrixXd hand_rolled_hc(const LikelihoodModel& model, const Eigen::VectorXd& beta) {
  const auto& x = model.data().design;
  const Eigen::VectorXd r = model.data().response - x * beta;
  const auto n = static_cast<double>(model.n());
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Eigen::VectorXd gi = r[i] * x.row(i).transpose();
    meat += gi * gi.transpose();
    mean += gi;
  }
  mean /= n;
  meat -= n * mean * mean.transpose();
  const Eigen::MatrixXd inv = (x.transpose() * x).inverse();
  return inv * meat * inv;
}

}  // namespace

TEST_CASE("lambda = 0 linear: reduces to the robust sandwich") {
  std::mt19937_64 gen = oracle::rng(61);
  Eigen::VectorXd beta_true(3);
  beta_true << 1.0, -2.0, 0.5;
  auto model = linear_model(gen, 80, beta_true, 1.3);
  const auto fr = fit(model, PenaltySpec::l1(0.0));
  REQUIRE(fr.status == FitStatus::Converged);

  const auto rep = sandwich_cov(model, PenaltySpec::l1(0.0), fr);
  const Eigen::MatrixXd expect = hand_rolled_hc(model, fr.beta_hat);
  CHECK((rep.cov - expect).cwiseAbs().maxCoeff() <
        1e-10 * std::max(1.0, expect.cwiseAbs().maxCoeff()));
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(rep.available[static_cast<std::size_t>(j)]);
    CHECK(rep.se[j] == doctest::Approx(std::sqrt(expect(j, j))).epsilon(1e-10));
  }
  // same diagonal under a different penalty kind at lambda = 0
  const auto rep2 = sandwich_cov(model, PenaltySpec::scad(0.0), fr);
  CHECK((rep.se - rep2.se).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("d = 1, n = 2: every quantity by hand") {
  Dataset d;
  d.design.resize(2, 1);
  d.design << 1.0, 2.0;
  d.response.resize(2);
  d.response << 1.0, 1.0;
  LikelihoodModel model(Family::Linear, d);
  const auto fr = fit(model, PenaltySpec::l1(0.0));
  REQUIRE(fr.status == FitStatus::Converged);
  CHECK(fr.beta_hat[0] == doctest::Approx(0.6).epsilon(1e-12));

  // residuals (0.4, -0.2); scores (0.4, -0.4); mean 0; meat 0.32; bread 5
  const auto rep = sandwich_cov(model, PenaltySpec::l1(0.0), fr);
  CHECK(rep.cov(0, 0) == doctest::Approx(0.32 / 25.0).epsilon(1e-12));
  CHECK(rep.se[0] == doctest::Approx(std::sqrt(0.0128)).epsilon(1e-12));
  // sigma2_hat = RSS / (n - 1) = 0.2
  CHECK(rep.sigma2_hat == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("meat forms with and without the E beta shift agree") {
  std::mt19937_64 gen = oracle::rng(62);
  Eigen::VectorXd beta_true(4);
  beta_true << 2.0, 0.0, 1.0, 0.0;
  auto model = logistic_model(gen, 150, beta_true);
  const auto spec = PenaltySpec::scad(0.15);
  const auto fr = fit(model, spec, std::nullopt, FitConfig());
  REQUIRE(fr.status == FitStatus::Converged);

  const auto fitted = spec.with_epsilon(fr.epsilon);
  const Eigen::MatrixXd scores = model.per_observation_scores(fr.beta_hat);
  const auto n = static_cast<double>(model.n());

  Eigen::VectorXd shift = Eigen::VectorXd::Zero(4);  // n E beta
  for (Eigen::Index j = 0; j < 4; ++j) {
    const double b = std::abs(fr.beta_hat[j]);
    const double deriv = derivative_plus(fitted, b);
    if (deriv != 0.0) shift[j] = n * fr.beta_hat[j] * deriv / (fr.epsilon + b);
  }

  auto centered_cov = [&](const Eigen::VectorXd& offset) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(4, 4);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
    for (Eigen::Index i = 0; i < model.n(); ++i) {
      const Eigen::VectorXd gi = scores.row(i).transpose() - offset;
      acc += gi * gi.transpose();
      mean += gi;
    }
    mean /= n;
    return Eigen::MatrixXd(acc / n - mean * mean.transpose());
  };

  const Eigen::MatrixXd with_shift = centered_cov(shift);
  const Eigen::MatrixXd without = centered_cov(Eigen::VectorXd::Zero(4));
  CHECK((with_shift - without).cwiseAbs().maxCoeff() <
        1e-10 * std::max(1.0, without.cwiseAbs().maxCoeff()));
}

TEST_CASE("symmetry and positive semidefiniteness of the active block") {
  std::mt19937_64 gen = oracle::rng(63);
  Eigen::VectorXd beta_true(5);
  beta_true << 2.0, 0.0, 1.2, 0.0, -0.8;
  auto model = logistic_model(gen, 200, beta_true);
  const auto spec = PenaltySpec::scad(0.12);
  const auto fr = fit(model, spec, std::nullopt, FitConfig());
  REQUIRE(fr.status == FitStatus::Converged);
  const auto rep = sandwich_cov(model, spec, fr);

  CHECK((rep.cov - rep.cov.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rep.cov);
  const double scale = std::max(1.0, rep.cov.cwiseAbs().maxCoeff());
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * scale);
  for (Eigen::Index j = 0; j < 5; ++j)
    if (rep.available[static_cast<std::size_t>(j)])
      CHECK(rep.se[j] == doctest::Approx(std::sqrt(rep.cov(j, j))).epsilon(1e-12));
}

TEST_CASE("zeroed coordinates: tiny SE when perturbed, NA when unperturbed") {
  std::mt19937_64 gen = oracle::rng(64);
  Eigen::VectorXd beta_true(4);
  beta_true << 2.5, 0.0, 1.5, 0.0;
  auto model = logistic_model(gen, 250, beta_true);
  const auto spec = PenaltySpec::scad(0.2);

  const auto fr = fit(model, spec, std::nullopt, FitConfig());
  REQUIRE(fr.status == FitStatus::Converged);
  const auto rep = sandwich_cov(model, spec, fr);
  bool saw_zeroed = false;
  for (Eigen::Index j = 0; j < 4; ++j) {
    if (fr.active[static_cast<std::size_t>(j)]) continue;
    saw_zeroed = true;
    CHECK(rep.available[static_cast<std::size_t>(j)]);  // huge finite bread entry
    CHECK(rep.se[j] < 1e-4);
    CHECK(rep.se[j] > 0.0);
  }
  CHECK(saw_zeroed);

  FitConfig lqa;
  lqa.lqa_drop = true;
  const auto fr2 = fit(model, spec, std::nullopt, lqa);
  const auto rep2 = sandwich_cov(model, spec, fr2);
  for (Eigen::Index j = 0; j < 4; ++j) {
    if (fr2.active[static_cast<std::size_t>(j)]) continue;
    CHECK_FALSE(rep2.available[static_cast<std::size_t>(j)]);  // NA-style
    CHECK(rep2.se[j] == 0.0);
  }
}
