#include "pennmm/inference.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace pennmm {

CovarianceReport sandwich_cov(const LikelihoodModel& model, const PenaltySpec& spec_in,
                              const FitResult& fit) {
  const Eigen::Index d = model.d();
  const auto n = static_cast<double>(model.n());
  const PenaltySpec spec = spec_in.with_epsilon(fit.epsilon);
  const Eigen::VectorXd& beta = fit.beta_hat;

  CovarianceReport rep;
  rep.cov = Eigen::MatrixXd::Zero(d, d);
  rep.se = Eigen::VectorXd::Zero(d);
  rep.available.assign(static_cast<std::size_t>(d), false);

  // Penalty curvature diagonal at the estimate; infinite entries (zeroed
  // coordinate, epsilon = 0) make that coordinate unavailable.
  Eigen::VectorXd ek(d);
  std::vector<Eigen::Index> usable;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double b = std::abs(beta[j]);
    const double deriv = derivative_plus(spec, b);
    const double denom = fit.epsilon + b;
    if (deriv == 0.0)
      ek[j] = 0.0;
    else if (denom == 0.0)
      ek[j] = std::numeric_limits<double>::infinity();
    else
      ek[j] = deriv / denom;
    if (std::isfinite(ek[j])) usable.push_back(j);
  }

  if (model.family() == Family::Linear) {
    const Eigen::VectorXd r =
        model.data().response - model.data().design * beta;
    Eigen::Index n_active = 0;
    for (bool a : fit.active) n_active += a;
    const auto dof = static_cast<double>(std::max<Eigen::Index>(model.n() - n_active, 1));
    rep.sigma2_hat = r.squaredNorm() / dof;
  }

  if (usable.empty()) return rep;

  const Eigen::MatrixXd hess = model.curvature(beta);
  const Eigen::MatrixXd scores = model.per_observation_scores(beta);
  const Eigen::VectorXd mean_score = scores.colwise().mean();

  const auto m = static_cast<Eigen::Index>(usable.size());
  Eigen::MatrixXd bread(m, m);
  Eigen::MatrixXd meat(m, m);
  for (Eigen::Index p = 0; p < m; ++p) {
    for (Eigen::Index qx = 0; qx < m; ++qx) {
      const Eigen::Index jp = usable[static_cast<std::size_t>(p)];
      const Eigen::Index jq = usable[static_cast<std::size_t>(qx)];
      bread(p, qx) = -hess(jp, jq);
      meat(p, qx) = scores.col(jp).dot(scores.col(jq)) -
                    n * mean_score[jp] * mean_score[jq];
    }
  }
  for (Eigen::Index p = 0; p < m; ++p)
    bread(p, p) += n * ek[usable[static_cast<std::size_t>(p)]];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(bread);
  const Eigen::VectorXd evals = eig.eigenvalues();
  const double emax = evals.cwiseAbs().maxCoeff();
  const double cutoff = emax * 1e-13;
  rep.bread_condition =
      evals.minCoeff() > 0.0 ? emax / evals.minCoeff()
                             : std::numeric_limits<double>::infinity();

  // pseudo-inverse on the well-conditioned eigenspace
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i)
    if (std::abs(evals[i]) > cutoff) inv[i] = 1.0 / evals[i];
  const Eigen::MatrixXd bread_inv =
      eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();

  // cov = B^{-1} V B^{-1} with B = hess - nE = -bread
  const Eigen::MatrixXd cov_block = bread_inv * meat * bread_inv;

  for (Eigen::Index p = 0; p < m; ++p) {
    const Eigen::Index jp = usable[static_cast<std::size_t>(p)];
    const double var = cov_block(p, p);
    if (!std::isfinite(var) || var < 0.0) continue;
    rep.available[static_cast<std::size_t>(jp)] = true;
    rep.se[jp] = std::sqrt(var);
    for (Eigen::Index qx = 0; qx < m; ++qx)
      rep.cov(jp, usable[static_cast<std::size_t>(qx)]) = cov_block(p, qx);
  }
  return rep;
}

}  // namespace pennmm
