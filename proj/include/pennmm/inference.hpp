#pragma once

#include "pennmm/solver.hpp"

namespace pennmm {

struct CovarianceReport {
  Eigen::MatrixXd cov;          // d x d, zero outside the available block
  Eigen::VectorXd se;           // sqrt(cov diagonal); 0 where unavailable
  std::vector<bool> available;  // false = NA-style (bread not invertible there)
  double bread_condition = 0.0;
  double sigma2_hat = 1.0;      // linear family: RSS / (n - |active|)
};

// Sandwich covariance B^{-1} V B^{-1} with penalized-Hessian bread
// B = hessian(beta_hat) - n E and empirical mean-centered score meat
// V = n * cov_hat{per-observation scores}. Coordinates where the bread entry
// is not finite (zeroed coordinate with epsilon = 0) are flagged unavailable
// instead of failing.
CovarianceReport sandwich_cov(const LikelihoodModel& model, const PenaltySpec& spec,
                              const FitResult& fit);

}  // namespace pennmm
