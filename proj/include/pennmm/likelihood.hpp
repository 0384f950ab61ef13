#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pennmm/dataset.hpp"

namespace pennmm {

enum class Family { Linear, Logistic, Poisson, Cox };

Family family_from_string(const std::string& name);
std::string to_string(Family family);

enum class CurvatureKind { ObservedHessian, FisherInformation };

// Log-likelihood with exact score and curvature. Linear uses the unit-variance
// Gaussian likelihood (the maximizer is invariant to sigma^2; the dispersion is
// estimated after fitting). Cox is the Breslow partial likelihood.
class LikelihoodModel {
 public:
  LikelihoodModel(Family family, Dataset data);

  Family family() const { return family_; }
  const Dataset& data() const { return data_; }
  Eigen::Index n() const { return data_.n(); }
  Eigen::Index d() const { return data_.d(); }

  double loglik(const Eigen::VectorXd& beta) const;
  Eigen::VectorXd score(const Eigen::VectorXd& beta) const;
  Eigen::MatrixXd curvature(const Eigen::VectorXd& beta,
                            CurvatureKind kind = CurvatureKind::ObservedHessian) const;

  // Row i is the gradient of the i-th log-likelihood term; rows sum to score().
  // Cox: the per-failure partial-likelihood term, attributed to the failing subject.
  Eigen::MatrixXd per_observation_scores(const Eigen::VectorXd& beta) const;

  // Same family on a column subset of the design.
  LikelihoodModel restricted_to(const std::vector<Eigen::Index>& columns) const;

  // Number of linear predictors clipped at +-35 during mean evaluation.
  std::uint64_t clamp_events() const { return clamp_events_->load(); }

 private:
  Eigen::VectorXd linear_predictor(const Eigen::VectorXd& beta) const;
  Eigen::VectorXd glm_mean(const Eigen::VectorXd& eta) const;

  struct CoxTerms;
  CoxTerms cox_terms(const Eigen::VectorXd& beta, bool need_score, bool need_hessian) const;

  Family family_;
  Dataset data_;
  std::vector<Eigen::Index> cox_order_;  // indices sorted by descending time
  std::shared_ptr<std::atomic<std::uint64_t>> clamp_events_;
};

// Truncated power cubic spline basis in a standardized variable:
// columns [1, t, t^2, t^3, (t-k_1)_+^3, ...] with knots at the requested
// empirical quantiles of the standardized input.
Eigen::MatrixXd spline_basis(const Eigen::VectorXd& t,
                             const std::vector<double>& knot_quantiles = {0.10, 0.25, 0.50,
                                                                          0.75, 0.90});

}  // namespace pennmm
