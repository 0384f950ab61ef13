#pragma once

#include <cstdint>

#include "pennmm/inference.hpp"

namespace pennmm {

struct GcvCurve {
  std::vector<double> lambdas;  // increasing
  std::vector<double> scores;   // +inf where the fit failed
  std::vector<double> edf;      // effective degrees of freedom e(lambda)
  std::size_t chosen = 0;       // minimizer; ties broken toward larger lambda
};

// 50 log-spaced points on [1e-3, 2] * sqrt(log n / n) * scale.
std::vector<double> default_lambda_grid(Eigen::Index n, double scale = 1.0,
                                        std::size_t count = 50);
double default_lambda_scale(const LikelihoodModel& model);

struct GcvResult {
  GcvCurve curve;
  FitResult fit;  // fit at the chosen lambda
};

// Grid search minimizing GCV(lambda) = D(beta_hat) / (n (1 - e/n)^2) where D is
// the RSS (linear) or deviance (GLM: vs saturated; Cox: vs full-model MLE) and
// e = trace{(hess - nE)^{-1} hess} on the active block. penalty_proto supplies
// the family constants; its lambda is replaced by each grid point.
GcvResult gcv_select(const LikelihoodModel& model, const PenaltySpec& penalty_proto,
                     const std::vector<double>& lambda_grid,
                     const FitConfig& config = FitConfig(),
                     std::optional<Eigen::VectorXd> beta0 = std::nullopt);

enum class SubsetCriterion { Aic, Bic };
std::string to_string(SubsetCriterion criterion);

struct SubsetSearchResult {
  std::vector<bool> best_subset;
  double criterion_value = 0.0;
  std::uint64_t n_models_evaluated = 0;  // 2^d
  double elapsed_seconds = 0.0;
  FitResult fit;  // MLE on the winning subset, embedded in full dimension
};

// Exhaustive best-subset search minimizing -loglik(mle_S) + 0.5 n lambda^2 |S|
// with lambda = sqrt(2/n) (AIC) or sqrt(log n / n) (BIC). Guarded at d <= 25.
SubsetSearchResult best_subset(const LikelihoodModel& model, SubsetCriterion criterion,
                               const FitConfig& config = FitConfig());

// Unpenalized MLE restricted to the true support, zeros elsewhere.
FitResult oracle_fit(const LikelihoodModel& model, const std::vector<bool>& true_support,
                     const FitConfig& config = FitConfig());

}  // namespace pennmm
