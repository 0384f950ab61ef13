#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pennmm/likelihood.hpp"
#include "pennmm/penalty.hpp"

namespace pennmm {

struct FitConfig {
  double tau = 1e-8;          // convergence tolerance on max_j |dQ_eps/db_j| vs tau/2
  int max_iter = 500;
  CurvatureKind curvature = CurvatureKind::ObservedHessian;
  int max_halvings = 30;
  std::optional<double> epsilon_override;

  // Unperturbed local-quadratic-approximation variant: epsilon forced to 0 and
  // a coordinate whose magnitude drops below lqa_drop_tol is zeroed and never
  // reenters the model.
  bool lqa_drop = false;
  double lqa_drop_tol = 1e-8;

  bool record_iterates = false;
};

enum class FitStatus { Converged, MaxIter, LineSearchFailed };
std::string to_string(FitStatus status);

struct IterationRecord {
  double q_eps = 0.0;     // objective after the accepted step
  double alpha = 0.0;     // step size used
  double grad_max = 0.0;  // max-norm of the perturbed gradient after the step
};

struct FitResult {
  Eigen::VectorXd beta_hat;         // exact zeros wherever active is false
  std::vector<bool> active;
  double epsilon = 0.0;             // perturbation actually used
  bool epsilon_degenerate = false;  // epsilon rule hit a degenerate case
  int iterations = 0;
  std::vector<IterationRecord> trace;
  FitStatus status = FitStatus::Converged;
  Eigen::VectorXd zero_rule_gradients;  // |dQ/db_j| at exit, before thresholding
  bool derivative_cap = false;          // Lq derivative floor was in effect
  bool spectral_shift_used = false;     // Newton system needed a diagonal shift
  std::vector<Eigen::VectorXd> iterates;  // populated when config.record_iterates
};

// Center and penalty-curvature diagonal E_k of the minorizing surrogate.
struct SurrogateState {
  Eigen::VectorXd center;
  Eigen::VectorXd ek_diag;  // p'(|b_j|+)/(eps+|b_j|), zero where p' vanishes
};

// Q_eps(beta) = loglik(beta) - n * sum_j p_{lambda,eps}(|beta_j|)
double q_eps(const LikelihoodModel& model, const PenaltySpec& spec,
             const Eigen::VectorXd& beta);

// Gradient of Q_eps; the penalty term is beta_j * p'(|b_j|+)/(eps+|b_j|).
Eigen::VectorXd q_eps_gradient(const LikelihoodModel& model, const PenaltySpec& spec,
                               const Eigen::VectorXd& beta);

// |dQ/db_j| of the unperturbed objective, used by the zero rule.
Eigen::VectorXd zero_rule_gradient(const LikelihoodModel& model, const PenaltySpec& spec,
                                   const Eigen::VectorXd& beta);

SurrogateState surrogate(const PenaltySpec& spec, const Eigen::VectorXd& beta_k);

struct StepResult {
  Eigen::VectorXd beta;
  double alpha = 1.0;
  bool line_search_failed = false;
  bool spectral_shift = false;
};

// One MM-Newton update from state.center. Linear family: exact ridge solve
// with alpha = 1; otherwise a Newton direction on the surrogate with
// step-halving until the surrogate (strictly) increases.
StepResult mm_step(const LikelihoodModel& model, const PenaltySpec& spec,
                   const SurrogateState& state, const FitConfig& config);

// Full MM fit. The start is the unpenalized MLE unless beta0 is given; epsilon
// comes from epsilon_rule unless overridden; the zero rule is applied once at
// convergence and the surviving model is not refit.
FitResult fit(const LikelihoodModel& model, const PenaltySpec& spec_sans_eps,
              std::optional<Eigen::VectorXd> beta0 = std::nullopt,
              const FitConfig& config = FitConfig());

struct RateDiagnostic {
  std::vector<double> eigenvalues;  // spectrum of the algorithm-map derivative
  double rho = 0.0;                 // largest eigenvalue: the linear rate
};

// Local convergence rate at a stationary point of Q_eps (spec must carry the
// fitted epsilon). Throws NonStationaryError when the gradient exceeds tau.
RateDiagnostic rate_diagnostic(const LikelihoodModel& model, const PenaltySpec& spec,
                               const Eigen::VectorXd& beta_star,
                               const FitConfig& config = FitConfig());

// Process-wide count of accepted iterations that failed the Q_eps ascent check
// beyond float-noise slack; the acceptance suite requires this to stay zero.
std::uint64_t ascent_violation_count();
void reset_ascent_violation_count();

}  // namespace pennmm
