#pragma once

#include <random>
#include <string>
#include <vector>

#include "pennmm/selection.hpp"

namespace pennmm {

enum class ExampleKind { Linear1, Logistic2, Cox3, CoxMisspec };

ExampleKind example_from_string(const std::string& name);
std::string to_string(ExampleKind example);
Family family_of(ExampleKind example);

// A Monte Carlo study: identical (spec, seed) reproduces every dataset
// bit-exactly; each replicate owns RNG streams derived from (seed, replicate).
struct GeneratorSpec {
  ExampleKind example = ExampleKind::Linear1;
  double rho = 0.5;          // pairwise correlation (AR exponent for Cox)
  Eigen::Index n = 100;
  Eigen::Index d = 0;        // 0 = family default (9 linear/logistic, 8 Cox)
  double sigma = 1.0;        // linear noise standard deviation
  double beta_extra = 0.2;   // beta_9 = beta_10 in the misspecified Cox model
  bool censoring = true;     // Cox: disable to get delta = 1 everywhere
  std::uint64_t seed = 0;
  Eigen::Index replicates = 100;
};

struct GeneratedData {
  Dataset data;                  // view handed to the fitting code
  Dataset full_data;             // data-generating view (10 columns for CoxMisspec)
  Eigen::VectorXd true_beta;     // in the full_data column space
  std::vector<Eigen::Index> oracle_columns;  // true support, full_data indices
};

std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t replicate,
                              std::uint64_t stream);

GeneratedData gen_linear(const GeneratorSpec& spec, Eigen::Index replicate);
GeneratedData gen_logistic(const GeneratorSpec& spec, Eigen::Index replicate);
GeneratedData gen_cox(const GeneratorSpec& spec, Eigen::Index replicate);
GeneratedData gen_cox_misspecified(const GeneratorSpec& spec, Eigen::Index replicate);
GeneratedData generate(const GeneratorSpec& spec, Eigen::Index replicate);

// Covariate law and link needed to evaluate E{mu_hat(x) - mu(x)}^2.
struct MeProblem {
  Family family = Family::Linear;
  Eigen::MatrixXd latent_chol;   // Cholesky factor of the base normal covariance
  bool chi_square_tail = false;  // append (x1^2-1)/sqrt2, (x2^2-1)/sqrt2
};

MeProblem me_problem(const GeneratorSpec& spec);

// Closed form for the linear family; fresh-draw Monte Carlo otherwise.
// Coefficient vectors live in the full_data column space (zeros where a view
// omits a column).
double model_error(const MeProblem& problem, const Eigen::VectorXd& beta_hat_full,
                   const Eigen::VectorXd& beta_true_full, Eigen::Index mc_draws,
                   std::uint64_t seed);

struct ReplicateOutcome {
  Eigen::VectorXd beta;  // embedded in the full_data column space
  double model_error = 0.0;
  double se_beta1 = 0.0;
  bool se_valid = false;
  double seconds = 0.0;
  bool failed = false;
};

struct MethodSummary {
  std::string method;
  double rme_median = 0.0;
  double c_mean = 0.0;        // true zeros estimated zero
  double i_mean = 0.0;        // true nonzeros estimated zero
  double sd_b1 = 0.0;
  double se_b1_mean = 0.0;
  double se_b1_std = 0.0;
  double secs_mean = 0.0;
  double secs_median = 0.0;
  Eigen::Index failures = 0;
};

MethodSummary summarize(const std::string& method,
                        const std::vector<ReplicateOutcome>& outcomes,
                        const Eigen::VectorXd& true_beta_full,
                        const std::vector<double>& baseline_me);

struct ExperimentReport {
  GeneratorSpec spec;
  std::string rho_or_n;  // label column: rho for linear/logistic, n for Cox
  std::vector<MethodSummary> rows;
};

struct ExperimentConfig {
  std::vector<std::string> methods = {"New", "LQA", "AIC", "BIC", "Oracle"};
  Eigen::Index mc_draws = 50000;
  int threads = 1;
  FitConfig fit;
  std::vector<double> lambda_grid;  // empty = default grid
  double scad_a = 3.7;
};

ExperimentReport run_experiment(const GeneratorSpec& spec, const ExperimentConfig& config);

void write_report_tsv(const ExperimentReport& report, const std::string& path);
void write_report_sidecar(const ExperimentReport& report, const ExperimentConfig& config,
                          const std::string& path);

}  // namespace pennmm
