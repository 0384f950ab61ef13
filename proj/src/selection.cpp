#include "pennmm/selection.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <limits>

#include "pennmm/errors.hpp"

namespace pennmm {

namespace {

// Deviance for the GCV numerator. Saturated log-likelihood for the GLMs;
// the full-model MLE log-likelihood for the Cox partial likelihood.
double deviance(const LikelihoodModel& model, const Eigen::VectorXd& beta,
                double loglik_reference) {
  const double ll = model.loglik(beta);
  switch (model.family()) {
    case Family::Linear:
      return -2.0 * ll;  // RSS
    case Family::Logistic:
      return -2.0 * ll;  // saturated log-likelihood is zero
    case Family::Poisson: {
      double sat = 0.0;
      const auto& y = model.data().response;
      for (Eigen::Index i = 0; i < y.size(); ++i)
        if (y[i] > 0.0) sat += y[i] * std::log(y[i]) - y[i];
      return 2.0 * (sat - ll);
    }
    case Family::Cox:
      return 2.0 * (loglik_reference - ll);
  }
  return 0.0;
}

// e(lambda) = trace{(hess - nE)^{-1} hess} over the active coordinates.
double effective_dof(const LikelihoodModel& model, const PenaltySpec& spec,
                     const FitResult& fr) {
  std::vector<Eigen::Index> act;
  for (Eigen::Index j = 0; j < model.d(); ++j)
    if (fr.active[static_cast<std::size_t>(j)]) act.push_back(j);
  if (act.empty()) return 0.0;

  const Eigen::MatrixXd hess = model.curvature(fr.beta_hat);
  const auto m = static_cast<Eigen::Index>(act.size());
  Eigen::MatrixXd h(m, m);
  for (Eigen::Index p = 0; p < m; ++p)
    for (Eigen::Index q = 0; q < m; ++q)
      h(p, q) = -hess(act[static_cast<std::size_t>(p)], act[static_cast<std::size_t>(q)]);

  Eigen::MatrixXd denom = h;
  for (Eigen::Index p = 0; p < m; ++p) {
    const Eigen::Index j = act[static_cast<std::size_t>(p)];
    const double b = std::abs(fr.beta_hat[j]);
    const double deriv = derivative_plus(spec, b);
    if (deriv != 0.0)
      denom(p, p) += static_cast<double>(model.n()) * deriv / (fr.epsilon + b);
  }
  return denom.ldlt().solve(h).trace();
}

FitResult embed_subfit(const LikelihoodModel& model, const std::vector<Eigen::Index>& cols,
                       const FitResult& sub) {
  FitResult full;
  full.beta_hat = Eigen::VectorXd::Zero(model.d());
  full.active.assign(static_cast<std::size_t>(model.d()), false);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    full.beta_hat[cols[k]] = sub.beta_hat[static_cast<Eigen::Index>(k)];
    full.active[static_cast<std::size_t>(cols[k])] =
        sub.active[k];
  }
  full.epsilon = sub.epsilon;
  full.iterations = sub.iterations;
  full.trace = sub.trace;
  full.status = sub.status;
  full.zero_rule_gradients = Eigen::VectorXd::Zero(model.d());
  for (std::size_t k = 0; k < cols.size(); ++k)
    full.zero_rule_gradients[cols[k]] =
        sub.zero_rule_gradients[static_cast<Eigen::Index>(k)];
  return full;
}

}  // namespace

std::vector<double> default_lambda_grid(Eigen::Index n, double scale, std::size_t count) {
  const double k = std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(n)) *
                   scale;
  const double lo = std::log(1e-3 * k);
  const double hi = std::log(2.0 * k);
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(count - 1));
  return grid;
}

double default_lambda_scale(const LikelihoodModel& model) {
  if (model.family() != Family::Linear) return 1.0;
  const auto& y = model.data().response;
  const double mean = y.mean();
  const double sd =
      std::sqrt((y.array() - mean).square().sum() / static_cast<double>(y.size() - 1));
  return std::max(sd, 1e-12);
}

GcvResult gcv_select(const LikelihoodModel& model, const PenaltySpec& penalty_proto,
                     const std::vector<double>& lambda_grid, const FitConfig& config,
                     std::optional<Eigen::VectorXd> beta0) {
  if (lambda_grid.empty()) throw InvalidSpecError("lambda grid is empty");
  const auto n = static_cast<double>(model.n());

  Eigen::VectorXd start;
  if (beta0.has_value()) {
    start = *beta0;
  } else {
    FitConfig c = config;
    c.lqa_drop = false;
    c.epsilon_override = 0.0;
    start = fit(model, penalty_proto.with_lambda(0.0),
                Eigen::VectorXd::Zero(model.d()), c)
                .beta_hat;
  }
  const double loglik_reference = model.loglik(start);

  GcvResult out;
  out.curve.lambdas = lambda_grid;
  std::sort(out.curve.lambdas.begin(), out.curve.lambdas.end());
  out.curve.scores.assign(out.curve.lambdas.size(),
                          std::numeric_limits<double>::infinity());
  out.curve.edf.assign(out.curve.lambdas.size(), 0.0);

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.curve.lambdas.size(); ++i) {
    const double lambda = out.curve.lambdas[i];
    FitResult fr;
    try {
      fr = fit(model, penalty_proto.with_lambda(lambda), start, config);
    } catch (const Error&) {
      continue;  // recorded as an infinite score
    }
    const PenaltySpec spec = penalty_proto.with_lambda(lambda).with_epsilon(fr.epsilon);
    const double e = effective_dof(model, spec, fr);
    const double denom = n * (1.0 - e / n) * (1.0 - e / n);
    const double dev = deviance(model, fr.beta_hat, loglik_reference);
    const double score = denom > 0.0 ? dev / denom
                                     : std::numeric_limits<double>::infinity();
    out.curve.scores[i] = score;
    out.curve.edf[i] = e;
    if (score <= best) {  // ties toward larger lambda
      best = score;
      out.curve.chosen = i;
      out.fit = std::move(fr);
    }
  }
  if (!std::isfinite(best)) throw Error("every lambda in the grid failed to fit");
  return out;
}

std::string to_string(SubsetCriterion criterion) {
  return criterion == SubsetCriterion::Aic ? "AIC" : "BIC";
}

SubsetSearchResult best_subset(const LikelihoodModel& model, SubsetCriterion criterion,
                               const FitConfig& config) {
  const Eigen::Index d = model.d();
  if (d > 25)
    throw SubsetCostError(
        "exhaustive subset search over 2^" + std::to_string(d) +
        " models refused: cost grows exponentially with the dimension");
  const auto n = static_cast<double>(model.n());
  const double lambda2 =
      criterion == SubsetCriterion::Aic ? 2.0 / n : std::log(n) / n;
  const double per_param_charge = 0.5 * n * lambda2;

  const auto t0 = std::chrono::steady_clock::now();
  const double loglik_empty = model.loglik(Eigen::VectorXd::Zero(d));

  SubsetSearchResult out;
  out.n_models_evaluated = std::uint64_t{1} << d;
  out.best_subset.assign(static_cast<std::size_t>(d), false);
  out.criterion_value = -loglik_empty;
  std::vector<Eigen::Index> best_cols;

  FitConfig sub_config = config;
  sub_config.lqa_drop = false;
  sub_config.epsilon_override = 0.0;
  sub_config.record_iterates = false;

  for (std::uint64_t mask = 1; mask < out.n_models_evaluated; ++mask) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < d; ++j)
      if (mask & (std::uint64_t{1} << j)) cols.push_back(j);
    double ll;
    FitResult sub;
    try {
      const LikelihoodModel restricted = model.restricted_to(cols);
      sub = fit(restricted, PenaltySpec::l1(0.0),
                Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols.size())),
                sub_config);
      ll = restricted.loglik(sub.beta_hat);
    } catch (const Error&) {
      continue;
    }
    const double crit = -ll + per_param_charge * static_cast<double>(cols.size());
    if (crit < out.criterion_value) {
      out.criterion_value = crit;
      best_cols = cols;
      out.fit = std::move(sub);
    }
  }

  for (Eigen::Index j : best_cols) out.best_subset[static_cast<std::size_t>(j)] = true;
  if (best_cols.empty()) {
    out.fit = FitResult();
    out.fit.beta_hat = Eigen::VectorXd::Zero(d);
    out.fit.active.assign(static_cast<std::size_t>(d), false);
    out.fit.zero_rule_gradients = Eigen::VectorXd::Zero(d);
  } else {
    out.fit = embed_subfit(model, best_cols, out.fit);
  }
  out.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

FitResult oracle_fit(const LikelihoodModel& model, const std::vector<bool>& true_support,
                     const FitConfig& config) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < model.d(); ++j)
    if (true_support[static_cast<std::size_t>(j)]) cols.push_back(j);
  if (cols.empty()) {
    FitResult out;
    out.beta_hat = Eigen::VectorXd::Zero(model.d());
    out.active.assign(static_cast<std::size_t>(model.d()), false);
    out.zero_rule_gradients = Eigen::VectorXd::Zero(model.d());
    return out;
  }
  FitConfig c = config;
  c.lqa_drop = false;
  c.epsilon_override = 0.0;
  const FitResult sub =
      fit(model.restricted_to(cols), PenaltySpec::l1(0.0),
          Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols.size())), c);
  return embed_subfit(model, cols, sub);
}

}  // namespace pennmm
