#include "pennmm/solver.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

#include "pennmm/errors.hpp"

namespace pennmm {

namespace {

std::atomic<std::uint64_t> g_ascent_violations{0};

// Float-noise slack for the ascent monitor: increments below double
// representability at the objective's scale are not violations.
double ascent_slack(double q) {
  return std::max(1e-12, 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(q)));
}

double max_abs(const Eigen::VectorXd& v) {
  return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

void check_full_rank(const Eigen::MatrixXd& design) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < design.cols()) {
    const Eigen::Index k = std::min(design.rows(), design.cols());
    double smallest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < k; ++i)
      smallest = std::min(smallest, std::abs(qr.matrixR()(i, i)));
    throw SingularityError("design matrix is rank deficient", smallest);
  }
}

// Symmetric positive-definite solve of M x = rhs with a flagged diagonal
// shift fallback for near-deficient systems.
struct SpdSolve {
  Eigen::VectorXd x;
  bool shifted = false;
};

SpdSolve spd_solve(Eigen::MatrixXd m, const Eigen::VectorXd& rhs) {
  SpdSolve out;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0) {
    out.x = ldlt.solve(rhs);
    return out;
  }
  const double shift = 1e-10 * std::max(1.0, m.trace() / static_cast<double>(m.cols()));
  m.diagonal().array() += shift;
  Eigen::LDLT<Eigen::MatrixXd> retry(m);
  if (retry.info() != Eigen::Success || retry.vectorD().minCoeff() <= 0.0)
    throw SingularityError("Newton system is not negative definite",
                           retry.vectorD().minCoeff());
  out.x = retry.solve(rhs);
  out.shifted = true;
  return out;
}

// Surrogate objective up to its additive constant:
//   s(b) = loglik(b) - (n/2) * sum_j ek_j b_j^2
double surrogate_value(const LikelihoodModel& model, const SurrogateState& state,
                       const Eigen::VectorXd& beta) {
  const double quad = state.ek_diag.cwiseProduct(beta.cwiseAbs2()).sum();
  return model.loglik(beta) - 0.5 * static_cast<double>(model.n()) * quad;
}

StepResult mm_step_impl(const LikelihoodModel& model, const PenaltySpec& spec,
                        const SurrogateState& state, const FitConfig& config,
                        const Eigen::VectorXd* grad_at_center) {
  const auto n = static_cast<double>(model.n());
  StepResult out;

  if (model.family() == Family::Linear) {
    // iterative ridge regression: the surrogate is exactly quadratic
    const Eigen::MatrixXd& x = model.data().design;
    Eigen::MatrixXd m = x.transpose() * x;
    m.diagonal() += n * state.ek_diag;
    auto solve = spd_solve(std::move(m), x.transpose() * model.data().response);
    out.beta = std::move(solve.x);
    out.spectral_shift = solve.shifted;
    out.alpha = 1.0;
    return out;
  }

  const Eigen::VectorXd grad = grad_at_center
                                   ? *grad_at_center
                                   : q_eps_gradient(model, spec, state.center);
  Eigen::MatrixXd a = -model.curvature(state.center, config.curvature);
  a.diagonal() += n * state.ek_diag;
  auto solve = spd_solve(std::move(a), grad);
  out.spectral_shift = solve.shifted;

  const double s_center = surrogate_value(model, state, state.center);
  const double stagnation_tol =
      8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(s_center));
  double alpha = 1.0;
  for (int nu = 0; nu <= config.max_halvings; ++nu, alpha *= 0.5) {
    const Eigen::VectorXd trial = state.center + alpha * solve.x;
    double s_trial;
    try {
      s_trial = surrogate_value(model, state, trial);
    } catch (const LoglikOverflowError&) {
      continue;  // wild trial step; halve
    }
    if (s_trial > s_center || std::abs(s_trial - s_center) <= stagnation_tol) {
      out.beta = trial;
      out.alpha = alpha;
      return out;
    }
  }
  out.beta = state.center;
  out.alpha = alpha * 2.0;
  out.line_search_failed = true;
  return out;
}

Eigen::VectorXd mle_start(const LikelihoodModel& model, const FitConfig& config) {
  FitConfig c = config;
  c.epsilon_override = 0.0;
  c.lqa_drop = false;
  c.record_iterates = false;
  const auto r = fit(model, PenaltySpec::l1(0.0),
                     Eigen::VectorXd::Zero(model.d()), c);
  return r.beta_hat;
}

}  // namespace

std::string to_string(FitStatus status) {
  switch (status) {
    case FitStatus::Converged: return "converged";
    case FitStatus::MaxIter: return "max-iterations";
    case FitStatus::LineSearchFailed: return "line-search-failed";
  }
  return "?";
}

double q_eps(const LikelihoodModel& model, const PenaltySpec& spec,
             const Eigen::VectorXd& beta) {
  double penalty = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    penalty += perturbed_value(spec, beta[j]);
  return model.loglik(beta) - static_cast<double>(model.n()) * penalty;
}

Eigen::VectorXd q_eps_gradient(const LikelihoodModel& model, const PenaltySpec& spec,
                               const Eigen::VectorXd& beta) {
  Eigen::VectorXd g = model.score(beta);
  const auto n = static_cast<double>(model.n());
  const double eps = spec.epsilon();
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    const double b = std::abs(beta[j]);
    if (b == 0.0) continue;  // d/db p_eps(|b|) vanishes at the origin
    g[j] -= n * beta[j] * derivative_plus(spec, b) / (eps + b);
  }
  return g;
}

Eigen::VectorXd zero_rule_gradient(const LikelihoodModel& model, const PenaltySpec& spec,
                                   const Eigen::VectorXd& beta) {
  Eigen::VectorXd g = model.score(beta);
  const auto n = static_cast<double>(model.n());
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    const double b = beta[j];
    if (b > 0.0)
      g[j] -= n * derivative_plus(spec, b);
    else if (b < 0.0)
      g[j] += n * derivative_plus(spec, -b);
  }
  return g.cwiseAbs();
}

SurrogateState surrogate(const PenaltySpec& spec, const Eigen::VectorXd& beta_k) {
  SurrogateState state;
  state.center = beta_k;
  state.ek_diag.resize(beta_k.size());
  const double eps = spec.epsilon();
  for (Eigen::Index j = 0; j < beta_k.size(); ++j) {
    const double b = std::abs(beta_k[j]);
    const double deriv = derivative_plus(spec, b);
    if (deriv == 0.0) {
      state.ek_diag[j] = 0.0;
    } else {
      if (eps == 0.0 && b == 0.0)
        throw DomainError("surrogate undefined: zero coordinate with epsilon = 0");
      state.ek_diag[j] = deriv / (eps + b);
    }
  }
  return state;
}

StepResult mm_step(const LikelihoodModel& model, const PenaltySpec& spec,
                   const SurrogateState& state, const FitConfig& config) {
  return mm_step_impl(model, spec, state, config, nullptr);
}

FitResult fit(const LikelihoodModel& model, const PenaltySpec& spec_sans_eps,
              std::optional<Eigen::VectorXd> beta0, const FitConfig& config) {
  if (!(config.tau > 0.0)) throw InvalidSpecError("tau must be positive");
  if (config.max_iter < 1) throw InvalidSpecError("max_iter must be positive");
  check_full_rank(model.data().design);

  const Eigen::Index d = model.d();
  Eigen::VectorXd start;
  if (beta0.has_value()) {
    if (beta0->size() != d) throw InvalidSpecError("beta0 dimension mismatch");
    start = *beta0;
  } else {
    start = mle_start(model, config);
  }

  FitResult res;
  if (config.lqa_drop) {
    res.epsilon = 0.0;
  } else if (config.epsilon_override.has_value()) {
    res.epsilon = *config.epsilon_override;
  } else {
    const auto choice = epsilon_rule(spec_sans_eps, start, config.tau, model.n());
    res.epsilon = choice.epsilon;
    res.epsilon_degenerate = choice.degenerate;
  }
  const PenaltySpec spec = spec_sans_eps.with_epsilon(res.epsilon);
  res.derivative_cap = spec.derivative_capped();

  // Active-column machinery; only the unperturbed drop rule ever shrinks it.
  std::vector<Eigen::Index> cols(static_cast<std::size_t>(d));
  std::iota(cols.begin(), cols.end(), Eigen::Index{0});
  LikelihoodModel sub = model;
  Eigen::VectorXd beta = start;

  auto embed = [&](const Eigen::VectorXd& b) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(d);
    for (std::size_t k = 0; k < cols.size(); ++k)
      full[cols[k]] = b[static_cast<Eigen::Index>(k)];
    return full;
  };

  auto apply_drop = [&]() {
    if (!config.lqa_drop) return false;
    std::vector<Eigen::Index> keep;
    Eigen::VectorXd kept(beta.size());
    Eigen::Index m = 0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (std::abs(beta[static_cast<Eigen::Index>(k)]) < config.lqa_drop_tol) continue;
      keep.push_back(cols[k]);
      kept[m++] = beta[static_cast<Eigen::Index>(k)];
    }
    if (keep.size() == cols.size()) return false;
    cols = std::move(keep);
    beta = kept.head(m);
    if (!cols.empty()) sub = model.restricted_to(cols);
    return true;
  };

  if (config.record_iterates) res.iterates.push_back(embed(beta));
  apply_drop();

  res.status = FitStatus::MaxIter;
  double q_prev = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd grad =
      cols.empty() ? Eigen::VectorXd() : q_eps_gradient(sub, spec, beta);

  while (res.iterations < config.max_iter) {
    if (max_abs(grad) < config.tau / 2.0) {
      res.status = FitStatus::Converged;
      break;
    }
    const SurrogateState state = surrogate(spec, beta);
    const StepResult step = mm_step_impl(sub, spec, state, config, &grad);
    res.spectral_shift_used = res.spectral_shift_used || step.spectral_shift;
    if (step.line_search_failed) {
      res.status = FitStatus::LineSearchFailed;
      break;
    }
    beta = step.beta;
    ++res.iterations;

    const double q_new = q_eps(sub, spec, beta);
    if (std::isfinite(q_prev) && q_new < q_prev - ascent_slack(q_prev))
      g_ascent_violations.fetch_add(1, std::memory_order_relaxed);
    q_prev = q_new;

    if (apply_drop() && cols.empty()) {
      res.trace.push_back({q_eps(model, spec, Eigen::VectorXd::Zero(d)), step.alpha, 0.0});
      if (config.record_iterates) res.iterates.push_back(Eigen::VectorXd::Zero(d));
      grad.resize(0);
      res.status = FitStatus::Converged;
      break;
    }
    grad = q_eps_gradient(sub, spec, beta);
    res.trace.push_back({q_new, step.alpha, max_abs(grad)});
    if (config.record_iterates) res.iterates.push_back(embed(beta));
  }

  res.beta_hat = embed(beta);
  res.active.assign(static_cast<std::size_t>(d), false);
  for (Eigen::Index c : cols) res.active[static_cast<std::size_t>(c)] = true;

  res.zero_rule_gradients = zero_rule_gradient(model, spec, res.beta_hat);
  if (!config.lqa_drop && res.status == FitStatus::Converged) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (res.zero_rule_gradients[j] > config.tau) {
        res.beta_hat[j] = 0.0;
        res.active[static_cast<std::size_t>(j)] = false;
      }
    }
  }
  return res;
}

RateDiagnostic rate_diagnostic(const LikelihoodModel& model, const PenaltySpec& spec,
                               const Eigen::VectorXd& beta_star, const FitConfig& config) {
  const double gmax = max_abs(q_eps_gradient(model, spec, beta_star));
  if (gmax > config.tau)
    throw NonStationaryError("rate diagnostic at a non-stationary point (|grad| = " +
                             std::to_string(gmax) + ")");

  const auto n = static_cast<double>(model.n());
  const double eps = spec.epsilon();
  const Eigen::Index d = model.d();

  // nabla^2 S - nabla^2 Q_eps = n * diag(a(b_j)) with
  //   a(t) = |t|/(eps+|t|) * { p''(|t|+) - p'(|t|+)/(eps+|t|) }  (<= 0)
  Eigen::VectorXd a_diag(d);
  Eigen::VectorXd ek(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double t = std::abs(beta_star[j]);
    const double deriv = derivative_plus(spec, t);
    ek[j] = deriv == 0.0 ? 0.0 : deriv / (eps + t);
    if (t == 0.0) {
      a_diag[j] = 0.0;
    } else {
      a_diag[j] = t / (eps + t) *
                  (second_derivative_plus(spec, t) - deriv / (eps + t));
    }
  }

  Eigen::MatrixXd bread = -model.curvature(beta_star, config.curvature);
  bread.diagonal() += n * ek;  // -(hessian - n E) is positive definite
  Eigen::MatrixXd numer = Eigen::MatrixXd::Zero(d, d);
  numer.diagonal() = -n * a_diag;  // positive semidefinite

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(numer, bread);
  if (solver.info() != Eigen::Success)
    throw SingularityError("surrogate Hessian is not positive definite", 0.0);

  RateDiagnostic out;
  out.eigenvalues.assign(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + d);
  out.rho = out.eigenvalues.empty() ? 0.0 : *std::max_element(out.eigenvalues.begin(),
                                                              out.eigenvalues.end());
  return out;
}

std::uint64_t ascent_violation_count() { return g_ascent_violations.load(); }

void reset_ascent_violation_count() { g_ascent_violations.store(0); }

}  // namespace pennmm
