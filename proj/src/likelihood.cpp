#include "pennmm/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pennmm/errors.hpp"

namespace pennmm {

namespace {

constexpr double kEtaClamp = 35.0;

// log(1 + exp(eta)) without overflow
double log1pexp(double eta) {
  if (eta > 0.0) return eta + std::log1p(std::exp(-eta));
  return std::log1p(std::exp(eta));
}

double sample_quantile(std::vector<double> sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

Family family_from_string(const std::string& name) {
  if (name == "linear") return Family::Linear;
  if (name == "logistic") return Family::Logistic;
  if (name == "poisson") return Family::Poisson;
  if (name == "cox") return Family::Cox;
  throw InvalidSpecError("unknown family '" + name + "'");
}

std::string to_string(Family family) {
  switch (family) {
    case Family::Linear: return "linear";
    case Family::Logistic: return "logistic";
    case Family::Poisson: return "poisson";
    case Family::Cox: return "cox";
  }
  return "?";
}

LikelihoodModel::LikelihoodModel(Family family, Dataset data)
    : family_(family),
      data_(std::move(data)),
      clamp_events_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (data_.design.rows() != data_.response.size())
    throw InvalidSpecError("design and response row counts differ");
  if (family_ == Family::Cox) {
    if (!data_.status.has_value())
      throw InvalidSpecError("Cox family requires a status vector");
    const auto& st = *data_.status;
    if (st.size() != data_.n())
      throw InvalidSpecError("status length differs from sample size");
    for (Eigen::Index i = 0; i < st.size(); ++i) {
      if (st[i] != 0.0 && st[i] != 1.0)
        throw InvalidSpecError("status entries must be 0 or 1");
      if (!(data_.response[i] > 0.0))
        throw InvalidSpecError("observed times must be positive");
    }
    cox_order_.resize(static_cast<std::size_t>(data_.n()));
    std::iota(cox_order_.begin(), cox_order_.end(), Eigen::Index{0});
    std::sort(cox_order_.begin(), cox_order_.end(), [&](Eigen::Index a, Eigen::Index b) {
      return data_.response[a] > data_.response[b];
    });
  } else if (data_.status.has_value()) {
    throw InvalidSpecError("status vector only allowed for the Cox family");
  }
  if (family_ == Family::Logistic) {
    for (Eigen::Index i = 0; i < data_.response.size(); ++i)
      if (data_.response[i] != 0.0 && data_.response[i] != 1.0)
        throw InvalidSpecError("logistic responses must be 0 or 1");
  }
}

Eigen::VectorXd LikelihoodModel::linear_predictor(const Eigen::VectorXd& beta) const {
  if (beta.size() != data_.d())
    throw InvalidSpecError("coefficient dimension differs from design columns");
  return data_.design * beta;
}

Eigen::VectorXd LikelihoodModel::glm_mean(const Eigen::VectorXd& eta) const {
  Eigen::VectorXd mu(eta.size());
  std::uint64_t clipped = 0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    double e = eta[i];
    if (e > kEtaClamp) {
      e = kEtaClamp;
      ++clipped;
    } else if (e < -kEtaClamp) {
      e = -kEtaClamp;
      ++clipped;
    }
    mu[i] = family_ == Family::Logistic ? 1.0 / (1.0 + std::exp(-e)) : std::exp(e);
  }
  if (clipped) clamp_events_->fetch_add(clipped, std::memory_order_relaxed);
  return mu;
}

struct LikelihoodModel::CoxTerms {
  double loglik = 0.0;
  Eigen::VectorXd score;
  Eigen::MatrixXd hessian;
  Eigen::MatrixXd per_obs;
};

LikelihoodModel::CoxTerms LikelihoodModel::cox_terms(const Eigen::VectorXd& beta,
                                                     bool need_score,
                                                     bool need_hessian) const {
  const auto& X = data_.design;
  const auto& Z = data_.response;
  const auto& st = *data_.status;
  const Eigen::Index d = X.cols();
  const Eigen::VectorXd eta = linear_predictor(beta);
  const double shift = eta.maxCoeff();

  CoxTerms out;
  if (need_score) {
    out.score = Eigen::VectorXd::Zero(d);
    out.per_obs = Eigen::MatrixXd::Zero(data_.n(), d);
  }
  if (need_hessian) out.hessian = Eigen::MatrixXd::Zero(d, d);

  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd s2;
  if (need_hessian) s2 = Eigen::MatrixXd::Zero(d, d);

  // Sweep descending times; subjects tied at the same Z enter the risk set
  // together before any failure at that time is scored (Breslow ties).
  std::size_t g = 0;
  const std::size_t n = cox_order_.size();
  while (g < n) {
    std::size_t h = g;
    const double t = Z[cox_order_[g]];
    while (h < n && Z[cox_order_[h]] == t) {
      const Eigen::Index i = cox_order_[h];
      const double w = std::exp(eta[i] - shift);
      s0 += w;
      if (need_score || need_hessian) s1.noalias() += w * X.row(i).transpose();
      if (need_hessian) s2.noalias() += w * X.row(i).transpose() * X.row(i);
      ++h;
    }
    for (std::size_t k = g; k < h; ++k) {
      const Eigen::Index i = cox_order_[k];
      if (st[i] != 1.0) continue;
      out.loglik += eta[i] - (shift + std::log(s0));
      if (need_score) {
        const Eigen::VectorXd mean = s1 / s0;
        const Eigen::VectorXd term = X.row(i).transpose() - mean;
        out.score += term;
        out.per_obs.row(i) = term.transpose();
      }
      if (need_hessian) {
        const Eigen::VectorXd mean = s1 / s0;
        out.hessian.noalias() -= s2 / s0 - mean * mean.transpose();
      }
    }
    g = h;
  }
  if (!std::isfinite(out.loglik)) throw LoglikOverflowError(-1, shift);
  return out;
}

double LikelihoodModel::loglik(const Eigen::VectorXd& beta) const {
  switch (family_) {
    case Family::Linear: {
      const Eigen::VectorXd r = data_.response - linear_predictor(beta);
      return -0.5 * r.squaredNorm();
    }
    case Family::Logistic: {
      const Eigen::VectorXd eta = linear_predictor(beta);
      double ll = 0.0;
      for (Eigen::Index i = 0; i < eta.size(); ++i)
        ll += data_.response[i] * eta[i] - log1pexp(eta[i]);
      if (!std::isfinite(ll)) throw LoglikOverflowError(-1, eta.cwiseAbs().maxCoeff());
      return ll;
    }
    case Family::Poisson: {
      const Eigen::VectorXd eta = linear_predictor(beta);
      double ll = 0.0;
      for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double term = data_.response[i] * eta[i] - std::exp(eta[i]);
        if (!std::isfinite(term)) throw LoglikOverflowError(i, eta[i]);
        ll += term;
      }
      if (!std::isfinite(ll)) throw LoglikOverflowError(-1, eta.cwiseAbs().maxCoeff());
      return ll;
    }
    case Family::Cox:
      return cox_terms(beta, false, false).loglik;
  }
  return 0.0;
}

Eigen::VectorXd LikelihoodModel::score(const Eigen::VectorXd& beta) const {
  switch (family_) {
    case Family::Linear: {
      return data_.design.transpose() * (data_.response - linear_predictor(beta));
    }
    case Family::Logistic:
    case Family::Poisson: {
      const Eigen::VectorXd mu = glm_mean(linear_predictor(beta));
      return data_.design.transpose() * (data_.response - mu);
    }
    case Family::Cox:
      return cox_terms(beta, true, false).score;
  }
  return Eigen::VectorXd();
}

Eigen::MatrixXd LikelihoodModel::curvature(const Eigen::VectorXd& beta,
                                           CurvatureKind /*kind*/) const {
  // Observed and expected information coincide for the canonical families here;
  // the Cox partial likelihood uses its observed information.
  switch (family_) {
    case Family::Linear:
      return -(data_.design.transpose() * data_.design);
    case Family::Logistic:
    case Family::Poisson: {
      const Eigen::VectorXd mu = glm_mean(linear_predictor(beta));
      Eigen::VectorXd v(mu.size());
      for (Eigen::Index i = 0; i < mu.size(); ++i)
        v[i] = family_ == Family::Logistic ? mu[i] * (1.0 - mu[i]) : mu[i];
      return -(data_.design.transpose() * v.asDiagonal() * data_.design);
    }
    case Family::Cox:
      return cox_terms(beta, false, true).hessian;
  }
  return Eigen::MatrixXd();
}

Eigen::MatrixXd LikelihoodModel::per_observation_scores(const Eigen::VectorXd& beta) const {
  switch (family_) {
    case Family::Linear: {
      const Eigen::VectorXd r = data_.response - linear_predictor(beta);
      return r.asDiagonal() * data_.design;
    }
    case Family::Logistic:
    case Family::Poisson: {
      const Eigen::VectorXd mu = glm_mean(linear_predictor(beta));
      return (data_.response - mu).asDiagonal() * data_.design;
    }
    case Family::Cox:
      return cox_terms(beta, true, false).per_obs;
  }
  return Eigen::MatrixXd();
}

LikelihoodModel LikelihoodModel::restricted_to(const std::vector<Eigen::Index>& columns) const {
  Dataset sub;
  sub.design.resize(data_.n(), static_cast<Eigen::Index>(columns.size()));
  sub.column_names.reserve(columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    sub.design.col(static_cast<Eigen::Index>(k)) = data_.design.col(columns[k]);
    sub.column_names.push_back(data_.column_name(columns[k]));
  }
  sub.response = data_.response;
  sub.status = data_.status;
  return LikelihoodModel(family_, std::move(sub));
}

Eigen::MatrixXd spline_basis(const Eigen::VectorXd& t,
                             const std::vector<double>& knot_quantiles) {
  const Eigen::Index n = t.size();
  if (n < 10) throw DomainError("spline basis requires at least 10 observations");

  const double mean = t.mean();
  const double sd = std::sqrt((t.array() - mean).square().sum() /
                              static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw DomainError("spline input is constant");
  const Eigen::VectorXd z = (t.array() - mean) / sd;

  std::vector<double> sorted(z.data(), z.data() + n);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> knots;
  knots.reserve(knot_quantiles.size());
  for (double p : knot_quantiles) knots.push_back(sample_quantile(sorted, p));
  for (std::size_t j = 1; j < knots.size(); ++j)
    if (!(knots[j] > knots[j - 1]))
      throw DomainError("duplicate spline knots (degenerate input distribution)");

  const auto k = static_cast<Eigen::Index>(knots.size());
  Eigen::MatrixXd basis(n, 4 + k);
  for (Eigen::Index i = 0; i < n; ++i) {
    basis(i, 0) = 1.0;
    basis(i, 1) = z[i];
    basis(i, 2) = z[i] * z[i];
    basis(i, 3) = z[i] * z[i] * z[i];
    for (Eigen::Index j = 0; j < k; ++j) {
      const double u = z[i] - knots[static_cast<std::size_t>(j)];
      basis(i, 4 + j) = u > 0.0 ? u * u * u : 0.0;
    }
  }
  return basis;
}

}  // namespace pennmm
