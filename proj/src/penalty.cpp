#include "pennmm/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pennmm/errors.hpp"

namespace pennmm {

namespace {

constexpr double kQuadTol = 1e-12;

// int_a^b p'(t)/(eps+t) dt for the uncapped Lq derivative, 0 < a <= b.
// Substituting u = log t removes the boundary layer at t ~ eps, which spans
// many decades when eps is tiny.
double lq_tail_integral(double lambda, double q, double eps, double a, double b) {
  if (b <= a) return 0.0;
  auto integrand = [=](double u) {
    const double t = std::exp(u);
    return lambda * q * std::exp(q * u) / (eps + t);
  };
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, std::log(a), std::log(b), 15, kQuadTol);
}

}  // namespace

PenaltySpec::PenaltySpec(PenaltyKind kind, double lambda, double a, double q, double epsilon)
    : kind_(kind), lambda_(lambda), a_(a), q_(q), epsilon_(epsilon) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidSpecError("penalty lambda must be a nonnegative real");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw InvalidSpecError("penalty epsilon must be a nonnegative real");
  if (kind == PenaltyKind::Scad && !(a > 2.0))
    throw InvalidSpecError("SCAD requires a > 2");
  if (kind == PenaltyKind::Lq && !(q > 0.0 && q <= 1.0))
    throw InvalidSpecError("Lq requires 0 < q <= 1");
}

PenaltySpec PenaltySpec::scad(double lambda, double a, double epsilon) {
  return PenaltySpec(PenaltyKind::Scad, lambda, a, 1.0, epsilon);
}

PenaltySpec PenaltySpec::l1(double lambda, double epsilon) {
  return PenaltySpec(PenaltyKind::L1, lambda, 0.0, 1.0, epsilon);
}

PenaltySpec PenaltySpec::lq(double lambda, double q, double epsilon) {
  return PenaltySpec(PenaltyKind::Lq, lambda, 0.0, q, epsilon);
}

PenaltySpec PenaltySpec::hard_threshold(double lambda, double epsilon) {
  return PenaltySpec(PenaltyKind::HardThreshold, lambda, 0.0, 1.0, epsilon);
}

PenaltySpec PenaltySpec::with_epsilon(double epsilon) const {
  return PenaltySpec(kind_, lambda_, a_, q_, epsilon);
}

PenaltySpec PenaltySpec::with_lambda(double lambda) const {
  return PenaltySpec(kind_, lambda, a_, q_, epsilon_);
}

double derivative_plus(const PenaltySpec& spec, double theta) {
  const double lam = spec.lambda();
  switch (spec.kind()) {
    case PenaltyKind::Scad: {
      if (theta <= lam) return lam;
      return std::max(spec.a() * lam - theta, 0.0) / (spec.a() - 1.0);
    }
    case PenaltyKind::L1:
      return lam;
    case PenaltyKind::Lq: {
      const double q = spec.q();
      if (q == 1.0) return lam;
      const double t = std::max(theta, kLqDerivativeFloor);
      return lam * q * std::pow(t, q - 1.0);
    }
    case PenaltyKind::HardThreshold:
      return theta < lam ? 2.0 * (lam - theta) : 0.0;
  }
  return 0.0;
}

double second_derivative_plus(const PenaltySpec& spec, double theta) {
  const double lam = spec.lambda();
  switch (spec.kind()) {
    case PenaltyKind::Scad:
      if (theta < lam) return 0.0;
      if (theta < spec.a() * lam) return -1.0 / (spec.a() - 1.0);
      return 0.0;
    case PenaltyKind::L1:
      return 0.0;
    case PenaltyKind::Lq: {
      const double q = spec.q();
      if (q == 1.0 || theta < kLqDerivativeFloor) return 0.0;
      return lam * q * (q - 1.0) * std::pow(theta, q - 2.0);
    }
    case PenaltyKind::HardThreshold:
      return theta < lam ? -2.0 : 0.0;
  }
  return 0.0;
}

double value(const PenaltySpec& spec, double theta) {
  const double t = std::abs(theta);
  const double lam = spec.lambda();
  switch (spec.kind()) {
    case PenaltyKind::Scad: {
      const double a = spec.a();
      if (t <= lam) return lam * t;
      if (t <= a * lam) return -(t * t - 2.0 * a * lam * t + lam * lam) / (2.0 * (a - 1.0));
      return (a + 1.0) * lam * lam / 2.0;
    }
    case PenaltyKind::L1:
      return lam * t;
    case PenaltyKind::Lq: {
      const double q = spec.q();
      if (q == 1.0) return lam * t;
      const double f = kLqDerivativeFloor;
      if (t <= f) return lam * q * std::pow(f, q - 1.0) * t;
      return lam * std::pow(t, q) - lam * (1.0 - q) * std::pow(f, q);
    }
    case PenaltyKind::HardThreshold:
      if (t < lam) return lam * lam - (t - lam) * (t - lam);
      return lam * lam;
  }
  return 0.0;
}

double perturbed_value(const PenaltySpec& spec, double theta) {
  const double eps = spec.epsilon();
  if (eps == 0.0) return value(spec, theta);
  const double t = std::abs(theta);
  if (t == 0.0) return 0.0;
  const double lam = spec.lambda();
  double integral = 0.0;  // int_0^t p'(s)/(eps+s) ds
  switch (spec.kind()) {
    case PenaltyKind::Scad: {
      const double a = spec.a();
      const double t1 = std::min(t, lam);
      integral = lam * std::log1p(t1 / eps);
      if (t > lam) {
        // (a*lam - s)/(eps+s) = (a*lam + eps)/(eps+s) - 1
        const double t2 = std::min(t, a * lam);
        integral += ((a * lam + eps) * std::log((eps + t2) / (eps + lam)) - (t2 - lam)) /
                    (a - 1.0);
      }
      break;
    }
    case PenaltyKind::L1:
      integral = lam * std::log1p(t / eps);
      break;
    case PenaltyKind::Lq: {
      const double q = spec.q();
      if (q == 1.0) {
        integral = lam * std::log1p(t / eps);
        break;
      }
      const double f = kLqDerivativeFloor;
      const double c = lam * q * std::pow(f, q - 1.0);  // capped derivative
      const double t1 = std::min(t, f);
      integral = c * std::log1p(t1 / eps);
      if (t > f) integral += lq_tail_integral(lam, q, eps, f, t);
      break;
    }
    case PenaltyKind::HardThreshold: {
      // 2(lam - s)/(eps+s) = 2(lam + eps)/(eps+s) - 2
      const double m = std::min(t, lam);
      integral = 2.0 * ((lam + eps) * std::log1p(m / eps) - m);
      break;
    }
  }
  return value(spec, theta) - eps * integral;
}

Majorizer majorizer_at(const PenaltySpec& spec, double theta0) {
  const double t0 = std::abs(theta0);
  const double eps = spec.epsilon();
  const double deriv = derivative_plus(spec, t0);
  double quad = 0.0;
  if (deriv != 0.0) {
    if (eps == 0.0 && t0 == 0.0)
      throw DomainError("majorizer undefined at theta0 = 0 with epsilon = 0");
    quad = deriv / (2.0 * (eps + t0));
  }
  Majorizer m;
  m.center = theta0;
  m.quad_coeff = quad;
  m.constant = perturbed_value(spec, t0) - t0 * t0 * quad;
  return m;
}

EpsilonChoice epsilon_rule(const PenaltySpec& spec, const Eigen::VectorXd& beta0,
                           double tau, std::int64_t n) {
  double min_abs = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < beta0.size(); ++j) {
    const double b = std::abs(beta0[j]);
    if (b > 0.0) min_abs = std::min(min_abs, b);
  }
  const double d0 = derivative_plus(spec, 0.0);
  if (!std::isfinite(min_abs) || d0 == 0.0) return {0.0, true};
  return {tau * min_abs / (2.0 * static_cast<double>(n) * d0), false};
}

}  // namespace pennmm
