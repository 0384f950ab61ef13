#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace pennmm {

enum class PenaltyKind { Scad, L1, Lq, HardThreshold };

// One-sided derivative floor for Lq with q < 1, whose derivative diverges at
// the origin: below this argument the derivative is held constant so that
// p'(0+) stays finite. value() is the exact antiderivative of the capped
// derivative, so the majorization theory applies verbatim.
inline constexpr double kLqDerivativeFloor = 1e-8;

// Penalty family with its tuning constants and the perturbation epsilon.
// Invalid combinations are rejected here, never in the evaluators.
class PenaltySpec {
 public:
  static PenaltySpec scad(double lambda, double a = 3.7, double epsilon = 0.0);
  static PenaltySpec l1(double lambda, double epsilon = 0.0);
  static PenaltySpec lq(double lambda, double q, double epsilon = 0.0);
  static PenaltySpec hard_threshold(double lambda, double epsilon = 0.0);

  PenaltyKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double a() const { return a_; }
  double q() const { return q_; }
  double epsilon() const { return epsilon_; }

  PenaltySpec with_epsilon(double epsilon) const;
  PenaltySpec with_lambda(double lambda) const;

  // true when the q < 1 derivative floor is in effect for this spec
  bool derivative_capped() const { return kind_ == PenaltyKind::Lq && q_ < 1.0; }

 private:
  PenaltySpec(PenaltyKind kind, double lambda, double a, double q, double epsilon);

  PenaltyKind kind_;
  double lambda_;
  double a_;
  double q_;
  double epsilon_;
};

// p'_lambda(theta+) for theta >= 0. Nonincreasing on (0, inf), finite at 0.
double derivative_plus(const PenaltySpec& spec, double theta);

// One-sided second derivative p''_lambda(theta+) (zero or negative).
double second_derivative_plus(const PenaltySpec& spec, double theta);

// p_lambda(|theta|): exact antiderivative of derivative_plus on [0, |theta|].
double value(const PenaltySpec& spec, double theta);

// p_{lambda,eps}(|theta|) = p_lambda(|theta|) - eps * int_0^{|theta|} p'(t)/(eps+t) dt.
// Closed forms for SCAD/L1/hard threshold; adaptive quadrature for Lq.
double perturbed_value(const PenaltySpec& spec, double theta);

// Quadratic majorizer of the (perturbed) penalty centered at theta0:
//   eval(theta) = constant + quad_coeff * theta^2.
struct Majorizer {
  double center = 0.0;
  double constant = 0.0;
  double quad_coeff = 0.0;

  double eval(double theta) const { return constant + quad_coeff * theta * theta; }
};

// Touches the perturbed penalty at +-|theta0| and lies above elsewhere.
// epsilon = 0 requires theta0 != 0 (the defect the perturbation repairs).
Majorizer majorizer_at(const PenaltySpec& spec, double theta0);

struct EpsilonChoice {
  double epsilon = 0.0;
  // all-zero start or p'(0+) = 0; epsilon = 0 returned instead of an error
  bool degenerate = false;
};

// Fixed perturbation: eps = tau * min{|b_j| : b_j != 0} / (2 n p'(0+)).
EpsilonChoice epsilon_rule(const PenaltySpec& spec, const Eigen::VectorXd& beta0,
                           double tau, std::int64_t n);

}  // namespace pennmm
