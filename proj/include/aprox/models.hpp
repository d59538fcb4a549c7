#pragma once

#include <string>
#include <vector>

#include "aprox/numeric.hpp"
#include "aprox/prox.hpp"
#include "aprox/reference.hpp"
#include "aprox/solver.hpp"

namespace aprox {

/// f, g and the reference they are paired with (f.reference).
struct ProblemBundle {
  SmoothObjective f;
  Regularizer g;
  std::string name;
};

struct LogisticRegularization {
  enum class Kind { none, l1, sql2 };
  Kind kind = Kind::none;
  double nu = 0.0;
};

/// Floor on the logistic smoothness constant (all-zero data rows).
inline constexpr double kLogisticLFloor = 1e-12;

/// f(x) = (1/m) sum ln(1 + exp(-b_i <a_i, x>)) relative to the symmetrized
/// logistic reference with L = max ||a_i||^2.
ProblemBundle build_logistic(const Matrix& A, const Vector& b, LogisticRegularization reg);
double logistic_constant(const Matrix& A);

struct ExpLpModel {
  Matrix A;
  Vector b;
  Vector c;
  double sigma = 1.0;
  double L = 0.0;
};

/// sum sigma exp((<a_i, x> - b_i) / sigma) + <c, x> with A >= 0 (no zero
/// columns) and c < 0, relative to Exp with L = max ||a_i||_1 / sigma.
ExpLpModel make_exp_lp(const Matrix& A, const Vector& b, const Vector& c, double sigma);
ProblemBundle build_exp_lp(const ExpLpModel& model);
ProblemBundle build_exp_lp(const Matrix& A, const Vector& b, const Vector& c, double sigma);

/// Two-sided lifting of a mixed-sign exponential LP onto (x, x_-).
struct LiftedExpLpModel {
  Matrix A;
  Vector b;
  Vector c;
  double sigma = 1.0;
  double epsilon = 0.0;
  /// Shifted splits (A+ = max(A, 0) + eps, and so on).
  Matrix A_plus, A_minus;
  Vector c_plus, c_minus;
  double L = 0.0;

  Index n() const { return A.cols(); }
};

inline constexpr double kDefaultLiftShift = 1e-8;

/// `allow_zero_columns` accepts epsilon = 0 with an all-zero split column
/// (the boosting special case); parallel_update_step then floors Delta.
LiftedExpLpModel make_lifted_exp_lp(const Matrix& A, const Vector& b, const Vector& c, double sigma,
                                    double epsilon = kDefaultLiftShift, bool allow_zero_columns = false);
/// f(x, x_-) = sum sigma exp((<a+_i, x> + <a-_i, x_-> - b_i)/sigma) + <c+, x> + <c-, x_->
/// over Exp(x) + Exp(x_-), with the consensus indicator as g.
ProblemBundle build_lifted_exp_lp(const LiftedExpLpModel& model);

/// Eliminated form of one lifted step at the consensus point (x, -x):
///   x+ = x - (lambda/2)(ln Delta - ln Delta_-).
/// Components of Delta below 1e-300 are floored; `floor_events` counts them.
Vector parallel_update_step(const LiftedExpLpModel& model, double lambda, const Vector& x,
                            int* floor_events = nullptr);

/// Value of the original (unlifted) objective sum sigma exp((Ax - b)/sigma) + <c, x>.
double exp_lp_objective(const Matrix& A, const Vector& b, const Vector& c, double sigma, const Vector& x);
Vector exp_lp_gradient(const Matrix& A, const Vector& b, const Vector& c, double sigma, const Vector& x);

enum class OtMode { gauss_seidel, joint };

struct OtDualModel {
  Matrix C;  ///< m x n
  Vector r;  ///< length n, paired with alpha
  Vector s;  ///< length m, paired with beta
  double sigma = 1.0;
  OtMode mode = OtMode::joint;
};

OtDualModel make_ot_dual(const Matrix& C, const Vector& r, const Vector& s, double sigma, OtMode mode);
/// Joint problem in z = (alpha, beta): f = sum_ij sigma exp((alpha_j + beta_i - C_ij)/sigma),
/// g = <-r, alpha> + <-s, beta>, L = 2/sigma.
ProblemBundle build_ot_dual(const OtDualModel& model);
/// Same iterates with the linear terms folded into f and the reference tilted
/// by -(r, s); g = 0.
ProblemBundle build_ot_dual_folded(const OtDualModel& model);
double ot_dual_objective(const OtDualModel& model, const Vector& alpha, const Vector& beta);

struct OtIterate {
  Vector alpha;
  Vector beta;
};

/// Block objective in alpha (beta fixed) or beta (alpha fixed); L = 1/sigma.
ProblemBundle ot_block(const OtDualModel& model, bool alpha_block, const Vector& other);

/// Alternating block steps with lambda = sigma: alpha first, then beta.
/// Returns the starting point followed by one entry per sweep.
std::vector<OtIterate> ot_gauss_seidel(const OtDualModel& model, int sweeps, const Vector& alpha0,
                                       const Vector& beta0);

}  // namespace aprox
