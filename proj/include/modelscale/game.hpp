#pragma once

#include <functional>
#include <optional>
#include <random>
#include <utility>

#include "modelscale/action_set.hpp"

namespace modelscale {

// Joint action x = (theta, e): learner action first, environment second.
struct JointAction {
  Vector theta;
  Vector env;

  Vector stacked() const;
  static JointAction split(const Vector& stacked, int dim_learner);
};

using LossFn = std::function<double(const Vector& theta, const Vector& env)>;
using GradFn = std::function<Vector(const Vector& theta, const Vector& env)>;

// A two-player continuous game. Each player minimizes its own loss; the
// gradients are taken with respect to the player's own action only.
struct GameSpec {
  int dim_learner = 1;
  int dim_env = 1;
  LossFn loss_learner;
  LossFn loss_env;
  GradFn grad_learner;  // d f_l / d theta
  GradFn grad_env;      // d f_e / d e
  double mu = 1.0;         // strong-monotonicity modulus
  double lipschitz = 1.0;  // Lipschitz constant of the gradient operator
  double noise_bound = 0.0;  // sigma: E||xi||^2 <= sigma^2

  // Throws ArgumentError on missing callables, bad dimensions, mu > L or
  // nonpositive constants.
  void validate() const;

  int joint_dim() const { return dim_learner + dim_env; }
};

// F(x) = (grad_theta f_l(theta, e); grad_e f_e(theta, e)).
// Throws NumericError on a non-finite component.
Vector gradient_operator(const GameSpec& game, const JointAction& x);

// F(x) + xi with xi drawn as a uniform direction times a magnitude uniform on
// [0, min(1, sqrt(3) sigma)]: mean zero, ||xi|| <= 1 surely, E||xi||^2 <= sigma^2.
Vector noisy_gradient_operator(const GameSpec& game, const JointAction& x,
                               std::mt19937_64& rng);

struct MonotonicityAudit {
  double min_modulus = 0.0;
  bool passed = true;
  int pairs_checked = 0;
  std::optional<std::pair<JointAction, JointAction>> violating_pair;
};

// Samples point pairs from `region` (a subset of the joint space) and
// records the smallest quotient <F(x)-F(x'), x-x'> / ||x-x'||^2. The audit
// fails when that minimum drops below game.mu - tol.
MonotonicityAudit monotonicity_audit(const GameSpec& game, const ActionSet& region,
                                     int samples, std::mt19937_64& rng,
                                     double tol = 1e-9);

// Largest relative discrepancy between the supplied gradients and central
// finite differences of the losses at x.
double gradient_fd_error(const GameSpec& game, const JointAction& x,
                         double step = 1e-5);

// Game with quadratic losses f_i(x) = 1/2 x'Q_i x + c_i'x + k_i over the
// stacked joint action x. Its gradient operator is affine, F(x) = M x + q,
// so mu and L follow from M directly.
struct QuadraticGame {
  int dim_learner = 1;
  int dim_env = 1;
  Matrix q_learner;  // joint_dim x joint_dim, symmetric
  Vector c_learner;
  double k_learner = 0.0;
  Matrix q_env;
  Vector c_env;
  double k_env = 0.0;

  int joint_dim() const { return dim_learner + dim_env; }
  Matrix operator_matrix() const;  // M
  Vector operator_offset() const;  // q
  // Smallest eigenvalue of the symmetric part of M.
  double monotonicity_modulus() const;
  // Spectral norm of M.
  double lipschitz_constant() const;
  // Solution of M x + q = 0 (the Nash point when no constraint binds).
  JointAction unconstrained_nash() const;

  double loss_learner(const Vector& theta, const Vector& env) const;
  double loss_env(const Vector& theta, const Vector& env) const;

  GameSpec spec(double noise_bound = 0.0) const;
};

// Builds the scalar-action quadratic game
//   f_l = a_ll/2 th^2 + b_l th e + c_ll/2 e^2 + g_l th + h_l e + k_l
//   f_e = a_ee/2 e^2 + b_e th e + c_ee/2 th^2 + g_e e + h_e th + k_e.
struct ScalarQuadratic {
  double a_ll = 1, b_l = 0, c_ll = 0, g_l = 0, h_l = 0, k_l = 0;
  double a_ee = 1, b_e = 0, c_ee = 0, g_e = 0, h_e = 0, k_e = 0;
  QuadraticGame game() const;
};

}  // namespace modelscale
