#include "modelscale/instances.hpp"

#include <cmath>

#include "modelscale/errors.hpp"

namespace modelscale::instances {

namespace {

ConstrainedGame wrap(const QuadraticGame& q, double noise, ActionSet learner_set, ActionSet env_set) {
  return {q, q.spec(noise), std::move(learner_set), std::move(env_set)};
}

// f_l = 1/2 ||theta - a||^2 + e b'theta + 1/2 e^2, f_e = 1/2 e^2 - e c'theta.
QuadraticGame coupled_quadratic(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                const Eigen::Vector2d& c) {
  QuadraticGame q;
  q.dim_learner = 2;
  q.dim_env = 1;
  q.q_learner = Matrix::Identity(3, 3);
  q.q_learner.block(0, 2, 2, 1) = b;
  q.q_learner.block(2, 0, 1, 2) = b.transpose();
  q.c_learner = Vector::Zero(3);
  q.c_learner.head(2) = -a;
  q.k_learner = 0.5 * a.squaredNorm();
  q.q_env = Matrix::Zero(3, 3);
  q.q_env(2, 2) = 1.0;
  q.q_env.block(0, 2, 2, 1) = -c;
  q.q_env.block(2, 0, 1, 2) = -c.transpose();
  q.c_env = Vector::Zero(3);
  return q;
}

}  // namespace

ConstrainedGame coupled_restriction_game() {
  const auto q = coupled_quadratic({1.0, 0.5}, {0.5, 0.5}, {0.5, 0.5});
  return wrap(q, 0.0, ActionSet::box(2, -2.0, 2.0), ActionSet::box(1, -2.0, 2.0));
}

double coupled_restriction_fbar_curvature() {
  const Eigen::Vector2d b(0.5, 0.5), c(0.5, 0.5);
  const Eigen::Matrix2d h =
      Eigen::Matrix2d::Identity() + b * c.transpose() + c * b.transpose() + c * c.transpose();
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(h).eigenvalues().maxCoeff();
}

ConstrainedGame zero_sum_game() {
  QuadraticGame q;
  q.dim_learner = 2;
  q.dim_env = 1;
  q.q_learner = Matrix::Zero(3, 3);
  q.q_learner(0, 0) = 1.0;
  q.q_learner(1, 1) = 1.0;
  q.q_learner(0, 2) = q.q_learner(2, 0) = 1.0;
  q.q_learner(2, 2) = -1.0;
  q.c_learner = Vector::Zero(3);
  q.q_env = -q.q_learner;
  q.c_env = Vector::Zero(3);
  return wrap(q, 0.0, ActionSet::box(2, -2.0, 2.0), ActionSet::box(1, -2.0, 2.0));
}

ConstrainedGame psgd_rate_game(double noise) {
  ScalarQuadratic s;
  s.b_l = 0.5;
  s.g_l = -1.0;
  s.b_e = -0.5;
  s.g_e = 0.5;
  return wrap(s.game(), noise, ActionSet::box(1, -3.0, 3.0), ActionSet::box(1, -3.0, 3.0));
}

SelectionInstance selection_instance(const std::vector<double>& nash_losses, double noise) {
  SelectionInstance out;
  out.nash_losses = nash_losses;
  for (double l : nash_losses) {
    if (!(l >= 0.0)) throw ArgumentError("arm losses must be nonnegative");
    if (l == 0.0) {
      out.arms.push_back(ActionSet::box(1, -1.0, 1.0));
    } else {
      const double lo = std::sqrt(2.0 * l);
      out.arms.push_back(ActionSet::box(1, lo, lo + 1.0));
    }
  }
  const GameSpec game = ScalarQuadratic{}.game().spec(noise);
  out.factory = [game](std::size_t, const ActionSet&) {
    return ArmProblem{game, ActionSet::box(1, -1.0, 1.0), std::nullopt};
  };
  return out;
}

SelectionInstance four_arm_instance(double gap, double noise) {
  return selection_instance({0.0, gap, 2.0 * gap, 4.0 * gap}, noise);
}

LadderInstance monotone_ladder_instance() {
  const auto q = coupled_quadratic({1.5, -1.0}, {0.3, 0.1}, {0.2, -0.3});
  const GameSpec game = q.spec();
  auto ladder = ModelClassLadder::shrinking_boxes(Vector::Zero(2), {0.25, 0.5, 1.0, 1.5, 2.0});
  GameFactory factory = [game](const ActionSet& cls) {
    return RegimeInputs{game, cls, ActionSet::box(1, -5.0, 5.0), Vector::Constant(1, 0.5), 101};
  };
  return {std::move(ladder), std::move(factory)};
}

}  // namespace modelscale::instances
