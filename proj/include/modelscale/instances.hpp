#pragma once

// Shipped game instances used by the experiments, the acceptance run and
// the tests.

#include <vector>

#include "modelscale/action_set.hpp"
#include "modelscale/equilibrium.hpp"
#include "modelscale/game.hpp"
#include "modelscale/model_selection.hpp"

namespace modelscale::instances {

struct ConstrainedGame {
  QuadraticGame quadratic;
  GameSpec game;
  ActionSet learner_set;
  ActionSet env_set;
};

// theta in R^2, e in R:
//   f_l = 1/2 ||theta - a||^2 + e b'theta + 1/2 e^2,  f_e = 1/2 e^2 - e c'theta
// with a = (1, 0.5), b = c = (0.5, 0.5) on [-2, 2]^2 x [-2, 2]. The Nash
// point (0.75, 0.25; 0.5) is interior and not Pareto optimal.
ConstrainedGame coupled_restriction_game();

// Zero-sum control: f_l = 1/2 ||theta||^2 + theta_1 e - 1/2 e^2, f_e = -f_l.
ConstrainedGame zero_sum_game();

// Scalar game f_l = 1/2 th^2 + th e / 2 - th, f_e = 1/2 e^2 - th e / 2 + e / 2
// on [-3, 3]^2 with closed-form interior Nash.
ConstrainedGame psgd_rate_game(double noise);

// Curvature of the composed learner loss of coupled_restriction_game along
// any unit direction is at most this value (largest eigenvalue of
// I + b c' + c b' + c c').
double coupled_restriction_fbar_curvature();

struct SelectionInstance {
  std::vector<ActionSet> arms;
  ArmFactory factory;
  std::vector<double> nash_losses;
};

// f_l = 1/2 th^2, f_e = 1/2 e^2 with noise sigma and E = [-1, 1]. Arm i is
// the box [sqrt(2 l_i), sqrt(2 l_i) + 1] (the box [-1, 1] when l_i = 0), so
// its Nash learner loss is exactly l_i.
SelectionInstance selection_instance(const std::vector<double>& nash_losses, double noise);

// Arm losses {0, gap, 2 gap, 4 gap}.
SelectionInstance four_arm_instance(double gap, double noise);

struct LadderInstance {
  ModelClassLadder ladder;
  GameFactory factory;
};

// Five nested boxes of half-width {0.25, 0.5, 1, 1.5, 2} about the origin,
// with a learner-leads game whose committed optimum lies outside the three
// smallest boxes.
LadderInstance monotone_ladder_instance();

}  // namespace modelscale::instances
