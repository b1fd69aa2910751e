#pragma once

// Strategic linear regression with x ~ N(0, I), labels y = beta'x, and a
// population that shifts every input by e = k beta / ||beta||. Two learner
// classes: the small model phi(x) = theta'x and the large model
// phi(x) = theta_1'x + theta_2 exp(-||x||^2), both fitted on x + e.

#include <vector>

#include "modelscale/action_set.hpp"

namespace modelscale {

enum class RegressionClass { kSmall, kLarge };

const char* to_string(RegressionClass c);

struct RegressionInstance {
  Vector beta;
  double k_min = -10.0;
  double k_max = 10.0;

  int dim() const { return static_cast<int>(beta.size()); }
  // Throws ArgumentError for beta = 0, non-finite entries or k_min > k_max.
  void validate() const;
  Vector env_action(double k) const;  // k beta / ||beta||
};

struct LargeModelClosedForm {
  double m = 0.0;  // (1/3)^(d/2+1) exp(-k^2/3)
  double y = 0.0;  // (1/5)^(d/2) exp(-2k^2/5)
  double z = 0.0;
  double c = 0.0;  // theta_1 = c beta
  double p = 0.0;  // theta_2 = p ||beta||
};

struct LargeModelFit {
  Vector theta1;
  double theta2 = 0.0;
};

struct StackelbergOutcome {
  RegressionClass model_class = RegressionClass::kSmall;
  double k_star = 0.0;
  double learner_loss = 0.0;
  double env_objective = 0.0;  // value of the population's objective at k_star
};

// (I - e e' / (1 + ||e||^2)) beta.
Vector small_model_best_theta(const RegressionInstance& inst, double k);
// Population squared loss of the small model's best response: ||beta||^2 k^2 / (1 + k^2).
double small_model_learner_loss(const RegressionInstance& inst, double k);
// E[phi(x + e)] at the best response: k ||beta|| / (1 + k^2).
double small_model_env_objective(const RegressionInstance& inst, double k);
// Maximizes the population objective over [k_min, k_max] exactly.
StackelbergOutcome small_model_equilibrium(const RegressionInstance& inst);

LargeModelClosedForm large_model_closed_form(int dim, double k);
LargeModelFit large_model_best_theta(const RegressionInstance& inst, double k);
// (1 - 2c + c^2 + c^2 k^2 + 2pmck + 4pmk + p^2 y) ||beta||^2
double large_model_learner_loss(const RegressionInstance& inst, double k);
// ||beta|| (c k + 3 m p)
double large_model_env_objective(const RegressionInstance& inst, double k);

struct KSearchOptions {
  double resolution = 1e-3;
  int zoom_rounds = 2;  // each round refines the spacing tenfold
};

// Grid maximization of the population objective followed by zoom rounds.
// Ties go to the smallest k.
StackelbergOutcome large_model_equilibrium(const RegressionInstance& inst,
                                           const KSearchOptions& options = {});

struct ClassComparison {
  StackelbergOutcome small;
  StackelbergOutcome large;
  bool reverse_scaling = false;  // large loss > small loss at the equilibria
  bool pointwise_dominance = false;
  double max_pointwise_excess = 0.0;  // max over the grid of large(k) - small(k)
};

ClassComparison compare_model_classes(const RegressionInstance& inst,
                                      const KSearchOptions& options = {});

struct RegressionCurveRow {
  double k = 0.0;
  double small_loss = 0.0;
  double large_loss = 0.0;
  double env_obj_small = 0.0;
  double env_obj_large = 0.0;
};

// Both classes evaluated on an evenly spaced grid of `points` values over
// [k_min, k_max].
std::vector<RegressionCurveRow> loss_curve(const RegressionInstance& inst, int points);

}  // namespace modelscale
