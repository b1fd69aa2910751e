#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "modelscale/action_set.hpp"
#include "modelscale/game.hpp"

namespace modelscale {

struct ConfidenceRadius {
  double lipschitz = 1.0;
  double mu = 1.0;
  long horizon = 1;
  double delta = 0.1;
  double scale = 1.0;

  // scale * (L^2 log(1/delta) + L^3) / (mu^2 T)
  double value() const;
};

// Throws ArgumentError unless T >= 1, delta in (0,1), L, mu, scale > 0.
double confidence_radius(double lipschitz, double mu, long horizon, double delta, double scale);

struct ArmState {
  std::size_t class_index = 0;
  ActionSet action_set;
  double last_estimate = 0.0;  // f_l at the averaged PSGD point
  double last_radius = 0.0;
  long pulls = 0;              // cumulative PSGD steps
  bool active = true;
};

// Game played when the learner is restricted to one arm's class.
struct ArmProblem {
  GameSpec game;
  ActionSet env_set;
  std::optional<JointAction> x0;  // default: projection of the origin
};

using ArmFactory = std::function<ArmProblem(std::size_t index, const ActionSet& model_class)>;

struct SelectionOptions {
  double delta = 0.1;
  double alpha = 8.0;
  double scale = 1.0;
  long step_budget = 1L << 26;
  bool maximize = false;
  std::uint64_t seed = 0;
};

struct EliminationEvent {
  int epoch = 0;
  std::size_t eliminated = 0;
  double bound_gap = 0.0;  // separation between the two confidence intervals
};

struct EpochLogRow {
  int epoch = 0;
  long horizon = 0;
  std::size_t arm = 0;
  double estimate = 0.0;
  double radius = 0.0;
  bool active = true;  // still active after this epoch's elimination
};

struct SelectionReport {
  std::optional<std::size_t> winner;
  std::vector<std::size_t> survivors;
  bool inconclusive = false;
  int epochs = 0;
  long total_steps = 0;
  std::vector<EliminationEvent> elimination_log;
  std::vector<EpochLogRow> epoch_log;
  std::vector<ArmState> arms;
  double delta = 0.0;
};

// Successive elimination over model classes. Epoch tau = 1, 2, ... runs
// T = ceil(alpha 2^tau) fresh PSGD steps per active arm and drops arm i when
// another arm's upper confidence bound lies below i's lower bound (lower
// loss is better unless options.maximize). Each (epoch, arm) pair draws its
// noise from its own stream seeded by (seed, epoch, arm). Stops when one arm
// remains or the next epoch would exceed step_budget; in the latter case all
// survivors are returned and the report is marked inconclusive.
SelectionReport successive_elimination(const std::vector<ActionSet>& arms,
                                       const ArmFactory& factory,
                                       const SelectionOptions& options);

struct GapSummary {
  std::vector<double> gaps;
  std::optional<double> min_gap;  // empty when every loss ties the best
};

// gaps_i = loss_i - min loss; min_gap is the smallest nonzero gap.
GapSummary suboptimality_gaps(const std::vector<double>& losses);

}  // namespace modelscale
