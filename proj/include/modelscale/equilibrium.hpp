#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "modelscale/action_set.hpp"
#include "modelscale/game.hpp"

namespace modelscale {

enum class Regime { kStationary, kStackelbergLeader, kStackelbergFollower, kNash };
enum class Player { kLearner, kEnv };

std::string to_string(Regime regime);
// Accepts the names produced by to_string; throws ArgumentError otherwise.
Regime parse_regime(const std::string& name);

struct EquilibriumReport {
  Regime regime = Regime::kNash;
  JointAction joint;
  double loss_learner = 0.0;
  double loss_env = 0.0;
  double nash_residual = 0.0;
  long iterations = 0;
  std::uint64_t seed = 0;
  // False when the result came from a heuristic search without a resolution
  // guarantee (Stackelberg leaders of dimension > 2).
  bool certified = true;
};

struct PsgdTrace {
  JointAction averaged_point;  // sum_t t/(T(T+1)/2) x_t over t = 1..T
  JointAction final_point;     // iterate after the T-th update
  long horizon = 0;
  std::string stepsize_schedule = "eta_t = 2/(mu(t+1))";
};

inline constexpr double kBestResponseTolerance = 1e-9;
inline constexpr double kEquilibriumTolerance = 1e-8;
inline constexpr long kMaxSolverIterations = 2'000'000;

// Projection of the origin onto learner_set x env_set.
JointAction default_start(const ActionSet& learner_set, const ActionSet& env_set);

// argmin over theta in model_class of f_l(theta, fixed_env), by projected
// gradient descent with step 1/L until the natural residual is <= tol.
EquilibriumReport stationary_optimum(const GameSpec& game, const ActionSet& model_class,
                                     const Vector& fixed_env,
                                     double tol = kEquilibriumTolerance);

// The responding player's loss minimizer over own_set given the opponent's
// action. `warm_start` seeds the descent when supplied.
Vector best_response(const GameSpec& game, Player player, const Vector& opponent_action,
                     const ActionSet& own_set, double tol = kBestResponseTolerance,
                     const Vector* warm_start = nullptr);

// Leader minimizes its loss against the follower's best response. Leaders of
// dimension <= 2 are searched on a grid_resolution^dim grid over the leader
// set's bounding box, refined by two zoom rounds; larger leaders use a
// compass search and the report is marked uncertified. Ties go to the
// lexicographically smallest grid point.
EquilibriumReport stackelberg_leader(const GameSpec& game, Player leader,
                                     const ActionSet& leader_set,
                                     const ActionSet& follower_set, int grid_resolution);

// Weights t / (T(T+1)/2), t = 1..T, used for iterate averaging.
std::vector<double> psgd_weights(long horizon);

// Projected stochastic gradient play x_{t+1} = P(x_t - eta_t F^(x_t)) with
// eta_t = 2/(mu(t+1)). Throws ArgumentError when horizon < 1 or x0 is
// infeasible.
PsgdTrace psgd_nash(const GameSpec& game, const ActionSet& learner_set,
                    const ActionSet& env_set, const JointAction& x0, long horizon,
                    std::mt19937_64& rng);

// Joint natural residual ||x - P(x - F(x))||, i.e. the Euclidean norm of the
// two players' residuals ||x_own - P_own(x_own - grad_own f_own)||. Zero
// exactly at Nash points of the convex game.
double nash_residual(const GameSpec& game, const JointAction& x,
                     const ActionSet& learner_set, const ActionSet& env_set);

// Deterministic Nash solver: extragradient iterations with step 1/(2L)
// until nash_residual <= tol.
EquilibriumReport solve_nash(const GameSpec& game, const ActionSet& learner_set,
                             const ActionSet& env_set,
                             std::optional<JointAction> x0 = std::nullopt,
                             double tol = 1e-10);

// Gauss-Seidel best-response dynamics theta <- BR_l(e), e <- BR_e(theta).
EquilibriumReport best_response_dynamics(const GameSpec& game, const ActionSet& learner_set,
                                         const ActionSet& env_set,
                                         double tol = kEquilibriumTolerance,
                                         long max_rounds = 100000);

// Evenly spaced grid over the set's bounding box, keeping contained points;
// lexicographic order with the first coordinate slowest.
std::vector<Vector> grid_points(const ActionSet& set, int resolution);

// All grid points where each player's action is an eps-best response on the
// grid to the other's.
std::vector<JointAction> grid_nash(const GameSpec& game, const ActionSet& learner_set,
                                   const ActionSet& env_set, int resolution, double eps);

// First grid point (lexicographic, learner coordinates first) that strictly
// lowers the learner's loss by more than 1e-9 without raising the
// environment's by more than 1e-12. Requires joint dimension <= 4.
std::optional<JointAction> pareto_improvement_search(const GameSpec& game,
                                                     const JointAction& x,
                                                     const ActionSet& learner_set,
                                                     const ActionSet& env_set,
                                                     int grid_resolution);

// Inputs for one model class of a scaling sweep.
struct RegimeInputs {
  GameSpec game;
  ActionSet learner_set;
  ActionSet env_set;
  Vector fixed_env;  // stationary regime only
  int grid_resolution = 101;
};

using GameFactory = std::function<RegimeInputs(const ActionSet& model_class)>;

std::vector<std::pair<std::size_t, EquilibriumReport>> scaling_curve(
    const GameFactory& factory, const ModelClassLadder& ladder, Regime regime);

// True when learner losses never increase by more than tol along the curve.
bool is_non_increasing(const std::vector<std::pair<std::size_t, EquilibriumReport>>& curve,
                       double tol);

}  // namespace modelscale
