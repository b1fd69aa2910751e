#pragma once

// Chain Markov game. States s_1..s_n (indexed 0..n-1 here); the learner
// plays action 0 with probability p in [1 - p_bar, p_bar], the environment
// either stays (b = 0) or advances (b = 1) to the next state, which is
// absorbing at s_n. Both players maximize discounted reward.

#include <array>
#include <cstdint>
#include <vector>

namespace modelscale {

enum class EnvAction { kStay = 0, kAdvance = 1 };

// Rewards indexed [a][b].
using StageRewards = std::array<std::array<double, 2>, 2>;

struct MarkovChainGame {
  int n_states = 0;
  std::vector<StageRewards> learner_rewards;
  std::vector<StageRewards> env_rewards;
  double gamma_l = 0.9;
  double gamma_e = 0.9;
  std::vector<double> thresholds;  // p*_1 > p*_2 > ... > p*_n > 0.5

  // Throws ArgumentError on shape, discount or threshold violations.
  // Dominance of action 0 is checked by build_chain_game and
  // verify_dominance, so hand-built negative controls stay representable.
  void validate() const;
};

// Entries not solved for by the calibration.
struct RewardProfile {
  std::vector<double> learner_level;  // R_l(s_i, 0, b); empty means level_i = i
  double learner_margin = 1.0;        // R_l(s_i, 0, b) - R_l(s_i, 1, b)
  double env_advance_reward = 1.0;    // R_e(s_i, 1, 1)
  std::vector<StageRewards> env_stay;  // R_e(s_i, a, 0) in [a][0]; empty means zero
};

// p*_i = 0.5 + 0.45 (n - i + 1) / n.
std::vector<double> default_thresholds(int n);

// Solves R_e(s_i, 0, 1) so that the environment is indifferent between
// staying and advancing exactly at p = p*_i, then checks the advance rule
// on both sides of every threshold. Throws AssumptionError naming the first
// state where the rule fails.
MarkovChainGame build_chain_game(int n, const std::vector<double>& thresholds,
                                 const RewardProfile& profile, double gamma_l, double gamma_e);
MarkovChainGame build_chain_game(int n, double gamma);

struct EnvBestResponse {
  std::vector<EnvAction> policy;
  std::vector<double> values;   // environment's optimal values per state
  double bellman_residual = 0.0;
  int iterations = 0;
};

constexpr double kValueIterationTolerance = 1e-12;

// Value iteration on the environment's MDP with the learner fixed at p
// everywhere. Ties go to stay.
EnvBestResponse env_best_response_mdp(const MarkovChainGame& game, double p_bar);

// Exact discounted value from s_1 for a per-state learner probability and
// a deterministic environment policy.
double learner_value(const MarkovChainGame& game, const std::vector<double>& learner_p,
                     const std::vector<EnvAction>& env_policy, int start_state = 0);
double learner_value(const MarkovChainGame& game, double p_bar,
                     const std::vector<EnvAction>& env_policy);
double env_value(const MarkovChainGame& game, double p_bar,
                 const std::vector<EnvAction>& env_policy);

// Index of the state where play settles when starting from s_1.
int absorbing_state(const std::vector<EnvAction>& env_policy);

struct DominanceCheck {
  bool dominant = false;
  double worst_margin = 0.0;  // smallest value drop over single-state deviations
  int worst_state = 0;
};

// Moves the learner to 1 - p_bar in one state at a time and measures the
// value drop from that state.
DominanceCheck verify_dominance(const MarkovChainGame& game, double p_bar,
                                const std::vector<EnvAction>& env_policy);

struct ChainEquilibrium {
  double p_bar = 0.0;
  std::vector<double> learner_policy;
  std::vector<EnvAction> env_policy;
  double learner_value = 0.0;
  double env_value = 0.0;
  int absorbing_state = 0;
  double bellman_residual = 0.0;
  DominanceCheck dominance;
};

ChainEquilibrium chain_equilibrium(const MarkovChainGame& game, double p_bar);

std::vector<ChainEquilibrium> payoff_sweep(const MarkovChainGame& game,
                                           const std::vector<double>& p_bar_grid);

struct RolloutEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  long episodes = 0;
};

// Monte Carlo estimate of the learner's discounted return from s_1,
// truncated at `horizon` steps.
RolloutEstimate rollout_learner_value(const MarkovChainGame& game, double p_bar,
                                      const std::vector<EnvAction>& env_policy, long episodes,
                                      int horizon, std::uint64_t seed);

}  // namespace modelscale
