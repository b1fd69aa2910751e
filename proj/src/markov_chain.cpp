#include "modelscale/markov_chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "modelscale/errors.hpp"

namespace modelscale {

namespace {

double mix(const StageRewards& r, double p, int b) { return p * r[0][b] + (1.0 - p) * r[1][b]; }

void check_p_bar(double p_bar) {
  if (!(p_bar >= 0.5 && p_bar <= 1.0)) throw ArgumentError("p_bar must lie in [0.5, 1]");
}

int next_state(int n, int s, EnvAction b) {
  return b == EnvAction::kAdvance && s + 1 < n ? s + 1 : s;
}

// Exact evaluation of a deterministic chain: every state either loops on
// itself or moves one step forward, so values follow by back substitution.
std::vector<double> chain_values(int n, double gamma, const std::vector<double>& stage,
                                 const std::vector<EnvAction>& policy) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int s = n - 1; s >= 0; --s) {
    const int nxt = next_state(n, s, policy[s]);
    v[s] = nxt == s ? stage[s] / (1.0 - gamma) : stage[s] + gamma * v[nxt];
  }
  return v;
}

void check_policy(const MarkovChainGame& game, const std::vector<EnvAction>& policy) {
  if (static_cast<int>(policy.size()) != game.n_states) {
    throw ArgumentError("environment policy must have one action per state");
  }
}

// Policy predicted by the advance rule.
std::vector<EnvAction> advance_rule(const MarkovChainGame& game, double p) {
  std::vector<EnvAction> out(static_cast<std::size_t>(game.n_states));
  for (int s = 0; s < game.n_states; ++s) {
    out[s] = p < game.thresholds[s] ? EnvAction::kAdvance : EnvAction::kStay;
  }
  return out;
}

}  // namespace

void MarkovChainGame::validate() const {
  if (n_states < 1) throw ArgumentError("chain needs at least one state");
  const auto n = static_cast<std::size_t>(n_states);
  if (learner_rewards.size() != n || env_rewards.size() != n || thresholds.size() != n) {
    throw ArgumentError("rewards and thresholds need one entry per state");
  }
  if (!(gamma_l >= 0.0 && gamma_l < 1.0 && gamma_e >= 0.0 && gamma_e < 1.0)) {
    throw ArgumentError("discount factors must lie in [0, 1)");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(thresholds[i] > 0.5 && thresholds[i] <= 1.0)) {
      throw ArgumentError("threshold of state " + std::to_string(i + 1) + " must lie in (0.5, 1]");
    }
    if (i > 0 && !(thresholds[i] < thresholds[i - 1])) {
      throw ArgumentError("thresholds must be strictly decreasing (state " + std::to_string(i + 1) +
                          ")");
    }
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        if (!std::isfinite(learner_rewards[i][a][b]) || !std::isfinite(env_rewards[i][a][b])) {
          throw ArgumentError("rewards must be finite");
        }
      }
    }
  }
}

std::vector<double> default_thresholds(int n) {
  if (n < 1) throw ArgumentError("chain needs at least one state");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) out[i - 1] = 0.5 + 0.45 * (n - i + 1) / n;
  return out;
}

MarkovChainGame build_chain_game(int n, const std::vector<double>& thresholds,
                                 const RewardProfile& profile, double gamma_l, double gamma_e) {
  MarkovChainGame g;
  g.n_states = n;
  g.thresholds = thresholds;
  g.gamma_l = gamma_l;
  g.gamma_e = gamma_e;
  if (n < 1) throw ArgumentError("chain needs at least one state");
  const auto un = static_cast<std::size_t>(n);
  if (!profile.learner_level.empty() && profile.learner_level.size() != un) {
    throw ArgumentError("learner reward levels need one entry per state");
  }
  if (!profile.env_stay.empty() && profile.env_stay.size() != un) {
    throw ArgumentError("environment stay rewards need one entry per state");
  }
  if (!(profile.learner_margin > 0.0)) {
    throw ArgumentError("learner margin must be positive so action 0 dominates");
  }
  g.learner_rewards.resize(un);
  g.env_rewards.resize(un);
  for (int s = 0; s < n; ++s) {
    const double level = profile.learner_level.empty() ? s + 1.0 : profile.learner_level[s];
    g.learner_rewards[s] = {{{level, level}, {level - profile.learner_margin, level - profile.learner_margin}}};
    StageRewards r{};
    if (!profile.env_stay.empty()) {
      r[0][0] = profile.env_stay[s][0][0];
      r[1][0] = profile.env_stay[s][1][0];
    }
    r[1][1] = profile.env_advance_reward;
    g.env_rewards[s] = r;
  }
  g.validate();

  // At p = p*_i every later state has a lower threshold, so the environment
  // stays there forever and the continuation is a geometric series.
  const double ge = gamma_e;
  for (int s = n - 1; s >= 0; --s) {
    const double p = thresholds[s];
    const auto& r = g.env_rewards[s];
    double target;
    if (s == n - 1) {
      target = mix(r, p, 0);
    } else {
      const double stay_forever = mix(r, p, 0) / (1.0 - ge);
      const double next_stay = mix(g.env_rewards[s + 1], p, 0) / (1.0 - ge);
      target = stay_forever - ge * next_stay;
    }
    g.env_rewards[s][0][1] = (target - (1.0 - p) * r[1][1]) / p;
  }

  // Check the advance rule between and just beside every threshold.
  std::vector<double> probes{0.5, 1.0};
  for (int s = 0; s < n; ++s) {
    const double t = thresholds[s];
    probes.push_back(std::max(0.5, t - 1e-6));
    if (t + 1e-6 <= 1.0) probes.push_back(t + 1e-6);
    const double next = s + 1 < n ? thresholds[s + 1] : 0.5;
    probes.push_back(0.5 * (t + next));
  }
  for (double p : probes) {
    const auto br = env_best_response_mdp(g, p);
    const auto expected = advance_rule(g, p);
    for (int s = 0; s < n; ++s) {
      if (br.policy[s] != expected[s]) {
        throw AssumptionError("calibration failed at state " + std::to_string(s + 1) +
                              ": advance rule violated at p = " + std::to_string(p));
      }
    }
  }
  return g;
}

MarkovChainGame build_chain_game(int n, double gamma) {
  return build_chain_game(n, default_thresholds(n), RewardProfile{}, gamma, gamma);
}

EnvBestResponse env_best_response_mdp(const MarkovChainGame& game, double p_bar) {
  game.validate();
  check_p_bar(p_bar);
  const int n = game.n_states;
  const double g = game.gamma_e;
  std::vector<double> stay(static_cast<std::size_t>(n)), adv(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    stay[s] = mix(game.env_rewards[s], p_bar, 0);
    adv[s] = mix(game.env_rewards[s], p_bar, 1);
  }
  auto q = [&](const std::vector<double>& v, int s, EnvAction b) {
    const double r = b == EnvAction::kStay ? stay[s] : adv[s];
    return r + g * v[next_state(n, s, b)];
  };

  EnvBestResponse out;
  std::vector<double> v(static_cast<std::size_t>(n), 0.0), next(v.size());
  const int cap = 10'000'000 / std::max(1, n);
  for (out.iterations = 1; out.iterations <= cap; ++out.iterations) {
    double change = 0.0;
    for (int s = 0; s < n; ++s) {
      next[s] = std::max(q(v, s, EnvAction::kStay), q(v, s, EnvAction::kAdvance));
      change = std::max(change, std::abs(next[s] - v[s]));
    }
    v.swap(next);
    if (change <= kValueIterationTolerance) break;
  }

  out.policy.resize(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    const double qs = q(v, s, EnvAction::kStay);
    const double qa = q(v, s, EnvAction::kAdvance);
    const double tie = 1e-9 * std::max({1.0, std::abs(qs), std::abs(qa)});
    out.policy[s] = qa > qs + tie ? EnvAction::kAdvance : EnvAction::kStay;
  }
  std::vector<double> stage(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) stage[s] = out.policy[s] == EnvAction::kStay ? stay[s] : adv[s];
  out.values = chain_values(n, g, stage, out.policy);
  for (int s = 0; s < n; ++s) {
    const double best = std::max(q(out.values, s, EnvAction::kStay), q(out.values, s, EnvAction::kAdvance));
    out.bellman_residual = std::max(out.bellman_residual, std::abs(best - out.values[s]));
  }
  return out;
}

double learner_value(const MarkovChainGame& game, const std::vector<double>& learner_p,
                     const std::vector<EnvAction>& env_policy, int start_state) {
  game.validate();
  check_policy(game, env_policy);
  const int n = game.n_states;
  if (static_cast<int>(learner_p.size()) != n) throw ArgumentError("learner policy needs one entry per state");
  if (start_state < 0 || start_state >= n) throw ArgumentError("start state out of range");
  std::vector<double> stage(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    if (!(learner_p[s] >= 0.0 && learner_p[s] <= 1.0)) throw ArgumentError("learner probabilities must lie in [0, 1]");
    stage[s] = mix(game.learner_rewards[s], learner_p[s], static_cast<int>(env_policy[s]));
  }
  return chain_values(n, game.gamma_l, stage, env_policy)[start_state];
}

double learner_value(const MarkovChainGame& game, double p_bar,
                     const std::vector<EnvAction>& env_policy) {
  check_p_bar(p_bar);
  return learner_value(game, std::vector<double>(static_cast<std::size_t>(game.n_states), p_bar),
                       env_policy, 0);
}

double env_value(const MarkovChainGame& game, double p_bar,
                 const std::vector<EnvAction>& env_policy) {
  game.validate();
  check_p_bar(p_bar);
  check_policy(game, env_policy);
  std::vector<double> stage(static_cast<std::size_t>(game.n_states));
  for (int s = 0; s < game.n_states; ++s) {
    stage[s] = mix(game.env_rewards[s], p_bar, static_cast<int>(env_policy[s]));
  }
  return chain_values(game.n_states, game.gamma_e, stage, env_policy)[0];
}

int absorbing_state(const std::vector<EnvAction>& env_policy) {
  if (env_policy.empty()) throw ArgumentError("empty environment policy");
  for (std::size_t s = 0; s < env_policy.size(); ++s) {
    if (env_policy[s] == EnvAction::kStay) return static_cast<int>(s);
  }
  return static_cast<int>(env_policy.size()) - 1;
}

DominanceCheck verify_dominance(const MarkovChainGame& game, double p_bar,
                                const std::vector<EnvAction>& env_policy) {
  check_p_bar(p_bar);
  const int n = game.n_states;
  DominanceCheck out;
  // At p_bar = 0.5 the class is a single policy and there is nothing to deviate to.
  if (p_bar == 0.5) {
    out.dominant = true;
    return out;
  }
  std::vector<double> base(static_cast<std::size_t>(n), p_bar);
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n; ++s) {
    auto dev = base;
    dev[s] = 1.0 - p_bar;
    const double drop = learner_value(game, base, env_policy, s) - learner_value(game, dev, env_policy, s);
    if (drop < out.worst_margin) {
      out.worst_margin = drop;
      out.worst_state = s;
    }
  }
  out.dominant = out.worst_margin > 0.0;
  return out;
}

ChainEquilibrium chain_equilibrium(const MarkovChainGame& game, double p_bar) {
  const auto br = env_best_response_mdp(game, p_bar);
  ChainEquilibrium eq;
  eq.p_bar = p_bar;
  eq.learner_policy.assign(static_cast<std::size_t>(game.n_states), p_bar);
  eq.env_policy = br.policy;
  eq.learner_value = learner_value(game, p_bar, br.policy);
  eq.env_value = br.values[0];
  eq.absorbing_state = absorbing_state(br.policy);
  eq.bellman_residual = br.bellman_residual;
  eq.dominance = verify_dominance(game, p_bar, br.policy);
  return eq;
}

std::vector<ChainEquilibrium> payoff_sweep(const MarkovChainGame& game,
                                           const std::vector<double>& p_bar_grid) {
  std::vector<ChainEquilibrium> out;
  out.reserve(p_bar_grid.size());
  for (double p : p_bar_grid) out.push_back(chain_equilibrium(game, p));
  return out;
}

RolloutEstimate rollout_learner_value(const MarkovChainGame& game, double p_bar,
                                      const std::vector<EnvAction>& env_policy, long episodes,
                                      int horizon, std::uint64_t seed) {
  game.validate();
  check_p_bar(p_bar);
  check_policy(game, env_policy);
  if (episodes < 2 || horizon < 1) throw ArgumentError("rollouts need at least two episodes and one step");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution plays_zero(p_bar);
  double sum = 0.0, sum_sq = 0.0;
  for (long ep = 0; ep < episodes; ++ep) {
    int s = 0;
    double ret = 0.0, disc = 1.0;
    for (int t = 0; t < horizon; ++t) {
      const int a = plays_zero(rng) ? 0 : 1;
      const EnvAction b = env_policy[s];
      ret += disc * game.learner_rewards[s][a][static_cast<int>(b)];
      s = next_state(game.n_states, s, b);
      disc *= game.gamma_l;
    }
    sum += ret;
    sum_sq += ret * ret;
  }
  const double n = static_cast<double>(episodes);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n), episodes};
}

}  // namespace modelscale
