#include "modelscale/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "modelscale/errors.hpp"

namespace modelscale {

namespace {

struct Descent {
  Vector point;
  long iterations = 0;
};

Vector own_gradient(const GameSpec& game, Player player, const Vector& own, const Vector& opp) {
  Vector g = player == Player::kLearner ? game.grad_learner(own, opp) : game.grad_env(opp, own);
  if (!g.allFinite()) throw NumericError("best-response gradient is not finite");
  return g;
}

double own_loss(const GameSpec& game, Player player, const Vector& own, const Vector& opp) {
  return player == Player::kLearner ? game.loss_learner(own, opp) : game.loss_env(opp, own);
}

// Projected gradient descent with step 1/L. Since ||x - P(x - t g)|| / t is
// non-increasing in t and ||x - P(x - t g)|| non-decreasing, the unit-step
// residual is at most max(1, L) times the length of a 1/L step.
Descent projected_descent(const GameSpec& game, Player player, const Vector& opp,
                          const ActionSet& own_set, double tol, const Vector* warm) {
  const double step = 1.0 / game.lipschitz;
  const double scale = std::max(1.0, game.lipschitz);
  Vector x = warm != nullptr ? own_set.project(*warm)
                             : own_set.project(Vector::Zero(own_set.dimension()));
  for (long k = 1; k <= kMaxSolverIterations; ++k) {
    Vector next = own_set.project(x - step * own_gradient(game, player, x, opp));
    const double moved = (next - x).norm();
    x = std::move(next);
    if (scale * moved <= tol) return {x, k};
  }
  throw NonConvergenceError("projected gradient descent hit the iteration cap");
}

double player_residual(const GameSpec& game, Player player, const Vector& own, const Vector& opp,
                       const ActionSet& own_set) {
  return (own - own_set.project(own - own_gradient(game, player, own, opp))).norm();
}

void fill_losses(const GameSpec& game, EquilibriumReport& report) {
  report.loss_learner = game.loss_learner(report.joint.theta, report.joint.env);
  report.loss_env = game.loss_env(report.joint.theta, report.joint.env);
  if (!std::isfinite(report.loss_learner) || !std::isfinite(report.loss_env)) {
    throw NumericError("equilibrium losses are not finite");
  }
}

JointAction project_joint(const JointAction& x, const ActionSet& learner_set,
                          const ActionSet& env_set) {
  return {learner_set.project(x.theta), env_set.project(x.env)};
}

// Row-major enumeration of a resolution^dim grid over [lo, hi].
std::vector<Vector> box_grid(const Vector& lo, const Vector& hi, int resolution) {
  const auto dim = lo.size();
  std::size_t total = 1;
  for (Eigen::Index i = 0; i < dim; ++i) total *= static_cast<std::size_t>(resolution);
  std::vector<Vector> out;
  out.reserve(total);
  std::vector<int> idx(dim, 0);
  for (std::size_t n = 0; n < total; ++n) {
    Vector p(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      p[i] = resolution == 1 ? 0.5 * (lo[i] + hi[i])
                             : lo[i] + (hi[i] - lo[i]) * idx[i] / (resolution - 1);
    }
    out.push_back(std::move(p));
    for (auto i = dim - 1; i >= 0; --i) {
      if (++idx[i] < resolution) break;
      idx[i] = 0;
    }
  }
  return out;
}

struct LeaderEval {
  double loss;
  Vector follower;
};

}  // namespace

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::kStationary: return "stationary";
    case Regime::kStackelbergLeader: return "stackelberg_leader";
    case Regime::kStackelbergFollower: return "stackelberg_follower";
    case Regime::kNash: return "nash";
  }
  return "nash";
}

Regime parse_regime(const std::string& name) {
  for (Regime r : {Regime::kStationary, Regime::kStackelbergLeader,
                   Regime::kStackelbergFollower, Regime::kNash}) {
    if (to_string(r) == name) return r;
  }
  throw ArgumentError("unknown regime '" + name + "'");
}

JointAction default_start(const ActionSet& learner_set, const ActionSet& env_set) {
  return {learner_set.project(Vector::Zero(learner_set.dimension())),
          env_set.project(Vector::Zero(env_set.dimension()))};
}

EquilibriumReport stationary_optimum(const GameSpec& game, const ActionSet& model_class,
                                     const Vector& fixed_env, double tol) {
  if (model_class.dimension() != game.dim_learner || fixed_env.size() != game.dim_env) {
    throw ArgumentError("stationary_optimum: dimension mismatch");
  }
  const Descent d = projected_descent(game, Player::kLearner, fixed_env, model_class, tol, nullptr);
  EquilibriumReport report;
  report.regime = Regime::kStationary;
  report.joint = {d.point, fixed_env};
  report.iterations = d.iterations;
  report.nash_residual = player_residual(game, Player::kLearner, d.point, fixed_env, model_class);
  fill_losses(game, report);
  return report;
}

Vector best_response(const GameSpec& game, Player player, const Vector& opponent_action,
                     const ActionSet& own_set, double tol, const Vector* warm_start) {
  const int own_dim = player == Player::kLearner ? game.dim_learner : game.dim_env;
  const int opp_dim = player == Player::kLearner ? game.dim_env : game.dim_learner;
  if (own_set.dimension() != own_dim || opponent_action.size() != opp_dim) {
    throw ArgumentError("best_response: dimension mismatch");
  }
  return projected_descent(game, player, opponent_action, own_set, tol, warm_start).point;
}

EquilibriumReport stackelberg_leader(const GameSpec& game, Player leader,
                                     const ActionSet& leader_set,
                                     const ActionSet& follower_set, int grid_resolution) {
  if (grid_resolution < 1) throw ArgumentError("grid_resolution must be positive");
  const Player follower = leader == Player::kLearner ? Player::kEnv : Player::kLearner;
  // Tighter than the public tolerance so follower error does not blur grid ties.
  constexpr double kInnerTol = 1e-12;
  long evaluations = 0;
  Vector warm = follower_set.project(Vector::Zero(follower_set.dimension()));
  auto evaluate = [&](const Vector& a) {
    ++evaluations;
    Vector br = projected_descent(game, follower, a, follower_set, kInnerTol, &warm).point;
    warm = br;
    return LeaderEval{own_loss(game, leader, a, br), std::move(br)};
  };

  Vector best_action;
  LeaderEval best{std::numeric_limits<double>::infinity(), {}};
  bool certified = true;

  if (leader_set.dimension() <= 2) {
    auto [lo, hi] = leader_set.bounding_box();
    const Vector full_lo = lo, full_hi = hi;
    for (int round = 0; round < 3; ++round) {
      const Vector spacing =
          grid_resolution > 1 ? Vector((hi - lo) / (grid_resolution - 1)) : Vector(hi - lo);
      bool any = false;
      for (const Vector& p : box_grid(lo, hi, grid_resolution)) {
        if (!leader_set.contains(p, 1e-12)) continue;
        any = true;
        LeaderEval e = evaluate(p);
        if (e.loss < best.loss) {
          best = std::move(e);
          best_action = p;
        }
      }
      if (!any && best_action.size() == 0) {
        best_action = leader_set.project(0.5 * (lo + hi));
        best = evaluate(best_action);
      }
      if (grid_resolution == 1) break;
      lo = (best_action - spacing).cwiseMax(full_lo);
      hi = (best_action + spacing).cwiseMin(full_hi);
    }
  } else {
    // Compass search from the projected origin; halves the step on failure.
    certified = false;
    best_action = leader_set.project(Vector::Zero(leader_set.dimension()));
    best = evaluate(best_action);
    auto [lo, hi] = leader_set.bounding_box();
    double step = 0.25 * (hi - lo).maxCoeff();
    while (step > 1e-9 && evaluations < 200000) {
      bool improved = false;
      for (int i = 0; i < leader_set.dimension() && !improved; ++i) {
        for (double sign : {1.0, -1.0}) {
          Vector cand = best_action;
          cand[i] += sign * step;
          cand = leader_set.project(cand);
          LeaderEval e = evaluate(cand);
          if (e.loss < best.loss - 1e-15) {
            best = std::move(e);
            best_action = cand;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
  }

  EquilibriumReport report;
  report.regime =
      leader == Player::kLearner ? Regime::kStackelbergLeader : Regime::kStackelbergFollower;
  const Vector response = best_response(game, follower, best_action, follower_set);
  report.joint = leader == Player::kLearner ? JointAction{best_action, response}
                                            : JointAction{response, best_action};
  report.iterations = evaluations;
  report.certified = certified;
  const ActionSet& learner_set = leader == Player::kLearner ? leader_set : follower_set;
  const ActionSet& env_set = leader == Player::kLearner ? follower_set : leader_set;
  report.nash_residual = nash_residual(game, report.joint, learner_set, env_set);
  fill_losses(game, report);
  return report;
}

std::vector<double> psgd_weights(long horizon) {
  if (horizon < 1) throw ArgumentError("horizon must be at least 1");
  const double total = 0.5 * static_cast<double>(horizon) * static_cast<double>(horizon + 1);
  std::vector<double> w(static_cast<std::size_t>(horizon));
  for (long t = 1; t <= horizon; ++t) w[t - 1] = static_cast<double>(t) / total;
  return w;
}

PsgdTrace psgd_nash(const GameSpec& game, const ActionSet& learner_set,
                    const ActionSet& env_set, const JointAction& x0, long horizon,
                    std::mt19937_64& rng) {
  if (horizon < 1) throw ArgumentError("horizon must be at least 1");
  if (x0.theta.size() != game.dim_learner || x0.env.size() != game.dim_env) {
    throw ArgumentError("psgd_nash: x0 dimension mismatch");
  }
  if (!learner_set.contains(x0.theta) || !env_set.contains(x0.env)) {
    throw ArgumentError("psgd_nash: x0 is not feasible");
  }
  JointAction x = project_joint(x0, learner_set, env_set);
  const double total = 0.5 * static_cast<double>(horizon) * static_cast<double>(horizon + 1);
  Vector sum = Vector::Zero(game.joint_dim());
  for (long t = 1; t <= horizon; ++t) {
    sum += static_cast<double>(t) * x.stacked();
    const double eta = 2.0 / (game.mu * static_cast<double>(t + 1));
    const Vector f = noisy_gradient_operator(game, x, rng);
    x.theta = learner_set.project(x.theta - eta * f.head(game.dim_learner));
    x.env = env_set.project(x.env - eta * f.tail(game.dim_env));
  }
  PsgdTrace trace;
  trace.averaged_point = JointAction::split(sum / total, game.dim_learner);
  trace.final_point = x;
  trace.horizon = horizon;
  return trace;
}

double nash_residual(const GameSpec& game, const JointAction& x,
                     const ActionSet& learner_set, const ActionSet& env_set) {
  const double rl = player_residual(game, Player::kLearner, x.theta, x.env, learner_set);
  const double re = player_residual(game, Player::kEnv, x.env, x.theta, env_set);
  return std::hypot(rl, re);
}

EquilibriumReport solve_nash(const GameSpec& game, const ActionSet& learner_set,
                             const ActionSet& env_set, std::optional<JointAction> x0,
                             double tol) {
  game.validate();
  JointAction x = x0 ? project_joint(*x0, learner_set, env_set)
                     : default_start(learner_set, env_set);
  const double eta = 0.5 / game.lipschitz;
  const double scale = std::max(1.0, 1.0 / eta);
  const int dl = game.dim_learner;
  for (long k = 1; k <= kMaxSolverIterations; ++k) {
    const Vector fx = gradient_operator(game, x);
    JointAction y{learner_set.project(x.theta - eta * fx.head(dl)),
                  env_set.project(x.env - eta * fx.tail(game.dim_env))};
    const double gap = (y.stacked() - x.stacked()).norm();
    if (scale * gap <= tol) {
      EquilibriumReport report;
      report.regime = Regime::kNash;
      report.joint = x;
      report.iterations = k;
      report.nash_residual = nash_residual(game, x, learner_set, env_set);
      fill_losses(game, report);
      return report;
    }
    const Vector fy = gradient_operator(game, y);
    x.theta = learner_set.project(x.theta - eta * fy.head(dl));
    x.env = env_set.project(x.env - eta * fy.tail(game.dim_env));
  }
  throw NonConvergenceError("Nash solver hit the iteration cap");
}

EquilibriumReport best_response_dynamics(const GameSpec& game, const ActionSet& learner_set,
                                         const ActionSet& env_set, double tol,
                                         long max_rounds) {
  JointAction x = default_start(learner_set, env_set);
  for (long round = 1; round <= max_rounds; ++round) {
    const JointAction prev = x;
    x.theta = best_response(game, Player::kLearner, x.env, learner_set, 1e-12, &x.theta);
    x.env = best_response(game, Player::kEnv, x.theta, env_set, 1e-12, &x.env);
    const double res = nash_residual(game, x, learner_set, env_set);
    if (res <= tol || (x.stacked() - prev.stacked()).norm() <= 1e-15) {
      EquilibriumReport report;
      report.regime = Regime::kNash;
      report.joint = x;
      report.iterations = round;
      report.nash_residual = res;
      fill_losses(game, report);
      if (res > tol) throw NonConvergenceError("best-response dynamics stalled");
      return report;
    }
  }
  throw NonConvergenceError("best-response dynamics did not converge");
}

std::vector<Vector> grid_points(const ActionSet& set, int resolution) {
  if (resolution < 1) throw ArgumentError("grid resolution must be positive");
  auto [lo, hi] = set.bounding_box();
  std::vector<Vector> out;
  for (Vector& p : box_grid(lo, hi, resolution)) {
    if (set.contains(p, 1e-12)) out.push_back(std::move(p));
  }
  return out;
}

std::vector<JointAction> grid_nash(const GameSpec& game, const ActionSet& learner_set,
                                   const ActionSet& env_set, int resolution, double eps) {
  const auto thetas = grid_points(learner_set, resolution);
  const auto envs = grid_points(env_set, resolution);
  const std::size_t nt = thetas.size(), ne = envs.size();
  std::vector<double> fl(nt * ne), fe(nt * ne);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < ne; ++j) {
      fl[i * ne + j] = game.loss_learner(thetas[i], envs[j]);
      fe[i * ne + j] = game.loss_env(thetas[i], envs[j]);
    }
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> best_l(ne, kInf), best_e(nt, kInf);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < ne; ++j) {
      best_l[j] = std::min(best_l[j], fl[i * ne + j]);
      best_e[i] = std::min(best_e[i], fe[i * ne + j]);
    }
  }
  std::vector<JointAction> out;
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < ne; ++j) {
      if (fl[i * ne + j] <= best_l[j] + eps && fe[i * ne + j] <= best_e[i] + eps) {
        out.push_back({thetas[i], envs[j]});
      }
    }
  }
  return out;
}

std::optional<JointAction> pareto_improvement_search(const GameSpec& game,
                                                     const JointAction& x,
                                                     const ActionSet& learner_set,
                                                     const ActionSet& env_set,
                                                     int grid_resolution) {
  if (game.joint_dim() > 4) {
    throw ArgumentError("pareto_improvement_search supports joint dimension <= 4");
  }
  const double fl0 = game.loss_learner(x.theta, x.env);
  const double fe0 = game.loss_env(x.theta, x.env);
  const auto thetas = grid_points(learner_set, grid_resolution);
  const auto envs = grid_points(env_set, grid_resolution);
  for (const Vector& t : thetas) {
    for (const Vector& e : envs) {
      if (game.loss_learner(t, e) < fl0 - 1e-9 && game.loss_env(t, e) <= fe0 + 1e-12) {
        return JointAction{t, e};
      }
    }
  }
  return std::nullopt;
}

std::vector<std::pair<std::size_t, EquilibriumReport>> scaling_curve(
    const GameFactory& factory, const ModelClassLadder& ladder, Regime regime) {
  std::vector<std::pair<std::size_t, EquilibriumReport>> curve;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const RegimeInputs in = factory(ladder[k]);
    EquilibriumReport report;
    switch (regime) {
      case Regime::kStationary:
        report = stationary_optimum(in.game, in.learner_set, in.fixed_env);
        break;
      case Regime::kStackelbergLeader:
        report = stackelberg_leader(in.game, Player::kLearner, in.learner_set, in.env_set,
                                    in.grid_resolution);
        break;
      case Regime::kStackelbergFollower:
        report = stackelberg_leader(in.game, Player::kEnv, in.env_set, in.learner_set,
                                    in.grid_resolution);
        break;
      case Regime::kNash:
        report = solve_nash(in.game, in.learner_set, in.env_set);
        break;
    }
    curve.emplace_back(k, std::move(report));
  }
  return curve;
}

bool is_non_increasing(const std::vector<std::pair<std::size_t, EquilibriumReport>>& curve,
                       double tol) {
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].second.loss_learner > curve[i - 1].second.loss_learner + tol) return false;
  }
  return true;
}

}  // namespace modelscale
