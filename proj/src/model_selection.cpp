#include "modelscale/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "modelscale/equilibrium.hpp"
#include "modelscale/errors.hpp"

namespace modelscale {

double ConfidenceRadius::value() const {
  return confidence_radius(lipschitz, mu, horizon, delta, scale);
}

double confidence_radius(double lipschitz, double mu, long horizon, double delta, double scale) {
  if (horizon < 1) throw ArgumentError("confidence radius needs T >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
  if (!(lipschitz > 0.0) || !(mu > 0.0) || !(scale > 0.0)) {
    throw ArgumentError("L, mu and scale must be positive");
  }
  const double l2 = lipschitz * lipschitz;
  return scale * (l2 * std::log(1.0 / delta) + l2 * lipschitz) /
         (mu * mu * static_cast<double>(horizon));
}

SelectionReport successive_elimination(const std::vector<ActionSet>& arms,
                                       const ArmFactory& factory,
                                       const SelectionOptions& options) {
  if (arms.empty()) throw ArgumentError("successive elimination needs at least one arm");
  if (!(options.delta > 0.0 && options.delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
  if (!(options.alpha > 0.0)) throw ArgumentError("alpha must be positive");
  if (!(options.scale > 0.0)) throw ArgumentError("scale must be positive");

  const std::size_t n = arms.size();
  std::vector<ArmProblem> problems;
  SelectionReport report;
  report.delta = options.delta;
  for (std::size_t i = 0; i < n; ++i) {
    problems.push_back(factory(i, arms[i]));
    problems.back().game.validate();
    report.arms.push_back({i, arms[i], 0.0, 0.0, 0, true});
  }
  const double sign = options.maximize ? -1.0 : 1.0;

  auto active_count = [&] {
    return static_cast<std::size_t>(
        std::count_if(report.arms.begin(), report.arms.end(), [](const ArmState& a) { return a.active; }));
  };

  for (int tau = 1; active_count() > 1; ++tau) {
    const double t_real = std::ceil(options.alpha * std::ldexp(1.0, tau));
    const long horizon = static_cast<long>(t_real);
    const long epoch_steps = static_cast<long>(active_count()) * horizon;
    if (t_real > 1e15 || report.total_steps + epoch_steps > options.step_budget) {
      report.inconclusive = true;
      break;
    }
    const double delta_prime =
        options.delta / (2.0 * static_cast<double>(n) * t_real * t_real);

    std::vector<std::size_t> pulled;
    for (auto& arm : report.arms) {
      if (!arm.active) continue;
      pulled.push_back(arm.class_index);
      const ArmProblem& prob = problems[arm.class_index];
      std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                        static_cast<std::uint32_t>(options.seed >> 32),
                        static_cast<std::uint32_t>(tau),
                        static_cast<std::uint32_t>(arm.class_index)};
      std::mt19937_64 rng(seq);
      const JointAction x0 = prob.x0 ? *prob.x0 : default_start(arm.action_set, prob.env_set);
      const auto trace = psgd_nash(prob.game, arm.action_set, prob.env_set, x0, horizon, rng);
      arm.last_estimate =
          prob.game.loss_learner(trace.averaged_point.theta, trace.averaged_point.env);
      arm.last_radius = confidence_radius(prob.game.lipschitz, prob.game.mu, horizon, delta_prime,
                                          options.scale);
      arm.pulls += horizon;
    }
    report.total_steps += epoch_steps;
    report.epochs = tau;

    // Simultaneous elimination against this epoch's active set.
    std::vector<std::size_t> drop;
    for (const auto& a : report.arms) {
      if (!a.active) continue;
      const double lower_a = sign * a.last_estimate - a.last_radius;
      double best_gap = -1.0;
      for (const auto& b : report.arms) {
        if (!b.active || b.class_index == a.class_index) continue;
        const double gap = lower_a - (sign * b.last_estimate + b.last_radius);
        best_gap = std::max(best_gap, gap);
      }
      if (best_gap > 0.0) {
        drop.push_back(a.class_index);
        report.elimination_log.push_back({tau, a.class_index, best_gap});
      }
    }
    for (std::size_t i : drop) report.arms[i].active = false;
    for (std::size_t i : pulled) {
      const auto& a = report.arms[i];
      report.epoch_log.push_back({tau, horizon, i, a.last_estimate, a.last_radius, a.active});
    }
  }

  for (const auto& a : report.arms) {
    if (a.active) report.survivors.push_back(a.class_index);
  }
  if (report.survivors.size() == 1) report.winner = report.survivors.front();
  return report;
}

GapSummary suboptimality_gaps(const std::vector<double>& losses) {
  if (losses.empty()) throw ArgumentError("suboptimality_gaps needs a nonempty list");
  const double best = *std::min_element(losses.begin(), losses.end());
  GapSummary out;
  for (double l : losses) {
    const double g = l - best;
    out.gaps.push_back(g);
    if (g > 0.0 && (!out.min_gap || g < *out.min_gap)) out.min_gap = g;
  }
  return out;
}

}  // namespace modelscale
