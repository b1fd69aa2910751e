#include "modelscale/harness/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "modelscale/equilibrium.hpp"
#include "modelscale/instances.hpp"
#include "modelscale/markov_chain.hpp"
#include "modelscale/model_selection.hpp"
#include "modelscale/participation.hpp"
#include "modelscale/regression_monte_carlo.hpp"
#include "modelscale/restriction.hpp"
#include "modelscale/strategic_regression.hpp"

namespace modelscale::harness {

namespace {

using nlohmann::json;

std::set<std::string> keys(std::initializer_list<const char*> extra) {
  std::set<std::string> out{"experiment", "seed", "plot"};
  for (const char* k : extra) out.insert(k);
  return out;
}

long positive_int(const Config& cfg, const std::string& key, long fallback) {
  const long v = cfg.get_int(key, fallback);
  if (v < 1) throw ConfigError("config key '" + key + "' must be >= 1");
  return v;
}

std::vector<double> linspace(double lo, double hi, long n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  if (n > 1) out.back() = hi;
  return out;
}

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t a, std::uint32_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), a, b};
  return std::mt19937_64(seq);
}

// ---- psgd -----------------------------------------------------------------

void run_psgd(const Config& cfg, RunContext& ctx) {
  cfg.check_keys(keys({"noise", "horizons", "replicates"}));
  const std::uint64_t seed = cfg.require_seed();
  const double noise = cfg.get_double("noise", 0.3);
  const long reps = positive_int(cfg, "replicates", 20);
  std::vector<long> horizons;
  for (double h : cfg.get_doubles("horizons", {512, 4096})) {
    if (h < 1 || h != std::floor(h)) throw ConfigError("horizons must be positive integers");
    horizons.push_back(static_cast<long>(h));
  }
  if (horizons.empty()) throw ConfigError("horizons must not be empty");

  const auto inst = instances::psgd_rate_game(noise);
  const auto nash = solve_nash(inst.game, inst.learner_set, inst.env_set, std::nullopt, 1e-12);
  const double f_star = inst.game.loss_learner(nash.joint.theta, nash.joint.env);
  const JointAction x0 = default_start(inst.learner_set, inst.env_set);

  CsvTable runs({"horizon", "replicate", "learner_loss", "abs_gap", "distance_to_nash"});
  CsvTable summary({"horizon", "mean_abs_gap", "std_error", "mean_distance", "replicates"});
  json per_h = json::array();
  for (long h : horizons) {
    double s = 0.0, s2 = 0.0, dist = 0.0;
    for (long r = 0; r < reps; ++r) {
      // Replicate r shares its noise stream across horizons.
      auto rng = stream(seed, static_cast<std::uint32_t>(r));
      const auto trace = psgd_nash(inst.game, inst.learner_set, inst.env_set, x0, h, rng);
      const auto& xa = trace.averaged_point;
      const double loss = inst.game.loss_learner(xa.theta, xa.env);
      const double gap = std::abs(loss - f_star);
      const double d = (xa.stacked() - nash.joint.stacked()).norm();
      runs.add_row({h, r, loss, gap, d});
      s += gap;
      s2 += gap * gap;
      dist += d;
    }
    const double n = static_cast<double>(reps);
    const double mean = s / n;
    const double se = reps > 1 ? std::sqrt(std::max(0.0, (s2 - n * mean * mean) / (n - 1)) / n) : 0.0;
    summary.add_row({h, mean, se, dist / n, reps});
    per_h.push_back({{"horizon", h}, {"mean_abs_gap", mean}, {"std_error", se}});
  }
  ctx.write_csv("psgd_runs.csv", runs);
  ctx.write_csv("psgd.csv", summary);
  auto& sm = ctx.summary();
  sm["nash_theta"] = nash.joint.theta[0];
  sm["nash_env"] = nash.joint.env[0];
  sm["nash_learner_loss"] = f_star;
  sm["horizons"] = per_h;
  const double first = per_h.front()["mean_abs_gap"].get<double>();
  const double last = per_h.back()["mean_abs_gap"].get<double>();
  sm["gap_ratio_last_over_first"] = first > 0.0 ? last / first : 0.0;
  if (ctx.plots()) {
    PlotSpec spec;
    spec.title = "PSGD learner-loss gap";
    spec.x_column = "horizon";
    spec.y_columns = {"mean_abs_gap"};
    spec.y_label = "mean |f_l(x_T) - f_l(x*)|";
    spec.log_x = spec.log_y = true;
    ctx.write_plot("psgd.svg", "psgd.csv", spec);
  }
}

// ---- select ---------------------------------------------------------------

void run_select(const Config& cfg, RunContext& ctx) {
  cfg.check_keys(keys({"gaps", "runs", "noise", "delta", "alpha", "scale", "step_budget", "maximize"}));
  const std::uint64_t seed = cfg.require_seed();
  const auto gaps = cfg.get_doubles("gaps", {0.25});
  if (gaps.empty()) throw ConfigError("gaps must not be empty");
  const long runs = positive_int(cfg, "runs", 1);
  const double noise = cfg.get_double("noise", 0.3);
  SelectionOptions base;
  base.delta = cfg.get_double("delta", 0.1);
  base.alpha = cfg.get_double("alpha", 8.0);
  base.scale = cfg.get_double("scale", 1.0);
  base.step_budget = cfg.get_int("step_budget", base.step_budget);
  base.maximize = cfg.get_bool("maximize", false);

  CsvTable log({"epoch", "T", "arm", "estimate", "radius", "active"});
  CsvTable run_rows({"gap", "run", "seed", "winner", "correct", "inconclusive", "epochs", "total_steps"});
  CsvTable sum_rows({"gap", "runs", "correct", "mean_total_steps", "steps_times_gap"});
  json per_gap = json::array();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t g = 0; g < gaps.size(); ++g) {
    if (!(gaps[g] > 0.0)) throw ConfigError("gaps must be positive");
    const auto inst = instances::four_arm_instance(gaps[g], noise);
    const auto& losses = inst.nash_losses;
    const std::size_t best = static_cast<std::size_t>(
        base.maximize ? std::max_element(losses.begin(), losses.end()) - losses.begin()
                      : std::min_element(losses.begin(), losses.end()) - losses.begin());
    long correct = 0;
    double steps = 0.0;
    for (long r = 0; r < runs; ++r) {
      SelectionOptions opt = base;
      opt.seed = seed + static_cast<std::uint64_t>(r);
      const auto rep = successive_elimination(inst.arms, inst.factory, opt);
      const bool ok = rep.winner && *rep.winner == best;
      correct += ok;
      steps += static_cast<double>(rep.total_steps);
      run_rows.add_row({gaps[g], r, static_cast<std::size_t>(opt.seed),
                        rep.winner ? static_cast<long>(*rep.winner) : -1L, ok, rep.inconclusive,
                        rep.epochs, rep.total_steps});
      if (g == 0 && r == 0) {
        for (const auto& row : rep.epoch_log) {
          log.add_row({row.epoch, row.horizon, row.arm, row.estimate, row.radius, row.active});
        }
      }
    }
    const double mean_steps = steps / static_cast<double>(runs);
    sum_rows.add_row({gaps[g], runs, correct, mean_steps, mean_steps * gaps[g]});
    lo = std::min(lo, mean_steps * gaps[g]);
    hi = std::max(hi, mean_steps * gaps[g]);
    per_gap.push_back({{"gap", gaps[g]}, {"runs", runs}, {"correct", correct},
                       {"mean_total_steps", mean_steps}});
  }
  ctx.write_csv("select.csv", log);
  ctx.write_csv("select_runs.csv", run_rows);
  ctx.write_csv("select_summary.csv", sum_rows);
  auto& sm = ctx.summary();
  sm["scale"] = base.scale;
  sm["delta"] = base.delta;
  sm["alpha"] = base.alpha;
  sm["gaps"] = per_gap;
  // Steps times gap is flat when the step count scales like 1/gap.
  sm["steps_times_gap_spread"] = hi / lo;
  if (ctx.plots()) {
    PlotSpec spec;
    spec.title = "Successive elimination estimates (first run)";
    spec.x_column = "epoch";
    spec.y_columns = {"estimate"};
    spec.group_column = "arm";
    spec.y_label = "learner loss estimate";
    ctx.write_plot("select.svg", "select.csv", spec);
  }
}

// ---- restrict -------------------------------------------------------------

void run_restrict(const Config& cfg, RunContext& ctx) {
  cfg.check_keys(keys({"instance", "audit_samples", "pareto_resolution", "psgd_horizon", "nash_tolerance"}));
  RestrictionOptions opt;
  opt.audit_seed = cfg.require_seed();
  opt.audit_samples = static_cast<int>(positive_int(cfg, "audit_samples", opt.audit_samples));
  opt.pareto_resolution = static_cast<int>(positive_int(cfg, "pareto_resolution", opt.pareto_resolution));
  opt.psgd_horizon = positive_int(cfg, "psgd_horizon", opt.psgd_horizon);
  opt.nash_tolerance = cfg.get_double("nash_tolerance", opt.nash_tolerance);
  const std::string which = cfg.get_string("instance", "coupled");
  if (which != "coupled" && which != "zero_sum") throw ConfigError("instance must be coupled or zero_sum");
  const auto inst = which == "coupled" ? instances::coupled_restriction_game() : instances::zero_sum_game();

  CsvTable table({"instance", "status", "stage", "hypothesis_not_satisfied", "loss_original",
                  "loss_restricted", "improvement", "restricted_residual", "delta"});
  auto& sm = ctx.summary();
  sm["instance"] = which;
  try {
    const auto cert = certify_restriction(inst.game, inst.learner_set, inst.env_set, opt);
    table.add_row({which, "certified", "", false, cert.loss_original, cert.loss_restricted,
                   cert.improvement, cert.restricted_residual, cert.delta});
    ctx.write_csv("restrict.csv", table);
    ctx.write_text("certificate.txt", cert.to_record() + "\n");
    sm["certified"] = true;
    sm["improvement"] = cert.improvement;
    sm["restricted_residual"] = cert.restricted_residual;
    sm["loss_original"] = cert.loss_original;
    sm["loss_restricted"] = cert.loss_restricted;
  } catch (const RestrictionError& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    table.add_row({which, "failed", to_string(e.stage()), e.hypothesis_not_satisfied(), nan, nan, nan,
                   nan, nan});
    ctx.write_csv("restrict.csv", table);
    sm["certified"] = false;
    throw CertificationFailure(e.what(), {{"stage", to_string(e.stage())},
                                          {"hypothesis_not_satisfied", e.hypothesis_not_satisfied()}});
  }
}

// ---- markov ---------------------------------------------------------------

void run_markov(const Config& cfg, RunContext& ctx) {
  cfg.check_keys(keys({"n", "gamma", "gamma_l", "gamma_e", "grid_points", "p_min", "p_max",
                       "rollout_points", "rollout_episodes", "rollout_horizon"}));
  const long n = positive_int(cfg, "n", 50);
  const double gamma = cfg.get_double("gamma", 0.9);
  const double gamma_l = cfg.get_double("gamma_l", gamma);
  const double gamma_e = cfg.get_double("gamma_e", gamma);
  const long points = positive_int(cfg, "grid_points", 200);
  const double p_min = cfg.get_double("p_min", 0.5);
  const double p_max = cfg.get_double("p_max", 1.0);
  if (!(0.5 <= p_min && p_min <= p_max && p_max <= 1.0)) {
    throw ConfigError("need 0.5 <= p_min <= p_max <= 1");
  }
  const auto rollout_points = cfg.get_doubles("rollout_points", {});
  const long episodes = positive_int(cfg, "rollout_episodes", 100000);
  const long horizon = positive_int(cfg, "rollout_horizon", 500);
  const std::uint64_t seed = rollout_points.empty() ? 0 : cfg.require_seed();

  const auto game =
      build_chain_game(static_cast<int>(n), default_thresholds(static_cast<int>(n)), RewardProfile{},
                       gamma_l, gamma_e);
  const auto sweep = payoff_sweep(game, linspace(p_min, p_max, points));

  CsvTable table({"p_bar", "learner_value", "env_value", "absorbing_state", "gamma"});
  bool absorbing_monotone = true;
  int not_dominant = 0;
  double max_bellman = 0.0;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const auto& eq = sweep[i];
    table.add_row({eq.p_bar, eq.learner_value, eq.env_value, eq.absorbing_state, gamma_l});
    if (i > 0 && eq.absorbing_state > sweep[i - 1].absorbing_state) absorbing_monotone = false;
    if (!eq.dominance.dominant) ++not_dominant;
    max_bellman = std::max(max_bellman, eq.bellman_residual);
  }
  ctx.write_csv("markov.csv", table);
  auto& sm = ctx.summary();
  sm["n"] = n;
  sm["gamma_l"] = gamma_l;
  sm["gamma_e"] = gamma_e;
  sm["grid_points"] = points;
  sm["absorbing_non_increasing"] = absorbing_monotone;
  sm["non_dominant_points"] = not_dominant;
  sm["max_bellman_residual"] = max_bellman;
  sm["learner_value_first"] = sweep.front().learner_value;
  sm["learner_value_last"] = sweep.back().learner_value;

  if (!rollout_points.empty()) {
    CsvTable mc({"p_bar", "dp_value", "mc_mean", "mc_std_error", "z_score", "absorbing_state"});
    json rows = json::array();
    double max_z = 0.0;
    for (std::size_t i = 0; i < rollout_points.size(); ++i) {
      const double p = rollout_points[i];
      if (!(0.5 <= p && p <= 1.0)) throw ConfigError("rollout_points must lie in [0.5, 1]");
      const auto eq = chain_equilibrium(game, p);
      const auto est = rollout_learner_value(game, p, eq.env_policy, episodes, static_cast<int>(horizon),
                                             seed + i);
      const double z = est.standard_error > 0.0 ? (est.mean - eq.learner_value) / est.standard_error : 0.0;
      max_z = std::max(max_z, std::abs(z));
      mc.add_row({p, eq.learner_value, est.mean, est.standard_error, z, eq.absorbing_state});
      rows.push_back({{"p_bar", p}, {"dp_value", eq.learner_value}, {"mc_mean", est.mean},
                      {"mc_std_error", est.standard_error}});
    }
    ctx.write_csv("markov_rollouts.csv", mc);
    sm["rollouts"] = rows;
    sm["rollout_max_abs_z"] = max_z;
  }
  if (ctx.plots()) {
    PlotSpec spec;
    spec.title = "Learner equilibrium value, n = " + std::to_string(n);
    spec.x_column = "p_bar";
    spec.y_columns = {"learner_value"};
    spec.step = true;
    spec.x_label = "p_bar";
    spec.y_label = "learner value from s_1";
    ctx.write_plot("markov.svg", "markov.csv", spec);
  }
}

// ---- regression -----------------------------------------------------------

void run_regression(const Config& cfg, RunContext& ctx) {
  cfg.check_keys(keys({"beta", "k_min", "k_max", "curve_points", "resolution", "zoom_rounds",
                       "mc_cases", "mc_samples"}));
  RegressionInstance inst;
  const auto beta = cfg.get_doubles("beta", {1.0, 0.0});
  inst.beta = Vector::Map(beta.data(), static_cast<Eigen::Index>(beta.size()));
  inst.k_min = cfg.get_double("k_min", inst.k_min);
  inst.k_max = cfg.get_double("k_max", inst.k_max);
  const long points = positive_int(cfg, "curve_points", 401);
  KSearchOptions search;
  search.resolution = cfg.get_double("resolution", search.resolution);
  search.zoom_rounds = static_cast<int>(cfg.get_int("zoom_rounds", search.zoom_rounds));
  inst.validate();

  const auto cmp = compare_model_classes(inst, search);
  const auto curve = loss_curve(inst, static_cast<int>(points));
  CsvTable table({"k", "small_loss", "large_loss", "env_obj_small", "env_obj_large"});
  for (const auto& r : curve) table.add_row({r.k, r.small_loss, r.large_loss, r.env_obj_small, r.env_obj_large});
  ctx.write_csv("regression.csv", table);

  const double b2 = inst.beta.squaredNorm();
  CsvTable eq({"model_class", "k_star", "learner_loss", "env_objective", "loss_over_beta_sq"});
  for (const auto* o : {&cmp.small, &cmp.large}) {
    eq.add_row({to_string(o->model_class), o->k_star, o->learner_loss, o->env_objective, o->learner_loss / b2});
  }
  ctx.write_csv("regression_equilibria.csv", eq);
  auto& sm = ctx.summary();
  sm["beta_norm_sq"] = b2;
  sm["small"] = {{"k_star", cmp.small.k_star}, {"learner_loss", cmp.small.learner_loss},
                 {"loss_over_beta_sq", cmp.small.learner_loss / b2}};
  sm["large"] = {{"k_star", cmp.large.k_star}, {"learner_loss", cmp.large.learner_loss},
                 {"loss_over_beta_sq", cmp.large.learner_loss / b2}};
  sm["reverse_scaling"] = cmp.reverse_scaling;
  sm["pointwise_dominance"] = cmp.pointwise_dominance;

  const auto cases = cfg.get_strings("mc_cases", {});
  if (!cases.empty()) {
    const std::uint64_t seed = cfg.require_seed();
    const long samples = positive_int(cfg, "mc_samples", 1000000);
    CsvTable mc({"d", "k", "quantity", "closed_form", "mc_mean", "mc_std_error", "z_score"});
    double max_z = 0.0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto colon = cases[i].find(':');
      if (colon == std::string::npos) throw ConfigError("mc_cases entries look like d:k");
      const Config pair = Config::parse("d = " + cases[i].substr(0, colon) + "\nk = " + cases[i].substr(colon + 1));
      const long d = positive_int(pair, "d", 1);
      const double k = pair.get_double("k", 0.0);
      // beta = (1, ..., 1) in dimension d.
      RegressionInstance ci;
      ci.beta = Vector::Ones(d);
      const auto est = mc::regression_monte_carlo(ci, k, samples, seed + 10 * i);
      const auto f = large_model_closed_form(static_cast<int>(d), k);
      auto row = [&](const char* q, double closed, mc::McValue v) {
        const double z = v.se > 0.0 ? (v.mean - closed) / v.se : (v.mean == closed ? 0.0 : INFINITY);
        max_z = std::max(max_z, std::abs(z));
        mc.add_row({d, k, q, closed, v.mean, v.se, z});
      };
      row("m", f.m, {est.gauss.mean / 3.0, est.gauss.se / 3.0});
      row("y", f.y, est.gauss2);
      row("c", f.c, est.large_c);
      row("p", f.p, est.large_p);
      row("small_loss", small_model_learner_loss(ci, k), est.small_loss);
      row("large_loss", large_model_learner_loss(ci, k), est.large_loss);
      row("small_env_objective", small_model_env_objective(ci, k), est.small_env);
      row("large_env_objective", large_model_env_objective(ci, k), est.large_env);
    }
    ctx.write_csv("regression_mc.csv", mc);
    sm["mc_samples"] = samples;
    sm["mc_max_abs_z"] = max_z;
  }
  if (ctx.plots()) {
    PlotSpec spec;
    spec.title = "Learner loss under strategic shift";
    spec.x_column = "k";
    spec.y_columns = {"small_loss", "large_loss"};
    spec.y_label = "learner loss";
    spec.markers = {{cmp.small.k_star, cmp.small.learner_loss, "small k*"},
                    {cmp.large.k_star, cmp.large.learner_loss, "large k*"}};
    ctx.write_plot("regression.svg", "regression.csv", spec);
  }
}

// ---- participation --------------------------------------------------------

void run_participation(const Config& cfg, RunContext& ctx) {
  cfg.check_keys(keys({"alpha_min", "alpha_max", "alpha_points"}));
  const double lo = cfg.get_double("alpha_min", 0.6);
  const double hi = cfg.get_double("alpha_max", 1.0);
  const long points = positive_int(cfg, "alpha_points", 20);
  if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) throw ConfigError("need 0 <= alpha_min <= alpha_max <= 1");
  const auto inst = default_participation_instance();
  const auto rows = participation_sweep(inst, linspace(lo, hi, points));

  CsvTable table({"alpha", "full_loss", "restricted_loss", "threshold", "reverse_scaling_flag",
                  "full_certified", "restricted_certified"});
  bool all_reverse = true, all_certified = true;
  json failures = json::array();
  for (const auto& r : rows) {
    table.add_row({r.alpha, r.full_loss, r.restricted_loss, r.threshold, r.reverse_scaling, r.full_certified,
                   r.restricted_certified});
    all_reverse = all_reverse && r.reverse_scaling;
    if (!r.full_certified || !r.restricted_certified) {
      all_certified = false;
      failures.push_back({{"alpha", r.alpha}, {"full", r.full_certified}, {"restricted", r.restricted_certified}});
    }
  }
  ctx.write_csv("participation.csv", table);
  auto& sm = ctx.summary();
  sm["threshold"] = rows.empty() ? 0.0 : rows.front().threshold;
  sm["all_reverse_scaling"] = all_reverse;
  sm["all_certified"] = all_certified;
  if (ctx.plots()) {
    PlotSpec spec;
    spec.title = "Participation equilibrium loss";
    spec.x_column = "alpha";
    spec.y_columns = {"full_loss", "restricted_loss"};
    spec.y_label = "learner loss";
    ctx.write_plot("participation.svg", "participation.csv", spec);
  }
  if (!all_certified) throw CertificationFailure("participation: equilibrium certificate failed", failures);
}

// ---- scaling-curve --------------------------------------------------------

void run_scaling_curve(const Config& cfg, RunContext& ctx) {
  cfg.check_keys(keys({"regimes", "tolerance"}));
  const auto names = cfg.get_strings("regimes", {"stationary", "stackelberg_leader"});
  if (names.empty()) throw ConfigError("regimes must not be empty");
  const double tol = cfg.get_double("tolerance", 1e-9);
  std::vector<Regime> regimes;
  for (const auto& n : names) {
    try {
      regimes.push_back(parse_regime(n));
    } catch (const ArgumentError&) {
      throw ConfigError("unknown regime '" + n + "'");
    }
  }
  const auto inst = instances::monotone_ladder_instance();
  CsvTable table({"regime", "class_index", "learner_loss", "env_loss", "nash_residual", "certified"});
  json per = json::object();
  for (Regime r : regimes) {
    const auto curve = scaling_curve(inst.factory, inst.ladder, r);
    for (const auto& [idx, rep] : curve) {
      table.add_row({to_string(r), idx, rep.loss_learner, rep.loss_env, rep.nash_residual, rep.certified});
    }
    json losses = json::array();
    for (const auto& [idx, rep] : curve) losses.push_back(rep.loss_learner);
    per[to_string(r)] = {{"non_increasing", is_non_increasing(curve, tol)}, {"learner_losses", losses}};
  }
  ctx.write_csv("scaling_curve.csv", table);
  ctx.summary()["tolerance"] = tol;
  ctx.summary()["regimes"] = per;
  if (ctx.plots()) {
    PlotSpec spec;
    spec.title = "Learner loss along the model-class ladder";
    spec.x_column = "class_index";
    spec.y_columns = {"learner_loss"};
    spec.group_column = "regime";
    spec.step = true;
    ctx.write_plot("scaling_curve.svg", "scaling_curve.csv", spec);
  }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"psgd",       "select",        "restrict",     "markov",
                                              "regression", "participation", "scaling-curve"};
  return names;
}

void run_experiment(const std::string& name, const Config& config, RunContext& ctx) {
  if (config.has("experiment") && config.get_string("experiment", "") != name) {
    throw ConfigError("config is for experiment '" + config.get_string("experiment", "") + "', not '" + name + "'");
  }
  if (name == "psgd") return run_psgd(config, ctx);
  if (name == "select") return run_select(config, ctx);
  if (name == "restrict") return run_restrict(config, ctx);
  if (name == "markov") return run_markov(config, ctx);
  if (name == "regression") return run_regression(config, ctx);
  if (name == "participation") return run_participation(config, ctx);
  if (name == "scaling-curve") return run_scaling_curve(config, ctx);
  throw ConfigError("unknown experiment '" + name + "'");
}

}  // namespace modelscale::harness
