#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "modelscale/equilibrium.hpp"
#include "modelscale/errors.hpp"
#include "test_games.hpp"

using namespace modelscale;
using testgames::scalar;
using testgames::vec;

namespace {

// f_l = 1/2 ||theta - target||^2 in R^2, env scalar and ignored by the learner.
GameSpec shifted_bowl(const Vector& target) {
  GameSpec g;
  g.dim_learner = 2;
  g.dim_env = 1;
  g.loss_learner = [target](const Vector& t, const Vector&) { return 0.5 * (t - target).squaredNorm(); };
  g.grad_learner = [target](const Vector& t, const Vector&) -> Vector { return t - target; };
  g.loss_env = [](const Vector&, const Vector& e) { return 0.5 * e.squaredNorm(); };
  g.grad_env = [](const Vector&, const Vector& e) -> Vector { return e; };
  return g;
}

// f_e = 1/2 (e - th)^2.
GameSpec tracking_env() {
  ScalarQuadratic s;
  s.a_ee = 1.0;
  s.b_e = -1.0;
  s.c_ee = 1.0;
  return s.game().spec();
}

}  // namespace

TEST_CASE("regime names round-trip") {
  for (Regime r : {Regime::kStationary, Regime::kStackelbergLeader, Regime::kStackelbergFollower,
                   Regime::kNash}) {
    CHECK(parse_regime(to_string(r)) == r);
  }
  CHECK_THROWS_AS(parse_regime("cournot"), ArgumentError);
}

TEST_CASE("stationary optimum") {
  SUBCASE("interior minimum") {
    const auto r = stationary_optimum(shifted_bowl(vec({0.0, 0.0})), ActionSet::box(2, -1.0, 1.0),
                                      scalar(0.3));
    CHECK(r.joint.theta.norm() <= 1e-8);
    CHECK(r.loss_learner == doctest::Approx(0.0));
    CHECK(r.regime == Regime::kStationary);
  }
  SUBCASE("clamped minimum") {
    const auto r = stationary_optimum(shifted_bowl(vec({2.0, 0.0})), ActionSet::box(2, -1.0, 1.0),
                                      scalar(0.0));
    CHECK((r.joint.theta - vec({1.0, 0.0})).norm() <= 1e-8);
    CHECK(r.loss_learner == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.nash_residual <= 1e-8);
  }
  SUBCASE("nested boxes never lose") {
    const auto game = shifted_bowl(vec({2.0, -1.5}));
    const auto small = stationary_optimum(game, ActionSet::box(2, -0.5, 0.5), scalar(0.0));
    const auto big = stationary_optimum(game, ActionSet::box(2, -1.0, 1.0), scalar(0.0));
    CHECK(big.loss_learner <= small.loss_learner);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(stationary_optimum(shifted_bowl(vec({0.0, 0.0})), ActionSet::box(1, 0, 1),
                                       scalar(0.0)),
                    ArgumentError);
  }
}

TEST_CASE("best responses") {
  const auto unit = ActionSet::box(1, 0.0, 1.0);
  CHECK(best_response(tracking_env(), Player::kEnv, scalar(0.7), unit)[0] ==
        doctest::Approx(0.7).epsilon(1e-9));
  CHECK(best_response(tracking_env(), Player::kEnv, scalar(2.0), unit)[0] ==
        doctest::Approx(1.0).epsilon(1e-12));
  ScalarQuadratic s;
  s.b_e = -1.0;  // f_e = 1/2 e^2 - th e
  const auto game = s.game().spec();
  const double e = best_response(game, Player::kEnv, scalar(0.3), ActionSet::box(1, -1.0, 1.0))[0];
  CHECK(std::abs(e - 0.3) <= 1e-9);
}

TEST_CASE("best response of the learner uses grad_learner") {
  ScalarQuadratic s;
  s.b_l = 0.5;  // f_l = 1/2 th^2 + th e / 2
  const auto game = s.game().spec();
  const double th = best_response(game, Player::kLearner, scalar(1.0), ActionSet::box(1, -2.0, 2.0))[0];
  CHECK(std::abs(th + 0.5) <= 1e-9);
}

TEST_CASE("nash residual") {
  const auto game = testgames::decoupled();
  const auto box = ActionSet::box(1, -2.0, 2.0);
  CHECK(nash_residual(game, {scalar(0.0), scalar(0.0)}, box, box) <= 1e-10);
  CHECK(nash_residual(game, {scalar(1.0), scalar(1.0)}, box, box) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // Minimum of f_l at th = 3 lies outside [-1, 1]; the Nash point clamps to 1.
  ScalarQuadratic s;
  s.g_l = -3.0;
  const auto clamped = s.game().spec();
  const auto unit = ActionSet::box(1, -1.0, 1.0);
  const auto r = solve_nash(clamped, unit, unit);
  CHECK(std::abs(r.joint.theta[0] - 1.0) <= 1e-8);
  CHECK(nash_residual(clamped, r.joint, unit, unit) <= 1e-8);
}

TEST_CASE("psgd weights sum to one") {
  for (long T = 1; T <= 10000; ++T) {
    const auto w = psgd_weights(T);
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(s - 1.0) > 1e-12) {
      FAIL("weights do not sum to one at T = " << T);
    }
  }
  CHECK_THROWS_AS(psgd_weights(0), ArgumentError);
}

TEST_CASE("psgd on decoupled quadratics") {
  const auto game = testgames::decoupled();
  const auto box = ActionSet::box(1, -2.0, 2.0);
  std::mt19937_64 rng(1);
  const auto trace = psgd_nash(game, box, box, {scalar(1.0), scalar(1.0)}, 1000, rng);
  CHECK(trace.averaged_point.stacked().norm() <= 1e-2);
  CHECK(trace.horizon == 1000);
}

TEST_CASE("psgd on a coupled game converges to the linear-system solution") {
  ScalarQuadratic s;
  s.b_l = 1.0;
  s.g_l = -1.0;
  s.k_l = 0.5;
  s.b_e = -1.0;
  s.g_e = -1.0;
  const auto game = s.game().spec();
  const auto box = ActionSet::box(1, -5.0, 5.0);
  std::mt19937_64 rng(1);
  const auto trace = psgd_nash(game, box, box, default_start(box, box), 20000, rng);
  CHECK(std::abs(trace.averaged_point.theta[0]) <= 1e-2);
  CHECK(std::abs(trace.averaged_point.env[0] - 1.0) <= 1e-2);
  CHECK(std::abs(trace.final_point.theta[0]) <= 1e-3);
  CHECK(std::abs(trace.final_point.env[0] - 1.0) <= 1e-3);
}

TEST_CASE("psgd argument checks") {
  const auto game = testgames::decoupled();
  const auto box = ActionSet::box(1, -1.0, 1.0);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(psgd_nash(game, box, box, {scalar(0.0), scalar(0.0)}, 0, rng), ArgumentError);
  CHECK_THROWS_AS(psgd_nash(game, box, box, {scalar(3.0), scalar(0.0)}, 10, rng), ArgumentError);
}

TEST_CASE("psgd is deterministic given the seed") {
  const auto game = testgames::decoupled(0.3);
  const auto box = ActionSet::box(1, -1.0, 1.0);
  std::mt19937_64 a(5), b(5);
  const auto ta = psgd_nash(game, box, box, {scalar(1.0), scalar(1.0)}, 500, a);
  const auto tb = psgd_nash(game, box, box, {scalar(1.0), scalar(1.0)}, 500, b);
  CHECK((ta.averaged_point.stacked() - tb.averaged_point.stacked()).norm() == 0.0);
}

TEST_CASE("psgd loss gap shrinks at least by half from T = 512 to T = 4096") {
  ScalarQuadratic s;
  s.b_l = 0.5;
  s.g_l = -1.0;
  s.b_e = -0.5;
  s.g_e = 0.5;
  const auto q = s.game();
  const auto game = q.spec(0.3);
  const auto box = ActionSet::box(1, -3.0, 3.0);
  const JointAction star = q.unconstrained_nash();
  const double f_star = game.loss_learner(star.theta, star.env);
  auto mean_gap = [&](long T) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng(seed);
      const auto tr = psgd_nash(game, box, box, default_start(box, box), T, rng);
      total += std::abs(game.loss_learner(tr.averaged_point.theta, tr.averaged_point.env) - f_star);
    }
    return total / 20.0;
  };
  CHECK(mean_gap(4096) <= 0.5 * mean_gap(512));
}

TEST_CASE("deterministic psgd error is non-increasing beyond T = 16 and decays like 1/sqrt(T)") {
  std::mt19937_64 gen(21);
  const auto box = ActionSet::box(1, -3.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto q = testgames::random_scalar_quadratic(gen).game();
    const auto game = q.spec();
    const Vector star = q.unconstrained_nash().stacked();
    double prev = 1e300, first = 0.0;
    for (long T = 16; T <= 4096; T *= 2) {
      std::mt19937_64 rng(0);
      const auto tr = psgd_nash(game, box, box, default_start(box, box), T, rng);
      const double err = (tr.averaged_point.stacked() - star).norm();
      if (T == 16) first = err;
      CHECK(err <= prev + 1e-12);
      CHECK(err <= first * std::sqrt(16.0 / T) + 1e-12);
      prev = err;
    }
  }
}

TEST_CASE("psgd residual at T = 10^4 with sigma = 0.1") {
  std::mt19937_64 gen(31);
  const auto box = ActionSet::box(1, -3.0, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto game = testgames::random_scalar_quadratic(gen).game().spec(0.1);
    std::mt19937_64 rng(trial);
    const auto tr = psgd_nash(game, box, box, default_start(box, box), 10000, rng);
    CHECK(nash_residual(game, tr.averaged_point, box, box) <= 1e-2);
  }
}

TEST_CASE("Nash oracles agree on 2-D games") {
  std::mt19937_64 gen(41);
  const auto box = ActionSet::box(1, -1.0, 1.0);
  const int resolution = 101;
  const double spacing = 2.0 / (resolution - 1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto game = testgames::random_scalar_quadratic(gen).game().spec();
    const auto nash = solve_nash(game, box, box);
    CHECK(nash.nash_residual <= 1e-10);

    const auto brd = best_response_dynamics(game, box, box);
    CHECK((brd.joint.stacked() - nash.joint.stacked()).norm() <= 1e-6);

    std::mt19937_64 rng(trial);
    const auto tr = psgd_nash(game, box, box, default_start(box, box), 20000, rng);
    CHECK((tr.averaged_point.stacked() - nash.joint.stacked()).norm() <= spacing);

    const auto grid = grid_nash(game, box, box, resolution, 2.0 * spacing * spacing);
    REQUIRE_FALSE(grid.empty());
    double nearest = 1e300;
    for (const auto& g : grid) nearest = std::min(nearest, (g.stacked() - nash.joint.stacked()).norm());
    CHECK(nearest <= spacing);
  }
}

TEST_CASE("learner commitment never hurts the learner") {
  std::mt19937_64 gen(51);
  const auto box = ActionSet::box(1, -1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto game = testgames::random_scalar_quadratic(gen).game().spec();
    const auto nash = solve_nash(game, box, box);
    const auto lead = stackelberg_leader(game, Player::kLearner, box, box, 101);
    CHECK(lead.loss_learner <= nash.loss_learner + 1e-9);
    CHECK(lead.regime == Regime::kStackelbergLeader);
    CHECK(lead.certified);
  }
}

TEST_CASE("zero-sum Stackelberg leader coincides with Nash") {
  const auto game = testgames::zero_sum_scalar();
  const auto box = ActionSet::box(1, -1.0, 1.0);
  const auto nash = solve_nash(game, box, box);
  const auto lead = stackelberg_leader(game, Player::kLearner, box, box, 101);
  CHECK(std::abs(lead.loss_learner - nash.loss_learner) <= 1e-8);
  CHECK((lead.joint.stacked() - nash.joint.stacked()).norm() <= 1e-4);
}

TEST_CASE("singleton leader reduces to the follower's stationary problem") {
  ScalarQuadratic s;
  s.b_e = -1.0;
  s.g_e = 0.25;
  const auto game = s.game().spec();
  const auto leader_set = ActionSet::singleton(scalar(0.6));
  const auto env_box = ActionSet::box(1, -2.0, 2.0);
  const auto lead = stackelberg_leader(game, Player::kLearner, leader_set, env_box, 11);
  CHECK(lead.joint.theta[0] == 0.6);
  // Env minimizes 1/2 e^2 - 0.6 e + 0.25 e, so e = 0.35.
  CHECK(std::abs(lead.joint.env[0] - 0.35) <= 1e-9);

  // Same follower problem seen from the env-leads side with a singleton env.
  const auto follow = stackelberg_leader(testgames::decoupled(), Player::kEnv,
                                         ActionSet::singleton(scalar(0.4)), env_box, 7);
  CHECK(follow.regime == Regime::kStackelbergFollower);
  const auto stat = stationary_optimum(testgames::decoupled(), env_box, scalar(0.4));
  CHECK(std::abs(follow.joint.theta[0] - stat.joint.theta[0]) <= 1e-9);
}

TEST_CASE("grid ties go to the smallest leader action") {
  ScalarQuadratic s;
  s.a_ll = 0.0;  // the leader's loss ignores everything
  const auto game = s.game().spec();
  const auto box = ActionSet::box(1, -1.0, 1.0);
  const auto lead = stackelberg_leader(game, Player::kLearner, box, box, 21);
  CHECK(lead.joint.theta[0] == -1.0);
}

TEST_CASE("higher-dimensional leaders are searched but not certified") {
  GameSpec g;
  g.dim_learner = 3;
  g.dim_env = 1;
  const Vector target = vec({0.2, -0.3, 0.5});
  g.loss_learner = [target](const Vector& t, const Vector& e) {
    return 0.5 * (t - target).squaredNorm() + 0.1 * t.sum() * e[0];
  };
  g.grad_learner = [target](const Vector& t, const Vector& e) -> Vector {
    return (t - target).array() + 0.1 * e[0];
  };
  g.loss_env = [](const Vector& t, const Vector& e) { return 0.5 * e[0] * e[0] - e[0] * t[0]; };
  g.grad_env = [](const Vector& t, const Vector& e) -> Vector { return Vector::Constant(1, e[0] - t[0]); };
  const auto lead = stackelberg_leader(g, Player::kLearner, ActionSet::box(3, -1, 1),
                                       ActionSet::box(1, -1, 1), 11);
  CHECK_FALSE(lead.certified);
  // Composed loss 1/2||t - target||^2 + 0.1 t0 (t0 + t1 + t2): its minimizer
  // solves (I + 0.1 (e0 1' + 1 e0')) t = target.
  Matrix h = Matrix::Identity(3, 3);
  h.row(0) += 0.1 * Vector::Ones(3).transpose();
  h.col(0) += 0.1 * Vector::Ones(3);
  const Vector expected = h.ldlt().solve(target);
  CHECK((lead.joint.theta - expected).norm() <= 1e-6);
}

TEST_CASE("pareto improvement search") {
  SUBCASE("zero-sum Nash admits no improvement") {
    const auto game = testgames::zero_sum_scalar();
    const auto box = ActionSet::box(1, -1.0, 1.0);
    const auto nash = solve_nash(game, box, box);
    CHECK_FALSE(pareto_improvement_search(game, nash.joint, box, box, 201).has_value());
  }
  SUBCASE("coordinated deviation helps both players") {
    ScalarQuadratic s;
    s.b_l = 1.0;
    s.b_e = 1.0;  // f_l = 1/2 th^2 + th e, f_e = 1/2 e^2 + th e
    const auto game = s.game().spec();
    const auto box = ActionSet::box(1, -1.0, 1.0);
    // Only monotone (mu = 0), so the Nash point (0, 0) is checked directly.
    const JointAction nash{scalar(0.0), scalar(0.0)};
    CHECK(nash_residual(game, nash, box, box) == 0.0);
    const auto hit = pareto_improvement_search(game, nash, box, box, 101);
    REQUIRE(hit.has_value());
    CHECK(game.loss_learner(hit->theta, hit->env) < -1e-9);
    CHECK(game.loss_env(hit->theta, hit->env) <= 1e-12);
    CHECK(game.loss_learner(scalar(0.1), scalar(-0.1)) == doctest::Approx(-0.005));
    CHECK(game.loss_env(scalar(0.1), scalar(-0.1)) == doctest::Approx(-0.005));
  }
  SUBCASE("learner already at its joint minimum") {
    ScalarQuadratic s;
    s.c_ll = 1.0;  // f_l = 1/2 th^2 + 1/2 e^2
    const auto game = s.game().spec();
    const auto box = ActionSet::box(1, -1.0, 1.0);
    const auto nash = solve_nash(game, box, box);
    CHECK_FALSE(pareto_improvement_search(game, nash.joint, box, box, 101).has_value());
  }
  SUBCASE("joint dimension above four is rejected") {
    GameSpec g = shifted_bowl(vec({0.0, 0.0}));
    g.dim_learner = 4;
    CHECK_THROWS_AS(pareto_improvement_search(g, {Vector::Zero(4), Vector::Zero(1)},
                                              ActionSet::box(4, -1, 1), ActionSet::box(1, -1, 1), 3),
                    ArgumentError);
  }
}

TEST_CASE("scaling curve in the stationary regime") {
  const auto game = shifted_bowl(vec({2.0, -1.5}));
  const auto ladder = ModelClassLadder::shrinking_boxes(vec({0.0, 0.0}), {0.25, 0.5, 1.0, 1.75, 3.0});
  GameFactory factory = [&](const ActionSet& cls) {
    return RegimeInputs{game, cls, ActionSet::box(1, -1.0, 1.0), scalar(0.0), 51};
  };
  const auto curve = scaling_curve(factory, ladder, Regime::kStationary);
  REQUIRE(curve.size() == 5);
  CHECK(is_non_increasing(curve, 1e-12));
  CHECK(curve.back().second.loss_learner == doctest::Approx(0.0));

  const auto lead = scaling_curve(factory, ladder, Regime::kStackelbergLeader);
  CHECK(is_non_increasing(lead, 1e-9));

  const auto single = scaling_curve(factory, ModelClassLadder({ladder[0]}), Regime::kNash);
  CHECK(single.size() == 1);
  CHECK(is_non_increasing(single, 0.0));
}
