#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "modelscale/errors.hpp"
#include "modelscale/instances.hpp"
#include "modelscale/model_selection.hpp"

using namespace modelscale;

TEST_CASE("confidence radius examples") {
  CHECK(confidence_radius(1.0, 1.0, 1, std::exp(-1.0), 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(confidence_radius(2.0, 1.0, 100, 0.1, 1.0) ==
        doctest::Approx((4.0 * std::log(10.0) + 8.0) / 100.0).epsilon(1e-15));
  CHECK(std::abs(confidence_radius(2.0, 1.0, 100, 0.1, 1.0) - 0.17210) < 1e-5);
  const double r = confidence_radius(1.3, 0.7, 37, 0.05, 2.0);
  CHECK(std::abs(confidence_radius(1.3, 0.7, 74, 0.05, 2.0) * 2.0 - r) <= 1e-15 * r);
  ConfidenceRadius cr{1.3, 0.7, 37, 0.05, 2.0};
  CHECK(cr.value() == r);
}

TEST_CASE("confidence radius argument checks") {
  CHECK_THROWS_AS(confidence_radius(1, 1, 10, 0.0, 1), ArgumentError);
  CHECK_THROWS_AS(confidence_radius(1, 1, 10, 1.0, 1), ArgumentError);
  CHECK_THROWS_AS(confidence_radius(1, 1, 0, 0.5, 1), ArgumentError);
  CHECK_THROWS_AS(confidence_radius(1, 0, 10, 0.5, 1), ArgumentError);
}

TEST_CASE("confidence radius monotonicity over random parameters") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lip(0.1, 5.0), mu(0.05, 2.0), del(1e-6, 0.99), sc(0.01, 10.0);
  std::uniform_int_distribution<long> horizon(1, 100000);
  for (int k = 0; k < 1000; ++k) {
    const double l = lip(rng), m = mu(rng), d = del(rng), s = sc(rng);
    const long t = horizon(rng);
    const double r = confidence_radius(l, m, t, d, s);
    CHECK(r > 0.0);
    CHECK(confidence_radius(l, m, t + 1, d, s) < r);
    CHECK(confidence_radius(l * 1.01, m, t, d, s) > r);
    CHECK(confidence_radius(l, m, t, d * 0.99, s) > r);
  }
}

TEST_CASE("suboptimality gaps") {
  auto g = suboptimality_gaps({0.0, 0.5, 1.0});
  CHECK(g.gaps == std::vector<double>{0.0, 0.5, 1.0});
  REQUIRE(g.min_gap.has_value());
  CHECK(*g.min_gap == 0.5);
  CHECK_FALSE(suboptimality_gaps({0.2, 0.2}).min_gap.has_value());
  g = suboptimality_gaps({1.0, 0.75, 0.9});
  CHECK(*g.min_gap == doctest::Approx(0.15).epsilon(1e-12));
  CHECK_THROWS_AS(suboptimality_gaps({}), ArgumentError);
}

TEST_CASE("shipped arms have the advertised Nash losses") {
  const auto inst = instances::four_arm_instance(0.25, 0.0);
  for (std::size_t i = 0; i < inst.arms.size(); ++i) {
    const auto prob = inst.factory(i, inst.arms[i]);
    const auto nash = solve_nash(prob.game, inst.arms[i], prob.env_set);
    CHECK(nash.loss_learner == doctest::Approx(inst.nash_losses[i]).epsilon(1e-9));
  }
}

TEST_CASE("two separated arms: the better one wins") {
  const auto inst = instances::selection_instance({0.0, 0.5}, 0.5);
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SelectionOptions opt;
    opt.seed = seed;
    const auto rep = successive_elimination(inst.arms, inst.factory, opt);
    if (rep.winner && *rep.winner == 0) ++wins;
  }
  CHECK(wins >= 45);
}

TEST_CASE("identical arms end inconclusive at the budget") {
  const auto inst = instances::selection_instance({0.0, 0.0, 0.0}, 0.3);
  SelectionOptions opt;
  opt.seed = 3;
  opt.step_budget = 100000;
  const auto rep = successive_elimination(inst.arms, inst.factory, opt);
  CHECK(rep.inconclusive);
  CHECK_FALSE(rep.winner.has_value());
  CHECK(rep.survivors.size() == 3);
  CHECK(rep.total_steps <= opt.step_budget);
}

TEST_CASE("elimination log reconstructs the active set and the step count") {
  const auto inst = instances::four_arm_instance(0.25, 0.3);
  SelectionOptions opt;
  opt.seed = 17;
  const auto rep = successive_elimination(inst.arms, inst.factory, opt);
  REQUIRE(rep.winner.has_value());
  std::map<int, std::set<std::size_t>> pulled;
  std::map<int, long> horizon;
  for (const auto& row : rep.epoch_log) {
    pulled[row.epoch].insert(row.arm);
    horizon[row.epoch] = row.horizon;
  }
  std::set<std::size_t> active{0, 1, 2, 3};
  long steps = 0;
  std::size_t prev_size = active.size();
  for (int tau = 1; tau <= rep.epochs; ++tau) {
    CHECK(pulled[tau] == active);
    CHECK(horizon[tau] == static_cast<long>(std::ceil(opt.alpha * std::ldexp(1.0, tau))));
    steps += static_cast<long>(active.size()) * horizon[tau];
    for (const auto& ev : rep.elimination_log) {
      if (ev.epoch == tau) {
        CHECK(ev.bound_gap > 0.0);
        active.erase(ev.eliminated);
      }
    }
    CHECK(active.size() <= prev_size);
    prev_size = active.size();
  }
  CHECK(steps == rep.total_steps);
  CHECK(active == std::set<std::size_t>{*rep.winner});
  for (const auto& arm : rep.arms) CHECK(arm.active == (arm.class_index == *rep.winner));
}

TEST_CASE("the best arm survives in at least (1 - delta) of runs") {
  const auto inst = instances::four_arm_instance(0.25, 0.3);
  int kept = 0;
  for (std::uint64_t seed = 100; seed < 150; ++seed) {
    SelectionOptions opt;
    opt.seed = seed;
    const auto rep = successive_elimination(inst.arms, inst.factory, opt);
    if (std::find(rep.survivors.begin(), rep.survivors.end(), 0u) != rep.survivors.end()) ++kept;
  }
  CHECK(kept >= 45);
}

TEST_CASE("oracle mode identifies the argmin in one epoch") {
  const auto inst = instances::selection_instance({0.5, 0.0, 1.0, 0.25}, 0.0);
  SelectionOptions opt;
  opt.scale = 1e-12;
  const auto rep = successive_elimination(inst.arms, inst.factory, opt);
  REQUIRE(rep.winner.has_value());
  CHECK(*rep.winner == 1);
  CHECK(rep.epochs == 1);
}

TEST_CASE("maximize flag picks the highest-loss arm") {
  const auto inst = instances::selection_instance({0.5, 0.0, 1.0}, 0.0);
  SelectionOptions opt;
  opt.scale = 1e-12;
  opt.maximize = true;
  const auto rep = successive_elimination(inst.arms, inst.factory, opt);
  REQUIRE(rep.winner.has_value());
  CHECK(*rep.winner == 2);
}

TEST_CASE("successive elimination is deterministic given the seed") {
  const auto inst = instances::four_arm_instance(0.5, 0.3);
  SelectionOptions opt;
  opt.seed = 9;
  const auto a = successive_elimination(inst.arms, inst.factory, opt);
  const auto b = successive_elimination(inst.arms, inst.factory, opt);
  REQUIRE(a.epoch_log.size() == b.epoch_log.size());
  for (std::size_t i = 0; i < a.epoch_log.size(); ++i) {
    CHECK(a.epoch_log[i].estimate == b.epoch_log[i].estimate);
  }
}

TEST_CASE("sample complexity grows as the gap shrinks") {
  double steps[3];
  const double gaps[3] = {0.25, 0.5, 1.0};
  for (int g = 0; g < 3; ++g) {
    const auto inst = instances::four_arm_instance(gaps[g], 0.3);
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      SelectionOptions opt;
      opt.seed = seed;
      total += static_cast<double>(successive_elimination(inst.arms, inst.factory, opt).total_steps);
    }
    steps[g] = total / 10.0;
  }
  CHECK(steps[0] > steps[1]);
  CHECK(steps[1] > steps[2]);
}

TEST_CASE("argument checks") {
  const auto inst = instances::four_arm_instance(0.5, 0.3);
  SelectionOptions opt;
  opt.delta = 1.5;
  CHECK_THROWS_AS(successive_elimination(inst.arms, inst.factory, opt), ArgumentError);
  CHECK_THROWS_AS(successive_elimination({}, inst.factory, SelectionOptions{}), ArgumentError);
}
