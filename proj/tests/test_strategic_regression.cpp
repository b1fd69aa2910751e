#include <cmath>

#include "doctest.h"
#include "modelscale/errors.hpp"
#include "modelscale/strategic_regression.hpp"
#include "modelscale/regression_monte_carlo.hpp"

using namespace modelscale;

namespace {

RegressionInstance make(std::initializer_list<double> beta, double lo = -10.0, double hi = 10.0) {
  RegressionInstance inst;
  inst.beta = Vector(static_cast<Eigen::Index>(beta.size()));
  int i = 0;
  for (double b : beta) inst.beta[i++] = b;
  inst.k_min = lo;
  inst.k_max = hi;
  return inst;
}

}  // namespace

TEST_CASE("small model best response") {
  const auto inst = make({1.0, 0.0});
  CHECK((small_model_best_theta(inst, 0.0) - inst.beta).norm() == 0.0);
  CHECK((small_model_best_theta(inst, 1.0) - 0.5 * inst.beta).norm() < 1e-15);
  const auto b = make({3.0, 4.0});
  // Hand substitution: e = k beta/5, so the correction is k^2/(1+k^2) beta.
  CHECK((small_model_best_theta(b, 2.0) - b.beta / 5.0).norm() < 1e-14);
}

TEST_CASE("small model equilibrium") {
  auto eq = small_model_equilibrium(make({1.0, 0.0}));
  CHECK(eq.k_star == 1.0);
  CHECK(eq.learner_loss == doctest::Approx(0.5).epsilon(1e-15));
  eq = small_model_equilibrium(make({3.0, 4.0}));
  CHECK(std::abs(eq.learner_loss - 12.5) < 1e-12);
  CHECK(eq.env_objective == doctest::Approx(2.5));

  // 1-D grid oracle at spacing 1e-4.
  const auto inst = make({0.3, -1.2});
  double best_k = 0.0, best = -1e300;
  for (long j = 0; j <= 200000; ++j) {
    const double k = -10.0 + 1e-4 * j;
    const double v = k * inst.beta.norm() / (1.0 + k * k);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  CHECK(std::abs(best_k - small_model_equilibrium(inst).k_star) <= 1e-4);

  // Range not containing 1: the objective is monotone on each side.
  CHECK(small_model_equilibrium(make({1.0}, -3.0, 0.5)).k_star == 0.5);
  CHECK(small_model_equilibrium(make({1.0}, 2.0, 4.0)).k_star == 2.0);
}

TEST_CASE("small model objective peaks at k = 1 (derivative sign change)") {
  const auto inst = make({2.0, 1.0});
  const double h = 1e-6;
  auto deriv = [&](double k) {
    return (small_model_env_objective(inst, k + h) - small_model_env_objective(inst, k - h)) / (2 * h);
  };
  CHECK(deriv(0.99) > 0.0);
  CHECK(deriv(1.01) < 0.0);
}

TEST_CASE("large model closed form at k = 0") {
  const auto f = large_model_closed_form(2, 0.0);
  CHECK(f.m == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(f.y == doctest::Approx(0.2).epsilon(1e-15));
  // z = -m^2 / y at k = 0.
  CHECK(f.z == doctest::Approx(-5.0 / 81.0).epsilon(1e-15));
  CHECK(f.c == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.p == 0.0);
  CHECK(std::abs(large_model_learner_loss(make({1.0, 0.0}), 0.0)) < 1e-15);
  CHECK(large_model_env_objective(make({1.0, 2.0}), 0.0) == 0.0);
}

TEST_CASE("large model closed form for large k") {
  const auto f = large_model_closed_form(2, 40.0);
  CHECK(f.m < 1e-200);
  CHECK(std::abs(f.c) < 1e-3);
  // p itself grows like exp(k^2 / 15); the fitted bump term m p still vanishes.
  CHECK(std::abs(f.p) > 1e40);
  CHECK(std::abs(f.m * f.p) < 1e-100);
  for (int d = 1; d <= 6; ++d) {
    for (double k = -10.0; k <= 10.0; k += 0.37) {
      const auto g = large_model_closed_form(d, k);
      CHECK(g.y > 0.0);
      CHECK(std::isfinite(g.c));
      CHECK(std::isfinite(g.p));
    }
  }
}

TEST_CASE("large model loss near the population optimum") {
  const auto inst = make({1.0, 0.0});
  CHECK(std::abs(large_model_learner_loss(inst, 3.4) - 0.78) < 0.01);
  const auto eq = large_model_equilibrium(inst);
  CHECK(std::abs(eq.k_star - 3.4) <= 0.1);
  CHECK(eq.learner_loss >= 0.76);
  CHECK(eq.learner_loss <= 0.80);
}

TEST_CASE("zoomed search refines the coarse grid") {
  const auto inst = make({1.0, 1.0});
  const auto coarse = large_model_equilibrium(inst, {1e-3, 0});
  const auto fine = large_model_equilibrium(inst, {1e-3, 2});
  CHECK(fine.env_objective >= coarse.env_objective);
  CHECK(std::abs(fine.k_star - coarse.k_star) <= 1e-3 + 1e-12);
  // The derivative of the objective is near zero at the refined optimum.
  const double h = 1e-6;
  const double slope = (large_model_env_objective(inst, fine.k_star + h) -
                        large_model_env_objective(inst, fine.k_star - h)) / (2 * h);
  CHECK(std::abs(slope) < 1e-4);
}

TEST_CASE("compare model classes at d = 2") {
  for (auto beta : {make({1.0, 0.0}), make({3.0, 4.0}), make({-0.2, 0.7})}) {
    const auto cmp = compare_model_classes(beta);
    const double b2 = beta.beta.squaredNorm();
    CHECK(cmp.small.learner_loss == doctest::Approx(0.5 * b2).epsilon(1e-12));
    CHECK(cmp.large.learner_loss / b2 == doctest::Approx(0.78).epsilon(0.03));
    CHECK(cmp.reverse_scaling);
    CHECK(cmp.pointwise_dominance);
    CHECK(std::abs((cmp.large.learner_loss - cmp.small.learner_loss) - 0.28 * b2) <= 0.03 * b2);
  }
}

TEST_CASE("degenerate k range gives no manipulation") {
  const auto cmp = compare_model_classes(make({1.0, 2.0}, 0.0, 0.0));
  CHECK(cmp.small.learner_loss == 0.0);
  CHECK(std::abs(cmp.large.learner_loss) < 1e-15);
  CHECK_FALSE(cmp.reverse_scaling);
}

TEST_CASE("losses scale as ||beta||^2") {
  const auto a = make({0.4, -1.1});
  auto b = a;
  b.beta *= 2.0;
  for (double k : {-3.0, 0.3, 1.0, 3.4, 7.0}) {
    CHECK(std::abs(small_model_learner_loss(b, k) / small_model_learner_loss(a, k) - 4.0) < 1e-12);
    CHECK(std::abs(large_model_learner_loss(b, k) / large_model_learner_loss(a, k) - 4.0) < 1e-12);
  }
}

TEST_CASE("loss curve rows") {
  const auto rows = loss_curve(make({1.0, 0.0}), 201);
  REQUIRE(rows.size() == 201);
  CHECK(rows.front().k == -10.0);
  CHECK(rows.back().k == 10.0);
  for (const auto& r : rows) CHECK(r.large_loss <= r.small_loss + 1e-9);
  CHECK_THROWS_AS(loss_curve(make({1.0}), 0), ArgumentError);
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(make({0.0, 0.0}).validate(), ArgumentError);
  CHECK_THROWS_AS(make({1.0}, 2.0, 1.0).validate(), ArgumentError);
  CHECK_THROWS_AS(large_model_closed_form(0, 1.0), ArgumentError);
}

TEST_CASE("closed forms agree with Monte Carlo at 1e6 samples") {
  struct Case {
    RegressionInstance inst;
    double k;
  };
  const Case cases[] = {{make({1.0, 0.0}), 0.5}, {make({0.6, 0.8}), 1.0}, {make({1.0, -2.0}), 2.0},
                        {make({1.0, 1.0, 1.0}), 0.8}, {make({2.0}), 5.0}};
  std::uint64_t seed = 1000;
  for (const auto& c : cases) {
    CAPTURE(c.k);
    CAPTURE(c.inst.dim());
    const auto mc = mc::regression_monte_carlo(c.inst, c.k, 1000000, seed);
    seed += 10;
    const auto f = large_model_closed_form(c.inst.dim(), c.k);
    CHECK(mc.gauss.agrees(3.0 * f.m));
    CHECK(mc.gauss2.agrees(f.y));
    CHECK(mc.gauss_x.agrees(-2.0 * f.m * c.k));
    CHECK(mc.small_coef.agrees(1.0 / (1.0 + c.k * c.k)));
    CHECK(mc.small_loss.agrees(small_model_learner_loss(c.inst, c.k)));
    CHECK(mc.small_env.agrees(small_model_env_objective(c.inst, c.k)));
    CHECK(mc.large_c.agrees(f.c));
    CHECK(mc.large_p.agrees(f.p));
    CHECK(mc.large_loss.agrees(large_model_learner_loss(c.inst, c.k)));
    CHECK(mc.large_env.agrees(large_model_env_objective(c.inst, c.k)));
  }
}
