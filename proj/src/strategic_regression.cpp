#include "modelscale/strategic_regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "modelscale/errors.hpp"

namespace modelscale {

const char* to_string(RegressionClass c) {
  return c == RegressionClass::kSmall ? "small" : "large";
}

void RegressionInstance::validate() const {
  if (beta.size() == 0 || !beta.allFinite() || beta.norm() == 0.0) {
    throw ArgumentError("regression instance needs a finite nonzero beta");
  }
  if (!std::isfinite(k_min) || !std::isfinite(k_max) || k_min > k_max) {
    throw ArgumentError("k range must be a finite interval with k_min <= k_max");
  }
}

Vector RegressionInstance::env_action(double k) const { return (k / beta.norm()) * beta; }

Vector small_model_best_theta(const RegressionInstance& inst, double k) {
  inst.validate();
  const Vector e = inst.env_action(k);
  return inst.beta - e * (e.dot(inst.beta) / (1.0 + e.squaredNorm()));
}

double small_model_learner_loss(const RegressionInstance& inst, double k) {
  inst.validate();
  return inst.beta.squaredNorm() * k * k / (1.0 + k * k);
}

double small_model_env_objective(const RegressionInstance& inst, double k) {
  inst.validate();
  return inst.beta.norm() * k / (1.0 + k * k);
}

StackelbergOutcome small_model_equilibrium(const RegressionInstance& inst) {
  inst.validate();
  // k / (1 + k^2) rises on [-1, 1] and falls outside it.
  double k = 1.0;
  if (inst.k_max < 1.0) k = inst.k_max;
  if (inst.k_min > 1.0) k = inst.k_min;
  return {RegressionClass::kSmall, k, small_model_learner_loss(inst, k),
          small_model_env_objective(inst, k)};
}

LargeModelClosedForm large_model_closed_form(int dim, double k) {
  if (dim < 1 || !std::isfinite(k)) throw ArgumentError("dimension must be positive and k finite");
  const double d = dim;
  const double k2 = k * k;
  LargeModelClosedForm f;
  f.m = std::pow(1.0 / 3.0, d / 2.0 + 1.0) * std::exp(-k2 / 3.0);
  f.y = std::pow(1.0 / 5.0, d / 2.0) * std::exp(-2.0 * k2 / 5.0);
  const double ratio = f.m * f.m / f.y;
  f.z = -ratio / (1.0 + k2);
  f.c = (1.0 / (1.0 + f.z * k2)) * (1.0 / (1.0 + k2)) * (1.0 + 2.0 * ratio * k2);
  f.p = -(f.m / f.y) * k * (2.0 + f.c);
  return f;
}

LargeModelFit large_model_best_theta(const RegressionInstance& inst, double k) {
  inst.validate();
  const auto f = large_model_closed_form(inst.dim(), k);
  return {f.c * inst.beta, f.p * inst.beta.norm()};
}

double large_model_learner_loss(const RegressionInstance& inst, double k) {
  inst.validate();
  const auto f = large_model_closed_form(inst.dim(), k);
  const double c = f.c, p = f.p, m = f.m;
  const double factor = 1.0 - 2.0 * c + c * c + c * c * k * k + 2.0 * p * m * c * k +
                        4.0 * p * m * k + p * p * f.y;
  return factor * inst.beta.squaredNorm();
}

double large_model_env_objective(const RegressionInstance& inst, double k) {
  inst.validate();
  const auto f = large_model_closed_form(inst.dim(), k);
  return inst.beta.norm() * (f.c * k + 3.0 * f.m * f.p);
}

namespace {

// Evenly spaced points from lo to hi with spacing close to h; hi is always
// included.
std::vector<double> k_grid(double lo, double hi, double h) {
  if (hi <= lo) return {lo};
  const auto steps = static_cast<long>(std::ceil((hi - lo) / h - 1e-9));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (long j = 0; j < steps; ++j) out.push_back(lo + static_cast<double>(j) * h);
  out.push_back(hi);
  return out;
}

}  // namespace

StackelbergOutcome large_model_equilibrium(const RegressionInstance& inst,
                                           const KSearchOptions& options) {
  inst.validate();
  if (!(options.resolution > 0.0) || options.zoom_rounds < 0) {
    throw ArgumentError("k search needs a positive resolution");
  }
  double best_k = inst.k_min;
  double best = -std::numeric_limits<double>::infinity();
  auto scan = [&](double lo, double hi, double h) {
    for (double k : k_grid(lo, hi, h)) {
      const double v = large_model_env_objective(inst, k);
      if (v > best || (v == best && k < best_k)) {
        best = v;
        best_k = k;
      }
    }
  };
  double h = options.resolution;
  scan(inst.k_min, inst.k_max, h);
  for (int round = 0; round < options.zoom_rounds; ++round) {
    const double lo = std::max(inst.k_min, best_k - h);
    const double hi = std::min(inst.k_max, best_k + h);
    h /= 10.0;
    scan(lo, hi, h);
  }
  return {RegressionClass::kLarge, best_k, large_model_learner_loss(inst, best_k), best};
}

ClassComparison compare_model_classes(const RegressionInstance& inst,
                                      const KSearchOptions& options) {
  ClassComparison out;
  out.small = small_model_equilibrium(inst);
  out.large = large_model_equilibrium(inst, options);
  out.reverse_scaling = out.large.learner_loss > out.small.learner_loss;
  out.max_pointwise_excess = -std::numeric_limits<double>::infinity();
  for (double k : k_grid(inst.k_min, inst.k_max, options.resolution)) {
    out.max_pointwise_excess =
        std::max(out.max_pointwise_excess,
                 large_model_learner_loss(inst, k) - small_model_learner_loss(inst, k));
  }
  out.pointwise_dominance = out.max_pointwise_excess <= 1e-9 * std::max(1.0, inst.beta.squaredNorm());
  return out;
}

std::vector<RegressionCurveRow> loss_curve(const RegressionInstance& inst, int points) {
  inst.validate();
  if (points < 1) throw ArgumentError("loss curve needs at least one point");
  std::vector<RegressionCurveRow> rows;
  rows.reserve(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) {
    const double k = points == 1 ? inst.k_min
                                 : inst.k_min + (inst.k_max - inst.k_min) * j / (points - 1);
    rows.push_back({k, small_model_learner_loss(inst, k), large_model_learner_loss(inst, k),
                    small_model_env_objective(inst, k), large_model_env_objective(inst, k)});
  }
  return rows;
}

}  // namespace modelscale
