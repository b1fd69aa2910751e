#include "modelscale/action_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "modelscale/errors.hpp"

namespace modelscale {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector project_box(const ActionSet::Box& box, const Vector& point) {
  return point.cwiseMax(box.lower).cwiseMin(box.upper);
}

Vector project_halfspace(const ActionSet::Halfspace& h, const Vector& point) {
  const double excess = h.normal.dot(point) - h.offset;
  if (excess <= 0.0) return point;
  return point - (excess / h.normal.squaredNorm()) * h.normal;
}

// Lawson-Hanson active-set solver for min ||E u - f|| subject to u >= 0.
Vector nnls(const Matrix& e, const Vector& f) {
  const auto m = e.cols();
  Vector u = Vector::Zero(m);
  std::vector<bool> passive(static_cast<std::size_t>(m), false);
  const double tol = 1e-14 * std::max(1.0, e.cwiseAbs().maxCoeff());
  for (int outer = 0; outer < 3 * m + 10; ++outer) {
    const Vector w = e.transpose() * (f - e * u);
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!passive[j] && w[j] > best) {
        best = w[j];
        t = j;
      }
    }
    if (t < 0) break;
    passive[t] = true;
    for (int inner = 0; inner < 3 * m + 10; ++inner) {
      std::vector<Eigen::Index> cols;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[j]) cols.push_back(j);
      }
      Matrix ep(e.rows(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t k = 0; k < cols.size(); ++k) ep.col(k) = e.col(cols[k]);
      const Vector zp = ep.completeOrthogonalDecomposition().solve(f);
      Vector z = Vector::Zero(m);
      for (std::size_t k = 0; k < cols.size(); ++k) z[cols[k]] = zp[k];
      bool positive = true;
      for (Eigen::Index j : cols) positive = positive && z[j] > 0.0;
      if (positive) {
        u = z;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j : cols) {
        if (z[j] <= 0.0) alpha = std::min(alpha, u[j] / (u[j] - z[j]));
      }
      u += alpha * (z - u);
      for (Eigen::Index j : cols) {
        if (u[j] <= tol) {
          u[j] = 0.0;
          passive[j] = false;
        }
      }
    }
  }
  return u;
}

// Exact projection onto {x : A x <= b} as a least-distance program: with
// y = x - p the constraints read -A y >= A p - b, and the classical NNLS
// reduction gives y from the residual of the dual problem.
std::optional<Vector> project_polyhedron(const std::vector<Vector>& rows,
                                         const std::vector<double>& rhs, const Vector& point) {
  const auto n = point.size();
  const auto m = static_cast<Eigen::Index>(rows.size());
  Matrix e(n + 1, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    e.col(j).head(n) = -rows[j];
    e(n, j) = rows[j].dot(point) - rhs[j];
  }
  Vector f = Vector::Zero(n + 1);
  f[n] = 1.0;
  const Vector r = e * nnls(e, f) - f;
  if (r.norm() < 1e-12 || std::abs(r[n]) < 1e-300) return std::nullopt;
  return Vector(point - r.head(n) / r[n]);
}

}  // namespace

ActionSet ActionSet::box(Vector lower, Vector upper) {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw ArgumentError("box bounds must be nonempty and of equal size");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i]) {
      throw ArgumentError("box requires lower <= upper in coordinate " +
                          std::to_string(i));
    }
  }
  const int dim = static_cast<int>(lower.size());
  return ActionSet(Box{std::move(lower), std::move(upper)}, dim);
}

ActionSet ActionSet::box(int dim, double lower, double upper) {
  if (dim <= 0) throw ArgumentError("box dimension must be positive");
  return box(Vector::Constant(dim, lower), Vector::Constant(dim, upper));
}

ActionSet ActionSet::singleton(const Vector& point) { return box(point, point); }

ActionSet ActionSet::halfspace(Vector normal, double offset) {
  if (normal.size() == 0) throw ArgumentError("halfspace normal is empty");
  if (!(normal.norm() > 0.0) || !normal.allFinite()) {
    throw ArgumentError("halfspace normal must be finite and nonzero");
  }
  if (!std::isfinite(offset)) throw ArgumentError("halfspace offset must be finite");
  const int dim = static_cast<int>(normal.size());
  return ActionSet(Halfspace{std::move(normal), offset}, dim);
}

ActionSet ActionSet::intersection(std::vector<ActionSet> members) {
  if (members.empty()) throw ArgumentError("intersection needs at least one member");
  const int dim = members.front().dimension();
  for (const auto& m : members) {
    if (m.dimension() != dim) {
      throw ArgumentError("intersection members must share a dimension");
    }
  }
  ActionSet set(Intersection{std::move(members)}, dim);
  // Nonemptiness: projecting a candidate must succeed.
  (void)set.project(Vector::Zero(dim));
  return set;
}

ActionSet ActionSet::product(const ActionSet& a, const ActionSet& b) {
  const int total = a.dimension() + b.dimension();
  const Box* ba = a.as_box();
  const Box* bb = b.as_box();
  if (ba != nullptr && bb != nullptr) {
    Vector lo(total), hi(total);
    lo << ba->lower, bb->lower;
    hi << ba->upper, bb->upper;
    return box(std::move(lo), std::move(hi));
  }
  return intersection({a.lift(0, total), b.lift(a.dimension(), total)});
}

ActionSet::Kind ActionSet::kind() const {
  if (std::holds_alternative<Box>(shape_)) return Kind::kBox;
  if (std::holds_alternative<Halfspace>(shape_)) return Kind::kHalfspace;
  return Kind::kIntersection;
}

Vector ActionSet::project(const Vector& point) const {
  if (point.size() != dim_) {
    throw ArgumentError("projection point has dimension " +
                        std::to_string(point.size()) + ", set has " +
                        std::to_string(dim_));
  }
  if (const Box* b = as_box()) return project_box(*b, point);
  if (const Halfspace* h = as_halfspace()) return project_halfspace(*h, point);
  return project_dykstra(point);
}

Vector ActionSet::project_dykstra(const Vector& point) const {
  const auto& members = as_intersection()->members;
  if (members.size() == 1) return members.front().project(point);

  std::vector<Vector> rows;
  std::vector<double> rhs;
  collect_constraints(rows, rhs);
  const int sweep_cap = rows.empty() ? kMaxSweeps : kExactHandoffSweeps;

  std::vector<Vector> increments(members.size(), Vector::Zero(dim_));
  Vector x = point;
  for (int sweep = 0; sweep < sweep_cap; ++sweep) {
    const Vector start = x;
    double change = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      const Vector shifted = x + increments[i];
      x = members[i].project(shifted);
      Vector next_increment = shifted - x;
      change += (next_increment - increments[i]).squaredNorm();
      increments[i] = std::move(next_increment);
    }
    // Small iterate motion alone can occur while Dykstra is still creeping
    // along a corner, so the increments must settle and x must be feasible.
    const double moved = (x - start).norm() + std::sqrt(change);
    if (moved < kSweepTolerance * std::max(1.0, x.norm())) {
      bool feasible = true;
      for (const auto& m : members) feasible = feasible && m.contains(x, 1e-10);
      if (feasible) return x;
    }
  }
  if (!rows.empty()) {
    if (auto exact = project_polyhedron(rows, rhs, point); exact && contains(*exact, 1e-9)) {
      return *exact;
    }
    throw NonConvergenceError("projection failed: the intersection appears empty");
  }
  throw NonConvergenceError("Dykstra projection did not converge within " +
                            std::to_string(kMaxSweeps) +
                            " sweeps; the intersection may be empty");
}

void ActionSet::collect_constraints(std::vector<Vector>& rows, std::vector<double>& rhs) const {
  if (const Box* b = as_box()) {
    for (int i = 0; i < dim_; ++i) {
      if (std::isfinite(b->upper[i])) {
        rows.push_back(Vector::Unit(dim_, i));
        rhs.push_back(b->upper[i]);
      }
      if (std::isfinite(b->lower[i])) {
        rows.push_back(-Vector::Unit(dim_, i));
        rhs.push_back(-b->lower[i]);
      }
    }
  } else if (const Halfspace* h = as_halfspace()) {
    const double scale = h->normal.norm();
    rows.push_back(h->normal / scale);
    rhs.push_back(h->offset / scale);
  } else {
    for (const auto& m : as_intersection()->members) m.collect_constraints(rows, rhs);
  }
}

bool ActionSet::contains(const Vector& point, double tol) const {
  if (point.size() != dim_) return false;
  if (const Box* b = as_box()) {
    return ((point - b->lower).array() >= -tol).all() &&
           ((b->upper - point).array() >= -tol).all();
  }
  if (const Halfspace* h = as_halfspace()) {
    return h->normal.dot(point) - h->offset <= tol * h->normal.norm();
  }
  for (const auto& m : as_intersection()->members) {
    if (!m.contains(point, tol)) return false;
  }
  return true;
}

bool ActionSet::strictly_contains(const Vector& point, double margin) const {
  if (point.size() != dim_) return false;
  if (const Box* b = as_box()) {
    return ((point - b->lower).array() > margin).all() &&
           ((b->upper - point).array() > margin).all();
  }
  if (const Halfspace* h = as_halfspace()) {
    return h->offset - h->normal.dot(point) > margin * h->normal.norm();
  }
  for (const auto& m : as_intersection()->members) {
    if (!m.strictly_contains(point, margin)) return false;
  }
  return true;
}

std::pair<Vector, Vector> ActionSet::bounding_box(double radius) const {
  if (const Box* b = as_box()) {
    Vector lo = b->lower.cwiseMax(-radius).cwiseMin(b->upper);
    Vector hi = b->upper.cwiseMin(radius).cwiseMax(b->lower);
    // Keep finite bounds even when the box itself lies outside the radius.
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      if (std::isinf(lo[i])) lo[i] = std::min(-radius, hi[i]);
      if (std::isinf(hi[i])) hi[i] = std::max(radius, lo[i]);
    }
    return {lo, hi};
  }
  if (as_halfspace() != nullptr) {
    return {Vector::Constant(dim_, -radius), Vector::Constant(dim_, radius)};
  }
  Vector lo = Vector::Constant(dim_, -kInf);
  Vector hi = Vector::Constant(dim_, kInf);
  for (const auto& m : as_intersection()->members) {
    if (m.as_halfspace() != nullptr) continue;
    auto [mlo, mhi] = m.bounding_box(radius);
    lo = lo.cwiseMax(mlo);
    hi = hi.cwiseMin(mhi);
  }
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (std::isinf(lo[i])) lo[i] = -radius;
    if (std::isinf(hi[i])) hi[i] = radius;
    if (lo[i] > hi[i]) std::swap(lo[i], hi[i]);
  }
  return {lo, hi};
}

std::vector<Vector> ActionSet::sample_points(std::mt19937_64& rng, int count,
                                             double radius) const {
  std::vector<Vector> points;
  if (const Box* b = as_box(); b != nullptr && dim_ <= 10 &&
                               b->lower.allFinite() && b->upper.allFinite()) {
    for (std::uint32_t mask = 0; mask < (1u << dim_); ++mask) {
      Vector v(dim_);
      for (int i = 0; i < dim_; ++i) v[i] = (mask >> i & 1u) ? b->upper[i] : b->lower[i];
      points.push_back(std::move(v));
    }
  }
  auto [lo, hi] = bounding_box(radius);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < count; ++k) {
    Vector v(dim_);
    for (int i = 0; i < dim_; ++i) v[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
    points.push_back(project(v));
  }
  return points;
}

ActionSet ActionSet::lift(int offset, int total_dim) const {
  if (offset < 0 || offset + dim_ > total_dim) {
    throw ArgumentError("lift target does not fit the set");
  }
  if (const Box* b = as_box()) {
    Vector lo = Vector::Constant(total_dim, -kInf);
    Vector hi = Vector::Constant(total_dim, kInf);
    lo.segment(offset, dim_) = b->lower;
    hi.segment(offset, dim_) = b->upper;
    return box(std::move(lo), std::move(hi));
  }
  if (const Halfspace* h = as_halfspace()) {
    Vector n = Vector::Zero(total_dim);
    n.segment(offset, dim_) = h->normal;
    return halfspace(std::move(n), h->offset);
  }
  std::vector<ActionSet> lifted;
  for (const auto& m : as_intersection()->members) lifted.push_back(m.lift(offset, total_dim));
  return intersection(std::move(lifted));
}

// ---------------------------------------------------------------------------

ModelClassLadder::ModelClassLadder(std::vector<ActionSet> classes,
                                   std::uint64_t check_seed,
                                   int samples_per_class)
    : classes_(std::move(classes)) {
  if (classes_.empty()) throw ArgumentError("ladder needs at least one class");
  const int dim = classes_.front().dimension();
  for (const auto& c : classes_) {
    if (c.dimension() != dim) throw ArgumentError("ladder classes differ in dimension");
  }
  if (!is_nested(classes_, check_seed, samples_per_class)) {
    throw ArgumentError("model classes are not nested");
  }
}

ModelClassLadder ModelClassLadder::shrinking_boxes(const Vector& center,
                                                   const std::vector<double>& radii) {
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  std::vector<ActionSet> classes;
  for (double r : sorted) {
    classes.push_back(ActionSet::box(center.array() - r, center.array() + r));
  }
  return ModelClassLadder(std::move(classes));
}

bool ModelClassLadder::is_nested(const std::vector<ActionSet>& classes,
                                 std::uint64_t seed, int samples_per_class) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto samples = classes[i].sample_points(rng, samples_per_class);
    for (std::size_t j = i + 1; j < classes.size(); ++j) {
      for (const auto& s : samples) {
        if ((classes[j].project(s) - s).norm() > kNestingTolerance) return false;
      }
    }
  }
  return true;
}

}  // namespace modelscale
