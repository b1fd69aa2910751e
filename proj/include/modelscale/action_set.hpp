#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <utility>
#include <variant>
#include <vector>

namespace modelscale {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Compact convex constraint region with an exact Euclidean projection.
//
// Three shapes are supported: an axis-aligned box (bounds may be infinite),
// a closed halfspace {x : <normal, x> <= offset}, and a finite intersection
// of other action sets. Intersections are projected with Dykstra's
// alternating-projection scheme, which converges to the true projection for
// any nonempty intersection of closed convex sets, with an exact
// least-distance solve when the sweeps stall.
class ActionSet {
 public:
  struct Box {
    Vector lower;
    Vector upper;
  };
  struct Halfspace {
    Vector normal;
    double offset = 0.0;
  };
  struct Intersection {
    std::vector<ActionSet> members;
  };

  enum class Kind { kBox, kHalfspace, kIntersection };

  // Dykstra stopping rule and sweep cap.
  static constexpr int kMaxSweeps = 10000;
  static constexpr double kSweepTolerance = 1e-12;
  // Polyhedral intersections that Dykstra has not settled after this many
  // sweeps (narrow corners converge slowly) are finished by an exact
  // least-distance solve.
  static constexpr int kExactHandoffSweeps = 200;

  static ActionSet box(Vector lower, Vector upper);
  static ActionSet box(int dim, double lower, double upper);
  static ActionSet singleton(const Vector& point);
  static ActionSet halfspace(Vector normal, double offset);
  // Throws NonConvergenceError when the members have no common point.
  static ActionSet intersection(std::vector<ActionSet> members);
  // Cartesian product a x b, with a's coordinates first.
  static ActionSet product(const ActionSet& a, const ActionSet& b);

  int dimension() const { return dim_; }
  Kind kind() const;
  const Box* as_box() const { return std::get_if<Box>(&shape_); }
  const Halfspace* as_halfspace() const { return std::get_if<Halfspace>(&shape_); }
  const Intersection* as_intersection() const { return std::get_if<Intersection>(&shape_); }

  Vector project(const Vector& point) const;

  bool contains(const Vector& point, double tol = 1e-9) const;
  // True when every defining constraint holds with slack at least `margin`.
  bool strictly_contains(const Vector& point, double margin) const;

  // Axis-aligned bounds of the set; unbounded directions are clipped to
  // [-radius, radius].
  std::pair<Vector, Vector> bounding_box(double radius = 10.0) const;

  // Points of the set: the vertices first when the set is a bounded box of
  // dimension <= 10, then projections of uniform draws from the bounding box.
  std::vector<Vector> sample_points(std::mt19937_64& rng, int count,
                                    double radius = 10.0) const;

  // Embeds the set into R^total_dim at coordinates [offset, offset + dim),
  // leaving the other coordinates unconstrained.
  ActionSet lift(int offset, int total_dim) const;

 private:
  ActionSet(std::variant<Box, Halfspace, Intersection> shape, int dim)
      : shape_(std::move(shape)), dim_(dim) {}

  Vector project_dykstra(const Vector& point) const;
  // Appends the rows of A x <= b describing this set (all shapes here are
  // polyhedral); infinite box bounds produce no row.
  void collect_constraints(std::vector<Vector>& rows, std::vector<double>& rhs) const;

  std::variant<Box, Halfspace, Intersection> shape_;
  int dim_;
};

// Ordered, nested sequence of learner model classes Theta_1 ⊆ ... ⊆ Theta_N.
class ModelClassLadder {
 public:
  static constexpr double kNestingTolerance = 1e-9;

  // Throws ArgumentError if the classes are empty, differ in dimension, or
  // fail the sampled nesting check.
  explicit ModelClassLadder(std::vector<ActionSet> classes,
                            std::uint64_t check_seed = 7,
                            int samples_per_class = 64);

  // Boxes [center - r_k, center + r_k] for increasing radii.
  static ModelClassLadder shrinking_boxes(const Vector& center,
                                          const std::vector<double>& radii);

  // Sampled nesting check: every sample of class i must be a fixed point of
  // the projection onto every class j > i.
  static bool is_nested(const std::vector<ActionSet>& classes,
                        std::uint64_t seed, int samples_per_class);

  std::size_t size() const { return classes_.size(); }
  const ActionSet& operator[](std::size_t i) const { return classes_[i]; }
  const std::vector<ActionSet>& classes() const { return classes_; }

 private:
  std::vector<ActionSet> classes_;
};

}  // namespace modelscale
