#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "modelscale/action_set.hpp"
#include "modelscale/errors.hpp"
#include "modelscale/game.hpp"

namespace modelscale {

// Restricting the learner's class to improve its Nash loss. For a strongly
// monotone game whose Nash point (th*, e*) is interior and not Pareto
// optimal, move along the steepest descent direction of the composed loss
// fbar(th) = f_l(th, BR_e(th)) to th' = th* - delta v, then cut the learner
// set with two halfspaces so that th' becomes the learner's best response to
// e' = BR_e(th') while th* is excluded.

enum class RestrictionStage {
  kAudit,
  kNash,
  kInterior,
  kPareto,
  kGradient,
  kDirection,
  kDelta,
  kConstruct,
  kVerify,
};

std::string to_string(RestrictionStage stage);

class RestrictionError : public Error {
 public:
  RestrictionError(RestrictionStage stage, const std::string& what,
                   bool hypothesis_not_satisfied = false);
  RestrictionStage stage() const { return stage_; }
  // True when the Nash point is Pareto optimal on the search grid, which is
  // the expected outcome for zero-sum games.
  bool hypothesis_not_satisfied() const { return hypothesis_; }

 private:
  RestrictionStage stage_;
  bool hypothesis_;
};

inline constexpr double kFdStep = 1e-5;

// Environment best response solved tightly enough for finite differencing.
Vector env_best_response(const GameSpec& game, const Vector& theta, const ActionSet& env_set);

// d BR_e / d theta by central differences (dim_env x dim_learner). Throws
// RestrictionError(kGradient) when BR_e(theta) sits on the boundary of
// env_set, where the response is not differentiable.
Matrix br_jacobian(const GameSpec& game, const Vector& theta, const ActionSet& env_set,
                   double fd_step = kFdStep);

// grad_theta f_l + J_BR^T grad_e f_l at (theta, BR_e(theta)); grad_e f_l is
// taken by central differences of loss_learner.
Vector fbar_gradient(const GameSpec& game, const Vector& theta, const ActionSet& env_set,
                     double fd_step = kFdStep);

// Unit vector along grad_fbar; throws RestrictionError(kDirection) when the
// gradient vanishes.
Vector choose_direction(const Vector& grad_fbar);

// First delta in 1, 1/2, ..., 2^-60 with fbar(th* - delta v) < fbar(th*) -
// 1e-10 and th* - delta v strictly inside learner_set (when supplied).
double delta_search(const GameSpec& game, const Vector& theta_star, const Vector& v,
                    const ActionSet& env_set, const ActionSet* learner_set = nullptr);

// learner_set cut by {<v, th> <= <v, th'>} and {<-g, th> <= <-g, th'>} with
// g = grad_theta f_l(th', BR_e(th')). The second cut is dropped when g = 0.
ActionSet construct_restriction(const GameSpec& game, const Vector& theta_star,
                                const Vector& theta_prime, const Vector& v,
                                const ActionSet& learner_set, const ActionSet& env_set);

struct RestrictionCertificate {
  JointAction original_nash;
  Vector grad_fbar;
  Vector direction;
  double delta = 0.0;
  JointAction restricted_point;
  ActionSet restricted_set;
  double loss_original = 0.0;
  double loss_restricted = 0.0;
  double improvement = 0.0;
  double restricted_residual = 0.0;

  // One line of key=value fields separated by ';', vectors as
  // comma-separated decimals with 17 significant digits.
  std::string to_record() const;
};

// Parsed form of a certificate record: every field as a list of numbers.
std::map<std::string, std::vector<double>> parse_certificate_record(const std::string& record);

struct RestrictionOptions {
  int audit_samples = 2000;
  std::uint64_t audit_seed = 1;
  int pareto_resolution = 201;
  long psgd_horizon = 2000;
  double nash_tolerance = 1e-10;
  double fd_step = kFdStep;
};

// Full pipeline: audit, Nash, interior and Pareto checks, then gradient,
// direction, delta, construction and verification. Failures raise
// RestrictionError tagged with the stage.
RestrictionCertificate certify_restriction(const GameSpec& game, const ActionSet& learner_set,
                                           const ActionSet& env_set,
                                           const RestrictionOptions& options = {});

}  // namespace modelscale
