#include "modelscale/restriction.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "modelscale/equilibrium.hpp"

namespace modelscale {

namespace {

constexpr double kInnerTol = 1e-12;
constexpr double kBoundaryGradient = 1e-7;

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_vector(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += format_number(v[i]);
  }
  return out;
}

double fbar(const GameSpec& game, const Vector& theta, const ActionSet& env_set) {
  return game.loss_learner(theta, env_best_response(game, theta, env_set));
}

}  // namespace

std::string to_string(RestrictionStage stage) {
  switch (stage) {
    case RestrictionStage::kAudit: return "audit";
    case RestrictionStage::kNash: return "nash";
    case RestrictionStage::kInterior: return "interior";
    case RestrictionStage::kPareto: return "pareto";
    case RestrictionStage::kGradient: return "gradient";
    case RestrictionStage::kDirection: return "direction";
    case RestrictionStage::kDelta: return "delta";
    case RestrictionStage::kConstruct: return "construct";
    case RestrictionStage::kVerify: return "verify";
  }
  return "verify";
}

RestrictionError::RestrictionError(RestrictionStage stage, const std::string& what,
                                   bool hypothesis_not_satisfied)
    : Error("[" + to_string(stage) + "] " + what), stage_(stage), hypothesis_(hypothesis_not_satisfied) {}

Vector env_best_response(const GameSpec& game, const Vector& theta, const ActionSet& env_set) {
  return best_response(game, Player::kEnv, theta, env_set, kInnerTol);
}

Matrix br_jacobian(const GameSpec& game, const Vector& theta, const ActionSet& env_set,
                   double fd_step) {
  const Vector br = env_best_response(game, theta, env_set);
  if (game.grad_env(theta, br).norm() > kBoundaryGradient) {
    throw RestrictionError(RestrictionStage::kGradient,
                           "environment best response lies on the boundary; BR_e is not smooth here");
  }
  Matrix jac(game.dim_env, game.dim_learner);
  for (int j = 0; j < game.dim_learner; ++j) {
    Vector plus = theta, minus = theta;
    plus[j] += fd_step;
    minus[j] -= fd_step;
    jac.col(j) = (env_best_response(game, plus, env_set) - env_best_response(game, minus, env_set)) /
                 (2.0 * fd_step);
  }
  return jac;
}

Vector fbar_gradient(const GameSpec& game, const Vector& theta, const ActionSet& env_set,
                     double fd_step) {
  const Vector e = env_best_response(game, theta, env_set);
  const Matrix jac = br_jacobian(game, theta, env_set, fd_step);
  Vector grad_e(game.dim_env);
  for (int i = 0; i < game.dim_env; ++i) {
    Vector plus = e, minus = e;
    plus[i] += fd_step;
    minus[i] -= fd_step;
    grad_e[i] = (game.loss_learner(theta, plus) - game.loss_learner(theta, minus)) / (2.0 * fd_step);
  }
  Vector g = game.grad_learner(theta, e) + jac.transpose() * grad_e;
  if (!g.allFinite()) throw NumericError("composed gradient is not finite");
  return g;
}

Vector choose_direction(const Vector& grad_fbar) {
  const double norm = grad_fbar.norm();
  if (!(norm > 1e-12)) {
    throw RestrictionError(RestrictionStage::kDirection,
                           "composed gradient vanishes; the Nash point appears Pareto-stationary");
  }
  return grad_fbar / norm;
}

double delta_search(const GameSpec& game, const Vector& theta_star, const Vector& v,
                    const ActionSet& env_set, const ActionSet* learner_set) {
  const double base = fbar(game, theta_star, env_set);
  double delta = 1.0;
  for (int halvings = 0; halvings <= 60; ++halvings, delta *= 0.5) {
    const Vector candidate = theta_star - delta * v;
    if (learner_set != nullptr && !learner_set->strictly_contains(candidate, 0.0)) continue;
    if (fbar(game, candidate, env_set) < base - 1e-10) return delta;
  }
  throw RestrictionError(RestrictionStage::kDelta,
                         "no improving step after 60 halvings; the composed slope is too small");
}

ActionSet construct_restriction(const GameSpec& game, const Vector& /*theta_star*/,
                                const Vector& theta_prime, const Vector& v,
                                const ActionSet& learner_set, const ActionSet& env_set) {
  const Vector e_prime = env_best_response(game, theta_prime, env_set);
  const Vector g = game.grad_learner(theta_prime, e_prime);
  std::vector<ActionSet> members{learner_set, ActionSet::halfspace(v, v.dot(theta_prime))};
  if (g.norm() > 1e-12) members.push_back(ActionSet::halfspace(-g, -g.dot(theta_prime)));
  return ActionSet::intersection(std::move(members));
}

std::string RestrictionCertificate::to_record() const {
  std::ostringstream out;
  out << "theta_star=" << format_vector(original_nash.theta)
      << ";env_star=" << format_vector(original_nash.env)
      << ";grad_fbar=" << format_vector(grad_fbar)
      << ";direction=" << format_vector(direction)
      << ";delta=" << format_number(delta)
      << ";theta_prime=" << format_vector(restricted_point.theta)
      << ";env_prime=" << format_vector(restricted_point.env)
      << ";loss_original=" << format_number(loss_original)
      << ";loss_restricted=" << format_number(loss_restricted)
      << ";improvement=" << format_number(improvement)
      << ";restricted_residual=" << format_number(restricted_residual);
  if (const auto* cut = restricted_set.as_intersection()) {
    int k = 0;
    for (const auto& m : cut->members) {
      if (const auto* h = m.as_halfspace()) {
        out << ";cut" << k << "_normal=" << format_vector(h->normal) << ";cut" << k
            << "_offset=" << format_number(h->offset);
        ++k;
      }
    }
  }
  return out.str();
}

std::map<std::string, std::vector<double>> parse_certificate_record(const std::string& record) {
  std::map<std::string, std::vector<double>> out;
  std::istringstream fields(record);
  std::string field;
  while (std::getline(fields, field, ';')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ArgumentError("malformed certificate field '" + field + "'");
    std::vector<double> values;
    std::istringstream nums(field.substr(eq + 1));
    std::string tok;
    while (std::getline(nums, tok, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw ArgumentError("trailing characters");
      } catch (const std::exception&) {
        throw ArgumentError("malformed number '" + tok + "' in certificate record");
      }
    }
    out[field.substr(0, eq)] = std::move(values);
  }
  return out;
}

RestrictionCertificate certify_restriction(const GameSpec& game, const ActionSet& learner_set,
                                           const ActionSet& env_set,
                                           const RestrictionOptions& options) {
  using S = RestrictionStage;
  game.validate();

  std::mt19937_64 audit_rng(options.audit_seed);
  const auto region = ActionSet::product(learner_set, env_set);
  const auto audit = monotonicity_audit(game, region, options.audit_samples, audit_rng);
  if (!audit.passed) {
    throw RestrictionError(S::kAudit, "monotonicity audit failed: observed modulus " +
                                          format_number(audit.min_modulus));
  }

  // Exact-gradient PSGD for the start, then the deterministic solver.
  GameSpec exact = game;
  exact.noise_bound = 0.0;
  JointAction nash;
  double nash_res = 0.0;
  try {
    std::mt19937_64 rng(0);
    const auto trace = psgd_nash(exact, learner_set, env_set, default_start(learner_set, env_set),
                                 options.psgd_horizon, rng);
    const auto report = solve_nash(exact, learner_set, env_set, trace.averaged_point,
                                   options.nash_tolerance);
    nash = report.joint;
    nash_res = report.nash_residual;
  } catch (const Error& err) {
    throw RestrictionError(S::kNash, err.what());
  }
  if (nash_res > 1e-8) throw RestrictionError(S::kNash, "Nash residual " + format_number(nash_res));

  if (!learner_set.strictly_contains(nash.theta, 1e-9)) {
    throw RestrictionError(S::kInterior, "learner's Nash action lies on the boundary of its set");
  }

  std::optional<JointAction> improving;
  try {
    improving = pareto_improvement_search(game, nash, learner_set, env_set, options.pareto_resolution);
  } catch (const Error& err) {
    throw RestrictionError(S::kPareto, err.what());
  }
  if (!improving) {
    throw RestrictionError(S::kPareto, "hypothesis not satisfied: the Nash point is Pareto optimal on the grid",
                           true);
  }

  RestrictionCertificate cert{nash, {}, {}, 0.0, {}, learner_set};
  try {
    cert.grad_fbar = fbar_gradient(game, nash.theta, env_set, options.fd_step);
  } catch (const RestrictionError&) {
    throw;
  } catch (const Error& err) {
    throw RestrictionError(S::kGradient, err.what());
  }
  cert.direction = choose_direction(cert.grad_fbar);
  cert.delta = delta_search(game, nash.theta, cert.direction, env_set, &learner_set);

  const Vector theta_prime = nash.theta - cert.delta * cert.direction;
  try {
    cert.restricted_set =
        construct_restriction(game, nash.theta, theta_prime, cert.direction, learner_set, env_set);
  } catch (const Error& err) {
    throw RestrictionError(S::kConstruct, err.what());
  }
  cert.restricted_point = {theta_prime, env_best_response(game, theta_prime, env_set)};

  cert.loss_original = game.loss_learner(nash.theta, nash.env);
  cert.loss_restricted = game.loss_learner(cert.restricted_point.theta, cert.restricted_point.env);
  cert.improvement = cert.loss_original - cert.loss_restricted;
  cert.restricted_residual = nash_residual(game, cert.restricted_point, cert.restricted_set, env_set);

  if (!(cert.improvement > 0.0)) throw RestrictionError(S::kVerify, "restriction does not improve the learner");
  if (cert.restricted_residual > 1e-6) {
    throw RestrictionError(S::kVerify, "restricted point is not a Nash point: residual " +
                                           format_number(cert.restricted_residual));
  }
  if (!cert.restricted_set.contains(theta_prime, 1e-9) ||
      (cert.restricted_set.project(nash.theta) - nash.theta).norm() <= 1e-12) {
    throw RestrictionError(S::kVerify, "restricted set membership check failed");
  }
  // Independent re-solve of the restricted game must land on the same point.
  try {
    const auto resolved = solve_nash(exact, cert.restricted_set, env_set, std::nullopt, 1e-9);
    if ((resolved.joint.stacked() - cert.restricted_point.stacked()).norm() > 1e-6) {
      throw RestrictionError(S::kVerify, "re-solved restricted Nash disagrees with the constructed point");
    }
  } catch (const RestrictionError&) {
    throw;
  } catch (const Error& err) {
    throw RestrictionError(S::kVerify, err.what());
  }
  return cert;
}

}  // namespace modelscale
