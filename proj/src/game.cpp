#include "modelscale/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "modelscale/errors.hpp"

namespace modelscale {

Vector JointAction::stacked() const {
  Vector x(theta.size() + env.size());
  x << theta, env;
  return x;
}

JointAction JointAction::split(const Vector& stacked, int dim_learner) {
  const auto dim_env = stacked.size() - dim_learner;
  return {stacked.head(dim_learner), stacked.tail(dim_env)};
}

void GameSpec::validate() const {
  if (dim_learner <= 0 || dim_env <= 0) throw ArgumentError("game dimensions must be positive");
  if (!loss_learner || !loss_env || !grad_learner || !grad_env) {
    throw ArgumentError("game is missing a loss or gradient callable");
  }
  if (!(mu > 0.0) || !(lipschitz > 0.0)) throw ArgumentError("mu and L must be positive");
  if (mu > lipschitz * (1.0 + 1e-12)) throw ArgumentError("mu must not exceed L");
  if (!(noise_bound >= 0.0)) throw ArgumentError("noise bound must be nonnegative");
}

Vector gradient_operator(const GameSpec& game, const JointAction& x) {
  Vector f(game.joint_dim());
  f << game.grad_learner(x.theta, x.env), game.grad_env(x.theta, x.env);
  if (!f.allFinite()) throw NumericError("gradient operator returned a non-finite value");
  return f;
}

Vector noisy_gradient_operator(const GameSpec& game, const JointAction& x,
                               std::mt19937_64& rng) {
  Vector f = gradient_operator(game, x);
  if (game.noise_bound <= 0.0) return f;
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector direction(f.size());
  do {
    for (Eigen::Index i = 0; i < direction.size(); ++i) direction[i] = normal(rng);
  } while (direction.norm() == 0.0);
  direction.normalize();
  const double cap = std::min(1.0, std::sqrt(3.0) * game.noise_bound);
  std::uniform_real_distribution<double> magnitude(0.0, cap);
  return f + magnitude(rng) * direction;
}

MonotonicityAudit monotonicity_audit(const GameSpec& game, const ActionSet& region,
                                     int samples, std::mt19937_64& rng, double tol) {
  if (region.dimension() != game.joint_dim()) {
    throw ArgumentError("audit region must live in the joint action space");
  }
  MonotonicityAudit audit;
  audit.min_modulus = std::numeric_limits<double>::infinity();
  const auto points = region.sample_points(rng, std::max(samples, 2));
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  for (int k = 0; k < samples; ++k) {
    const Vector& a = points[pick(rng)];
    const Vector& b = points[pick(rng)];
    const double dist2 = (a - b).squaredNorm();
    if (dist2 < 1e-18) continue;
    const auto xa = JointAction::split(a, game.dim_learner);
    const auto xb = JointAction::split(b, game.dim_learner);
    const double q =
        (gradient_operator(game, xa) - gradient_operator(game, xb)).dot(a - b) / dist2;
    ++audit.pairs_checked;
    if (q < audit.min_modulus) {
      audit.min_modulus = q;
      if (q < game.mu - tol) audit.violating_pair = std::make_pair(xa, xb);
    }
  }
  audit.passed = !audit.violating_pair.has_value();
  return audit;
}

double gradient_fd_error(const GameSpec& game, const JointAction& x, double step) {
  const Vector analytic = gradient_operator(game, x);
  double worst = 0.0;
  for (int i = 0; i < game.joint_dim(); ++i) {
    JointAction plus = x, minus = x;
    double fd;
    if (i < game.dim_learner) {
      plus.theta[i] += step;
      minus.theta[i] -= step;
      fd = (game.loss_learner(plus.theta, plus.env) -
            game.loss_learner(minus.theta, minus.env)) / (2 * step);
    } else {
      const int j = i - game.dim_learner;
      plus.env[j] += step;
      minus.env[j] -= step;
      fd = (game.loss_env(plus.theta, plus.env) - game.loss_env(minus.theta, minus.env)) /
           (2 * step);
    }
    worst = std::max(worst, std::abs(fd - analytic[i]) / std::max(1.0, std::abs(analytic[i])));
  }
  return worst;
}

// ---------------------------------------------------------------------------

Matrix QuadraticGame::operator_matrix() const {
  Matrix m(joint_dim(), joint_dim());
  m.topRows(dim_learner) = q_learner.topRows(dim_learner);
  m.bottomRows(dim_env) = q_env.bottomRows(dim_env);
  return m;
}

Vector QuadraticGame::operator_offset() const {
  Vector q(joint_dim());
  q << c_learner.head(dim_learner), c_env.tail(dim_env);
  return q;
}

double QuadraticGame::monotonicity_modulus() const {
  const Matrix m = operator_matrix();
  const Matrix sym = 0.5 * (m + m.transpose());
  return Eigen::SelfAdjointEigenSolver<Matrix>(sym).eigenvalues().minCoeff();
}

double QuadraticGame::lipschitz_constant() const {
  return Eigen::JacobiSVD<Matrix>(operator_matrix()).singularValues()(0);
}

JointAction QuadraticGame::unconstrained_nash() const {
  const Vector x = operator_matrix().fullPivLu().solve(-operator_offset());
  return JointAction::split(x, dim_learner);
}

double QuadraticGame::loss_learner(const Vector& theta, const Vector& env) const {
  Vector x(joint_dim());
  x << theta, env;
  return 0.5 * x.dot(q_learner * x) + c_learner.dot(x) + k_learner;
}

double QuadraticGame::loss_env(const Vector& theta, const Vector& env) const {
  Vector x(joint_dim());
  x << theta, env;
  return 0.5 * x.dot(q_env * x) + c_env.dot(x) + k_env;
}

GameSpec QuadraticGame::spec(double noise_bound) const {
  GameSpec g;
  g.dim_learner = dim_learner;
  g.dim_env = dim_env;
  const QuadraticGame self = *this;
  g.loss_learner = [self](const Vector& t, const Vector& e) { return self.loss_learner(t, e); };
  g.loss_env = [self](const Vector& t, const Vector& e) { return self.loss_env(t, e); };
  g.grad_learner = [self](const Vector& t, const Vector& e) -> Vector {
    Vector x(self.joint_dim());
    x << t, e;
    return (self.q_learner * x + self.c_learner).head(self.dim_learner);
  };
  g.grad_env = [self](const Vector& t, const Vector& e) -> Vector {
    Vector x(self.joint_dim());
    x << t, e;
    return (self.q_env * x + self.c_env).tail(self.dim_env);
  };
  g.mu = monotonicity_modulus();
  g.lipschitz = lipschitz_constant();
  g.noise_bound = noise_bound;
  return g;
}

QuadraticGame ScalarQuadratic::game() const {
  QuadraticGame q;
  q.q_learner.resize(2, 2);
  q.q_learner << a_ll, b_l, b_l, c_ll;
  q.c_learner = Eigen::Vector2d(g_l, h_l);
  q.k_learner = k_l;
  q.q_env.resize(2, 2);
  q.q_env << c_ee, b_e, b_e, a_ee;
  q.c_env = Eigen::Vector2d(h_e, g_e);
  q.k_env = k_e;
  return q;
}

}  // namespace modelscale
