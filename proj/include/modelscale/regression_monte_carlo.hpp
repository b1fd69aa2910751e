#pragma once

// Monte Carlo estimators for the strategic regression quantities, used as
// oracles for the closed forms. They sample x ~ N(0, I) directly; only the
// loss and objective estimates plug in the closed-form fitted parameters.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

#include "modelscale/strategic_regression.hpp"

namespace modelscale::mc {

struct McValue {
  double mean = 0.0;
  double se = 0.0;
  bool agrees(double x, double sigmas = 3.0) const { return std::abs(x - mean) <= sigmas * se; }
};

struct RegressionMc {
  McValue gauss;        // E[exp(-||x+e||^2)]
  McValue gauss2;       // E[exp(-2||x+e||^2)]
  McValue gauss_x;      // E[exp(-||x+e||^2) x'e] / k
  McValue small_coef;   // least-squares theta on x+e, projected on beta / ||beta||^2
  McValue small_loss;   // E[(beta'x - theta*(e)'(x+e))^2]
  McValue small_env;    // E[theta*(e)'(x+e)]
  McValue large_c;      // least-squares theta_1 projected on beta / ||beta||^2
  McValue large_p;      // least-squares theta_2 / ||beta||
  McValue large_loss;   // squared error of the closed-form fit
  McValue large_env;    // E[theta_1'(x+e) + theta_2 exp(-||x+e||^2)]
};

namespace detail {

struct Moments {
  double s = 0.0, s2 = 0.0;
  long n = 0;
  void add(double v) {
    s += v;
    s2 += v * v;
    ++n;
  }
  McValue value() const {
    const double mean = s / n;
    const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1));
    return {mean, std::sqrt(var / n)};
  }
};

// Ordinary least squares with heteroskedasticity-robust standard errors for
// the linear functional w'coef. Two passes over the same sample stream.
template <class Draw>
McValue ols_functional(int p, long samples, std::uint64_t seed, const Eigen::VectorXd& w,
                       Draw draw, Eigen::VectorXd* coef_out = nullptr) {
  Eigen::MatrixXd zz = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd zy = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd z(p);
  double y = 0.0;
  {
    std::mt19937_64 rng(seed);
    for (long i = 0; i < samples; ++i) {
      draw(rng, z, y);
      zz.selfadjointView<Eigen::Lower>().rankUpdate(z);
      zy += y * z;
    }
  }
  zz = zz.selfadjointView<Eigen::Lower>();
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(zz);
  const Eigen::VectorXd coef = ldlt.solve(zy);
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
  {
    std::mt19937_64 rng(seed);
    for (long i = 0; i < samples; ++i) {
      draw(rng, z, y);
      const double r = y - coef.dot(z);
      meat.selfadjointView<Eigen::Lower>().rankUpdate(z, r * r);
    }
  }
  meat = meat.selfadjointView<Eigen::Lower>();
  const Eigen::VectorXd a = ldlt.solve(w);
  if (coef_out) *coef_out = coef;
  return {w.dot(coef), std::sqrt(a.dot(meat * a))};
}

}  // namespace detail

inline RegressionMc regression_monte_carlo(const modelscale::RegressionInstance& inst, double k,
                                           long samples, std::uint64_t seed) {
  const int d = inst.dim();
  const Eigen::VectorXd& beta = inst.beta;
  const double bn = beta.norm();
  const Eigen::VectorXd e = (k / bn) * beta;
  RegressionMc out;

  auto normal_x = [d](std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    Eigen::VectorXd x(d);
    for (int j = 0; j < d; ++j) x[j] = n01(rng);
    return x;
  };

  // Small model: regress beta'x on x + e.
  Eigen::VectorXd w_small = beta / beta.squaredNorm();
  out.small_coef = detail::ols_functional(d, samples, seed, w_small,
                                          [&](std::mt19937_64& rng, Eigen::VectorXd& z, double& y) {
                                            const Eigen::VectorXd x = normal_x(rng);
                                            z = x + e;
                                            y = beta.dot(x);
                                          });
  // Large model: regress on (x + e, exp(-||x + e||^2)).
  Eigen::VectorXd w_c = Eigen::VectorXd::Zero(d + 1);
  w_c.head(d) = beta / beta.squaredNorm();
  Eigen::VectorXd w_p = Eigen::VectorXd::Zero(d + 1);
  w_p[d] = 1.0 / bn;
  auto large_draw = [&](std::mt19937_64& rng, Eigen::VectorXd& z, double& y) {
    const Eigen::VectorXd x = normal_x(rng);
    z.head(d) = x + e;
    z[d] = std::exp(-(x + e).squaredNorm());
    y = beta.dot(x);
  };
  out.large_c = detail::ols_functional(d + 1, samples, seed + 1, w_c, large_draw);
  out.large_p = detail::ols_functional(d + 1, samples, seed + 1, w_p, large_draw);

  // Plain expectations, evaluated at the closed-form fits.
  const Eigen::VectorXd theta_small = modelscale::small_model_best_theta(inst, k);
  const auto fit = modelscale::large_model_best_theta(inst, k);
  detail::Moments g1, g2, gx, sl, se, ll, le;
  std::mt19937_64 rng(seed + 2);
  for (long i = 0; i < samples; ++i) {
    const Eigen::VectorXd x = normal_x(rng);
    const Eigen::VectorXd z = x + e;
    const double r2 = z.squaredNorm();
    const double ex = std::exp(-r2);
    const double y = beta.dot(x);
    g1.add(ex);
    g2.add(std::exp(-2.0 * r2));
    if (k != 0.0) gx.add(ex * x.dot(e) / k);
    const double ps = theta_small.dot(z);
    sl.add((y - ps) * (y - ps));
    se.add(ps);
    const double pl = fit.theta1.dot(z) + fit.theta2 * ex;
    ll.add((y - pl) * (y - pl));
    le.add(pl);
  }
  out.gauss = g1.value();
  out.gauss2 = g2.value();
  if (k != 0.0) out.gauss_x = gx.value();
  out.small_loss = sl.value();
  out.small_env = se.value();
  out.large_loss = ll.value();
  out.large_env = le.value();
  return out;
}

}  // namespace modelscale::mc
