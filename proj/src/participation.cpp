#include "modelscale/participation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "modelscale/errors.hpp"

namespace modelscale {

int DiscreteDistribution::n_cells() const {
  int cells = 1;
  for (int s : feature_sizes) cells *= s;
  return cells;
}

std::vector<int> DiscreteDistribution::decode(int cell) const {
  std::vector<int> x(feature_sizes.size());
  for (std::size_t j = 0; j < feature_sizes.size(); ++j) {
    x[j] = cell % feature_sizes[j];
    cell /= feature_sizes[j];
  }
  return x;
}

int DiscreteDistribution::encode(const std::vector<int>& x) const {
  int cell = 0;
  for (std::size_t j = feature_sizes.size(); j-- > 0;) cell = cell * feature_sizes[j] + x[j];
  return cell;
}

double DiscreteDistribution::marginal(int cell) const {
  double m = 0.0;
  for (int y = 0; y < n_labels; ++y) m += mass(cell, y);
  return m;
}

void DiscreteDistribution::validate() const {
  if (feature_sizes.empty() || n_labels < 1) throw ArgumentError("distribution needs features and labels");
  for (int s : feature_sizes) {
    if (s < 1) throw ArgumentError("feature cardinalities must be positive");
  }
  if (probs.size() != static_cast<std::size_t>(n_cells() * n_labels)) {
    throw ArgumentError("probability table has the wrong size");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ArgumentError("probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ArgumentError("probabilities must sum to 1");
}

DiscreteDistribution DiscreteDistribution::uniform(const std::vector<int>& feature_sizes,
                                                   int n_labels) {
  DiscreteDistribution d;
  d.feature_sizes = feature_sizes;
  d.n_labels = n_labels;
  const int size = d.n_cells() * n_labels;
  d.probs.assign(static_cast<std::size_t>(size), 1.0 / size);
  return d;
}

FeatureMap FeatureMap::identity(int n_features) {
  FeatureMap m;
  m.retained.resize(static_cast<std::size_t>(n_features));
  std::iota(m.retained.begin(), m.retained.end(), 0);
  return m;
}

int FeatureMap::apply(const DiscreteDistribution& space, int cell) const {
  const auto x = space.decode(cell);
  std::vector<int> out(x.size(), 0);
  for (int j : retained) {
    if (j < 0 || j >= static_cast<int>(x.size())) throw ArgumentError("feature map coordinate out of range");
    out[j] = x[j];
  }
  return space.encode(out);
}

const char* to_string(ClassifierClass c) { return c == ClassifierClass::kFull ? "full" : "restricted"; }

namespace {

// Label masses pooled over each fiber of the map.
std::vector<std::vector<double>> pooled_masses(const DiscreteDistribution& dist, const FeatureMap& map) {
  std::vector<std::vector<double>> pooled(static_cast<std::size_t>(dist.n_cells()),
                                          std::vector<double>(static_cast<std::size_t>(dist.n_labels), 0.0));
  for (int x = 0; x < dist.n_cells(); ++x) {
    auto& row = pooled[map.apply(dist, x)];
    for (int y = 0; y < dist.n_labels; ++y) row[y] += dist.mass(x, y);
  }
  return pooled;
}

void check_compatible(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  if (a.feature_sizes != b.feature_sizes || a.n_labels != b.n_labels) {
    throw ArgumentError("distributions live on different spaces");
  }
}

bool same_space(const Classifier& g, const DiscreteDistribution& d) {
  return static_cast<int>(g.labels.size()) == d.n_cells();
}

}  // namespace

Classifier bayes_classifier(const DiscreteDistribution& dist, const FeatureMap& map,
                            const DiscreteDistribution* tie_break) {
  dist.validate();
  if (tie_break) check_compatible(dist, *tie_break);
  const auto pooled = pooled_masses(dist, map);
  std::vector<std::vector<double>> secondary;
  if (tie_break) secondary = pooled_masses(*tie_break, map);

  Classifier g;
  g.tag = map.retained.size() == dist.feature_sizes.size() ? ClassifierClass::kFull
                                                           : ClassifierClass::kRestricted;
  g.labels.resize(static_cast<std::size_t>(dist.n_cells()));
  for (int x = 0; x < dist.n_cells(); ++x) {
    const int c = map.apply(dist, x);
    const auto& row = pooled[c];
    const double best = *std::max_element(row.begin(), row.end());
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * best;
    int label = -1;
    for (int y = 0; y < dist.n_labels; ++y) {
      if (row[y] < best - tol) continue;
      if (label < 0 || (tie_break && secondary[c][y] > secondary[c][label])) label = y;
    }
    g.labels[x] = label;
  }
  return g;
}

double zero_one_loss(const Classifier& g, const DiscreteDistribution& dist) {
  if (!same_space(g, dist)) throw ArgumentError("classifier and distribution domains differ");
  double loss = 0.0;
  for (int x = 0; x < dist.n_cells(); ++x) {
    for (int y = 0; y < dist.n_labels; ++y) {
      if (g.labels[x] != y) loss += dist.mass(x, y);
    }
  }
  return loss;
}

bool uses_protected_features(const Classifier& g, const DiscreteDistribution& p0,
                             const FeatureMap& phi_star) {
  if (!same_space(g, p0)) throw ArgumentError("classifier and distribution domains differ");
  for (int x = 0; x < p0.n_cells(); ++x) {
    if (p0.marginal(x) > 0.0 && g.labels[x] != g.labels[phi_star.apply(p0, x)]) return true;
  }
  return false;
}

DiscreteDistribution mixture(const DiscreteDistribution& a, const DiscreteDistribution& b,
                             double weight_a) {
  check_compatible(a, b);
  if (!(weight_a >= 0.0 && weight_a <= 1.0)) throw ArgumentError("mixture weight must lie in [0, 1]");
  DiscreteDistribution out = b;
  for (std::size_t i = 0; i < out.probs.size(); ++i) {
    out.probs[i] = weight_a * a.probs[i] + (1.0 - weight_a) * b.probs[i];
  }
  return out;
}

double total_variation(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  check_compatible(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.probs.size(); ++i) sum += std::abs(a.probs[i] - b.probs[i]);
  return 0.5 * sum;
}

DiscreteDistribution env_response(const Classifier& g, const DiscreteDistribution& p0,
                                  const FeatureMap& phi_star, double alpha) {
  p0.validate();
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
  if (!uses_protected_features(g, p0, phi_star)) return p0;
  return mixture(DiscreteDistribution::uniform(p0.feature_sizes, p0.n_labels), p0, alpha);
}

double alpha_threshold(const DiscreteDistribution& p0, const FeatureMap& phi_star) {
  const double loss = zero_one_loss(bayes_classifier(p0, phi_star), p0);
  const double n = p0.n_labels;
  if (!(loss < 1.0 / n)) {
    throw AssumptionError("restricted Bayes loss " + std::to_string(loss) +
                          " is not below 1/n = " + std::to_string(1.0 / n));
  }
  return n * loss;
}

ParticipationEquilibrium equilibrium_pair(ClassifierClass model_class,
                                          const DiscreteDistribution& p0,
                                          const FeatureMap& phi_star, double alpha) {
  p0.validate();
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
  const auto u = DiscreteDistribution::uniform(p0.feature_sizes, p0.n_labels);
  const int features = static_cast<int>(p0.feature_sizes.size());
  const FeatureMap class_map =
      model_class == ClassifierClass::kFull ? FeatureMap::identity(features) : phi_star;

  ParticipationEquilibrium eq;
  eq.model_class = model_class;
  if (model_class == ClassifierClass::kFull) {
    eq.distribution = mixture(u, p0, alpha);
    eq.classifier = bayes_classifier(eq.distribution, class_map, &p0);
  } else {
    alpha_threshold(p0, phi_star);
    eq.distribution = p0;
    eq.classifier = bayes_classifier(p0, class_map);
  }
  eq.classifier.tag = model_class;
  eq.learner_loss = zero_one_loss(eq.classifier, eq.distribution);
  eq.tv_to_uniform = total_variation(eq.distribution, u);
  eq.tv_to_base = total_variation(eq.distribution, p0);

  // Learner side: no relabelling of one fiber of the class map lowers the loss.
  auto& cert = eq.certificate;
  const auto pooled = pooled_masses(eq.distribution, class_map);
  cert.worst_relabel_gain = 0.0;
  bool fiber_constant = true;
  for (int x = 0; x < p0.n_cells(); ++x) {
    const int c = class_map.apply(p0, x);
    fiber_constant = fiber_constant && eq.classifier.labels[x] == eq.classifier.labels[c];
    for (int y = 0; y < p0.n_labels; ++y) {
      cert.worst_relabel_gain =
          std::max(cert.worst_relabel_gain, pooled[c][y] - pooled[c][eq.classifier.labels[x]]);
    }
  }
  cert.learner_best_response = fiber_constant && cert.worst_relabel_gain <= 1e-14;

  // Environment side: its trigger rule must reproduce the distribution.
  const auto response = env_response(eq.classifier, p0, phi_star, alpha);
  for (std::size_t i = 0; i < response.probs.size(); ++i) {
    cert.env_response_gap = std::max(cert.env_response_gap, std::abs(response.probs[i] - eq.distribution.probs[i]));
  }
  cert.env_best_response = cert.env_response_gap <= 1e-14;
  return eq;
}

ParticipationInstance default_participation_instance() {
  ParticipationInstance inst;
  auto& p0 = inst.p0;
  p0.feature_sizes = {2, 2, 2};
  p0.n_labels = 4;
  p0.probs.assign(32, 0.0);
  for (int x = 0; x < 8; ++x) {
    const auto bits = p0.decode(x);
    const int c = bits[0] + 2 * bits[1];
    const bool flipped = bits[2] == 1;
    const double cell_mass = 0.25 * (flipped ? 1.0 / 9.0 : 8.0 / 9.0);
    const int likely = flipped ? (c + 1) % 4 : c;
    const int other = flipped ? c : (c + 1) % 4;
    p0.probs[static_cast<std::size_t>(x * 4 + likely)] = 0.95 * cell_mass;
    p0.probs[static_cast<std::size_t>(x * 4 + other)] = 0.05 * cell_mass;
  }
  inst.phi_star.retained = {0, 1};
  return inst;
}

std::vector<ParticipationSweepRow> participation_sweep(const ParticipationInstance& inst,
                                                       const std::vector<double>& alphas) {
  const double threshold = alpha_threshold(inst.p0, inst.phi_star);
  std::vector<ParticipationSweepRow> rows;
  rows.reserve(alphas.size());
  for (double a : alphas) {
    const auto full = equilibrium_pair(ClassifierClass::kFull, inst.p0, inst.phi_star, a);
    const auto restricted = equilibrium_pair(ClassifierClass::kRestricted, inst.p0, inst.phi_star, a);
    rows.push_back({a, full.learner_loss, restricted.learner_loss, threshold,
                    full.learner_loss > restricted.learner_loss, full.certificate.passed(),
                    restricted.certificate.passed()});
  }
  return rows;
}

}  // namespace modelscale
