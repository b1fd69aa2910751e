#pragma once

// Participation game on a finite space X x Y. X is a product of finite
// feature ranges; a feature map keeps some coordinates and sends the rest
// to value 0. The learner fits a classifier for zero-one loss; the
// population mixes uniform noise into the base distribution whenever the
// classifier uses a protected coordinate.

#include <vector>

namespace modelscale {

struct DiscreteDistribution {
  std::vector<int> feature_sizes;  // cardinality of each coordinate of X
  int n_labels = 0;
  std::vector<double> probs;  // index = cell * n_labels + label

  // Cells are numbered with the first coordinate varying fastest.
  int n_cells() const;
  std::vector<int> decode(int cell) const;
  int encode(const std::vector<int>& x) const;
  double mass(int cell, int label) const { return probs[static_cast<std::size_t>(cell * n_labels + label)]; }
  double marginal(int cell) const;
  // Throws ArgumentError unless probabilities are nonnegative and sum to 1
  // within 1e-12.
  void validate() const;

  static DiscreteDistribution uniform(const std::vector<int>& feature_sizes, int n_labels);
};

struct FeatureMap {
  std::vector<int> retained;  // coordinates kept; the others are set to 0

  static FeatureMap identity(int n_features);
  int apply(const DiscreteDistribution& space, int cell) const;
};

enum class ClassifierClass { kFull, kRestricted };

const char* to_string(ClassifierClass c);

struct Classifier {
  std::vector<int> labels;  // one label per cell of X
  ClassifierClass tag = ClassifierClass::kFull;
};

// Per mapped cell, the label with the largest pooled mass. Ties go to the
// label preferred by `tie_break` when given (by its own pooled mass), then
// to the smallest label.
Classifier bayes_classifier(const DiscreteDistribution& dist, const FeatureMap& map,
                            const DiscreteDistribution* tie_break = nullptr);

double zero_one_loss(const Classifier& g, const DiscreteDistribution& dist);

// Whether some cell with positive base mass is labelled differently from
// its image under phi*.
bool uses_protected_features(const Classifier& g, const DiscreteDistribution& p0,
                             const FeatureMap& phi_star);

DiscreteDistribution mixture(const DiscreteDistribution& a, const DiscreteDistribution& b,
                             double weight_a);
double total_variation(const DiscreteDistribution& a, const DiscreteDistribution& b);

// alpha U + (1 - alpha) P0 when g uses protected features, P0 otherwise.
DiscreteDistribution env_response(const Classifier& g, const DiscreteDistribution& p0,
                                  const FeatureMap& phi_star, double alpha);

struct FixedPointCertificate {
  bool learner_best_response = false;  // no single-cell relabelling within the class helps
  bool env_best_response = false;      // env_response reproduces the distribution
  double worst_relabel_gain = 0.0;     // largest loss decrease from one relabelling
  double env_response_gap = 0.0;       // max abs difference of probabilities
  bool passed() const { return learner_best_response && env_best_response; }
};

struct ParticipationEquilibrium {
  ClassifierClass model_class = ClassifierClass::kFull;
  Classifier classifier;
  DiscreteDistribution distribution;
  double learner_loss = 0.0;
  double tv_to_uniform = 0.0;
  double tv_to_base = 0.0;
  FixedPointCertificate certificate;
};

// Full class: Bayes classifier on alpha U + (1 - alpha) P0, with ties
// resolved toward the Bayes classifier on P0. Restricted class: Bayes
// classifier through phi* on P0; throws AssumptionError when its loss is
// not below 1/n.
ParticipationEquilibrium equilibrium_pair(ClassifierClass model_class,
                                          const DiscreteDistribution& p0,
                                          const FeatureMap& phi_star, double alpha);

// n times the restricted Bayes loss on P0. Throws AssumptionError when that
// loss is not below 1/n.
double alpha_threshold(const DiscreteDistribution& p0, const FeatureMap& phi_star);

struct ParticipationInstance {
  DiscreteDistribution p0;
  FeatureMap phi_star;
};

// Three binary features with the last one protected and four labels. The
// two retained bits pick a label c; the protected bit is 1 with probability
// 1/9 and flips the likely label to c + 1 (mod 4). Each cell's likely label
// has conditional probability 0.95, so the full Bayes loss is 0.05 and the
// restricted Bayes loss is 0.15.
ParticipationInstance default_participation_instance();

struct ParticipationSweepRow {
  double alpha = 0.0;
  double full_loss = 0.0;
  double restricted_loss = 0.0;
  double threshold = 0.0;
  bool reverse_scaling = false;
  bool full_certified = false;
  bool restricted_certified = false;
};

std::vector<ParticipationSweepRow> participation_sweep(const ParticipationInstance& inst,
                                                       const std::vector<double>& alphas);

}  // namespace modelscale
