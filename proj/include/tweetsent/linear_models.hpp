#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "tweetsent/error.hpp"
#include "tweetsent/features.hpp"
#include "tweetsent/kmeans.hpp"
#include "tweetsent/rng.hpp"

namespace tweetsent {

// (features, stance) training pair; stance is -1 or +1.
using LabeledExample = std::pair<SparseVector, int>;

namespace detail {

inline void check_two_classes(const std::vector<LabeledExample>& examples) {
  bool has_pos = false, has_neg = false;
  for (const auto& [_, y] : examples) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else throw Error("labels must be -1 or +1");
  }
  if (!has_pos || !has_neg) throw Error("training data must contain both classes");
}

inline void check_feature_range(const SparseVector& v, int vocab_size) {
  if (!v.entries.empty()) {
    const int max_id = v.entries.rbegin()->first;
    const int min_id = v.entries.begin()->first;
    if (min_id < 0 || max_id >= vocab_size)
      throw Error("feature id " + std::to_string(min_id < 0 ? min_id : max_id) +
                  " out of range for vocabulary size " + std::to_string(vocab_size));
  }
}

}  // namespace detail

// --- multinomial Naive Bayes with Laplace smoothing -------------------------

struct NaiveBayesModel {
  // index 0 = class -1, index 1 = class +1
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> log_cond;  // per class, length vocab_size
  double alpha = 1.0;
  int vocab_size = 0;
};

inline NaiveBayesModel train_naive_bayes(const std::vector<LabeledExample>& examples,
                                         int vocab_size, double alpha = 1.0) {
  if (!(alpha > 0.0)) throw Error("naive bayes: alpha must be > 0");
  if (vocab_size <= 0) throw Error("naive bayes: vocabulary is empty");
  detail::check_two_classes(examples);

  NaiveBayesModel model;
  model.alpha = alpha;
  model.vocab_size = vocab_size;
  std::array<double, 2> class_docs{};
  std::array<std::vector<double>, 2> counts{std::vector<double>(vocab_size, 0.0),
                                            std::vector<double>(vocab_size, 0.0)};
  for (const auto& [vec, y] : examples) {
    detail::check_feature_range(vec, vocab_size);
    const std::size_t c = y > 0 ? 1 : 0;
    class_docs[c] += 1.0;
    for (const auto& [id, w] : vec.entries) counts[c][static_cast<std::size_t>(id)] += w;
  }
  const double n = class_docs[0] + class_docs[1];
  for (std::size_t c = 0; c < 2; ++c) {
    model.log_prior[c] = std::log(class_docs[c] / n);
    const double total = std::accumulate(counts[c].begin(), counts[c].end(), 0.0);
    const double denom = total + alpha * static_cast<double>(vocab_size);
    model.log_cond[c].resize(static_cast<std::size_t>(vocab_size));
    for (std::size_t t = 0; t < counts[c].size(); ++t)
      model.log_cond[c][t] = std::log((counts[c][t] + alpha) / denom);
  }
  return model;
}

inline int predict(const NaiveBayesModel& model, const SparseVector& features) {
  detail::check_feature_range(features, model.vocab_size);
  std::array<double, 2> score = model.log_prior;
  for (const auto& [id, w] : features.entries) {
    score[0] += w * model.log_cond[0][static_cast<std::size_t>(id)];
    score[1] += w * model.log_cond[1][static_cast<std::size_t>(id)];
  }
  if (score[1] > score[0]) return 1;
  if (score[0] > score[1]) return -1;
  // ties: larger prior, then +1
  if (model.log_prior[1] >= model.log_prior[0]) return 1;
  return -1;
}

// --- linear SVM, primal SGD on the hinge loss -------------------------------

struct LinearSvmModel {
  std::vector<double> weights;  // dense, length vocab_size
  double bias = 0.0;
  double lambda = 1e-4;
};

// Pegasos-style schedule: learning rate 1/(lambda * t) with t counting steps
// across epochs; one seeded shuffle per epoch. The bias is updated on margin
// violations but not regularized.
inline LinearSvmModel train_linear_svm(const std::vector<LabeledExample>& examples,
                                       int vocab_size, double lambda = 1e-4, int epochs = 10,
                                       std::uint64_t seed = 0) {
  if (!(lambda > 0.0)) throw Error("svm: lambda must be > 0");
  if (epochs < 1) throw Error("svm: epochs must be >= 1");
  if (vocab_size <= 0) throw Error("svm: vocabulary is empty");
  detail::check_two_classes(examples);
  for (const auto& [vec, _] : examples) detail::check_feature_range(vec, vocab_size);

  LinearSvmModel model;
  model.lambda = lambda;
  model.weights.assign(static_cast<std::size_t>(vocab_size), 0.0);

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::int64_t t = 0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    // Per-epoch derived stream keeps epoch prefixes reproducible.
    Rng rng(derive_seed(seed, 0x5600 + static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);
    for (const std::size_t idx : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const auto& [vec, y] = examples[idx];
      double margin = model.bias;
      for (const auto& [id, w] : vec.entries)
        margin += model.weights[static_cast<std::size_t>(id)] * w;
      margin *= y;
      const double decay = 1.0 - 1.0 / static_cast<double>(t);  // = 1 - eta*lambda
      for (auto& w : model.weights) w *= decay;
      if (margin < 1.0) {
        for (const auto& [id, w] : vec.entries)
          model.weights[static_cast<std::size_t>(id)] += eta * y * w;
        model.bias += eta * y;
      }
    }
  }
  for (const double w : model.weights)
    if (!std::isfinite(w)) throw Error("svm: training diverged (non-finite weights)");
  return model;
}

// Regularized primal objective: lambda/2 ||w||^2 + mean hinge loss.
inline double svm_objective(const LinearSvmModel& model,
                            const std::vector<LabeledExample>& examples) {
  double reg = 0.0;
  for (const double w : model.weights) reg += w * w;
  reg *= 0.5 * model.lambda;
  double hinge = 0.0;
  for (const auto& [vec, y] : examples) {
    double margin = model.bias;
    for (const auto& [id, w] : vec.entries)
      margin += model.weights[static_cast<std::size_t>(id)] * w;
    hinge += std::max(0.0, 1.0 - y * margin);
  }
  return reg + hinge / static_cast<double>(examples.size());
}

inline int predict(const LinearSvmModel& model, const SparseVector& features) {
  detail::check_feature_range(features, static_cast<int>(model.weights.size()));
  double score = model.bias;
  for (const auto& [id, w] : features.entries)
    score += model.weights[static_cast<std::size_t>(id)] * w;
  return score >= 0.0 ? 1 : -1;
}

// --- k-means classifier ------------------------------------------------------

struct KMeansClassifierModel {
  std::vector<std::vector<double>> centroids;  // k x vocab_size
  std::vector<int> cluster_label;              // per cluster, -1 or +1
};

inline std::vector<double> densify(const SparseVector& v, int dim) {
  detail::check_feature_range(v, dim);
  std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
  for (const auto& [id, w] : v.entries) out[static_cast<std::size_t>(id)] = w;
  return out;
}

// Clusters the training vectors and labels each cluster by the majority
// training label (ties go to +1).
inline KMeansClassifierModel train_kmeans_classifier(const std::vector<LabeledExample>& examples,
                                                     int vocab_size, int k = 2,
                                                     std::uint64_t seed = 0, int max_iter = 100,
                                                     double tol = 1e-6) {
  if (k < 2) throw Error("k-means classifier: k must be >= 2");
  detail::check_two_classes(examples);
  std::vector<std::vector<double>> points;
  points.reserve(examples.size());
  for (const auto& [vec, _] : examples) points.push_back(densify(vec, vocab_size));

  const KMeansResult fit = kmeans_fit(points, k, seed, max_iter, tol);
  KMeansClassifierModel model;
  model.centroids = fit.centroids;
  model.cluster_label.assign(static_cast<std::size_t>(k), 1);
  std::vector<int> vote(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < examples.size(); ++i)
    vote[static_cast<std::size_t>(fit.assignments[i])] += examples[i].second;
  for (int c = 0; c < k; ++c)
    model.cluster_label[static_cast<std::size_t>(c)] = vote[static_cast<std::size_t>(c)] < 0 ? -1 : 1;
  return model;
}

inline int predict(const KMeansClassifierModel& model, const SparseVector& features) {
  if (model.centroids.empty()) throw Error("k-means classifier: empty model");
  const std::vector<double> x = densify(features, static_cast<int>(model.centroids[0].size()));
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_c = 0;
  for (std::size_t c = 0; c < model.centroids.size(); ++c) {
    const double d = detail::sq_dist(x, model.centroids[c]);
    if (d < best) {  // ties: lowest cluster id
      best = d;
      best_c = c;
    }
  }
  return model.cluster_label[best_c];
}

// --- evaluation --------------------------------------------------------------

struct EvalReport {
  double accuracy = 0.0;
  // confusion counts with positive class = +1
  long tp = 0, fp = 0, fn = 0, tn = 0;
  double false_negative_rate = 0.0;  // FN / (FN + TP)
  double false_positive_rate = 0.0;  // FP / (FP + TN)
};

inline EvalReport evaluate(const std::vector<int>& predictions, const std::vector<int>& gold) {
  if (predictions.size() != gold.size())
    throw Error("evaluate: prediction/gold length mismatch (" +
                std::to_string(predictions.size()) + " vs " + std::to_string(gold.size()) + ")");
  if (predictions.empty()) throw Error("evaluate: no examples");
  EvalReport r;
  long correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int p = predictions[i], g = gold[i];
    if (p == g) ++correct;
    if (g == 1)
      p == 1 ? ++r.tp : ++r.fn;
    else
      p == 1 ? ++r.fp : ++r.tn;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(predictions.size());
  r.false_negative_rate = (r.fn + r.tp) > 0
                              ? static_cast<double>(r.fn) / static_cast<double>(r.fn + r.tp)
                              : 0.0;
  r.false_positive_rate = (r.fp + r.tn) > 0
                              ? static_cast<double>(r.fp) / static_cast<double>(r.fp + r.tn)
                              : 0.0;
  return r;
}

}  // namespace tweetsent
