#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "tweetsent/corpus.hpp"
#include "tweetsent/linear_models.hpp"

using namespace tweetsent;

namespace {

SparseVector one_hot(int id, double w = 1.0) {
  SparseVector v;
  v.add(id, w);
  return v;
}

// warm/hoax toy corpus: two positive docs {warm}, one negative doc {hoax}.
std::vector<LabeledExample> warm_hoax() {
  return {{one_hot(0), 1}, {one_hot(0), 1}, {one_hot(1), -1}};
}

}  // namespace

TEST_CASE("naive bayes matches hand-computed smoothed counts", "[linear_models]") {
  const NaiveBayesModel m = train_naive_bayes(warm_hoax(), 2, 1.0);
  // priors: 2/3 positive, 1/3 negative
  REQUIRE(std::exp(m.log_prior[1]) == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
  REQUIRE(std::exp(m.log_prior[0]) == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
  // P(warm|+) = (2+1)/(2+2) = 3/4, P(hoax|+) = 1/4
  REQUIRE(std::exp(m.log_cond[1][0]) == Catch::Approx(0.75).epsilon(1e-12));
  REQUIRE(std::exp(m.log_cond[1][1]) == Catch::Approx(0.25).epsilon(1e-12));
  // P(warm|-) = (0+1)/(1+2) = 1/3, P(hoax|-) = 2/3
  REQUIRE(std::exp(m.log_cond[0][0]) == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
  REQUIRE(std::exp(m.log_cond[0][1]) == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("naive bayes probabilities normalize", "[linear_models]") {
  SyntheticConfig cfg;
  cfg.n_tweets = 150;
  cfg.seed = 2;
  const Corpus corpus = generate_synthetic(cfg).corpus;
  std::vector<TokenSeq> docs;
  for (const auto& r : corpus.records) docs.push_back(tokenize(r.text));
  const Vocabulary vocab = build_vocab(docs, {VocabKind::word_ngram, 1});
  std::vector<LabeledExample> examples;
  for (std::size_t i = 0; i < docs.size(); ++i)
    examples.emplace_back(extract_ngrams(docs[i], vocab), *corpus.records[i].label);

  const NaiveBayesModel m = train_naive_bayes(examples, vocab.size(), 1.0);
  REQUIRE(std::exp(m.log_prior[0]) + std::exp(m.log_prior[1]) ==
          Catch::Approx(1.0).margin(1e-12));
  for (const auto& cond : m.log_cond) {
    double sum = 0.0;
    for (const double lc : cond) sum += std::exp(lc);
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("empty feature vectors fall back to the smoothing floor", "[linear_models]") {
  const std::vector<LabeledExample> examples = {{SparseVector{}, 1}, {SparseVector{}, -1}};
  const NaiveBayesModel m = train_naive_bayes(examples, 4, 1.0);
  for (const auto& cond : m.log_cond)
    for (const double lc : cond) REQUIRE(std::exp(lc) == Catch::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("large alpha drives conditionals toward uniform", "[linear_models]") {
  const auto examples = warm_hoax();
  double prev_gap = 1e9;
  for (const double alpha : {1.0, 10.0, 100.0, 1000.0}) {
    const NaiveBayesModel m = train_naive_bayes(examples, 2, alpha);
    double gap = 0.0;
    for (const auto& cond : m.log_cond)
      for (const double lc : cond) gap = std::max(gap, std::fabs(std::exp(lc) - 0.5));
    REQUIRE(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("naive bayes prediction follows the posterior", "[linear_models]") {
  const NaiveBayesModel m = train_naive_bayes(warm_hoax(), 2, 1.0);
  REQUIRE(predict(m, one_hot(0)) == 1);   // 2/3 * 3/4 > 1/3 * 1/3
  REQUIRE(predict(m, one_hot(1)) == -1);  // 2/3 * 1/4 < 1/3 * 2/3
  REQUIRE(predict(m, SparseVector{}) == 1);  // empty input: larger prior wins
  REQUIRE_THROWS_AS(predict(m, one_hot(5)), Error);
}

TEST_CASE("single-class training data is rejected", "[linear_models]") {
  const std::vector<LabeledExample> examples = {{one_hot(0), 1}, {one_hot(1), 1}};
  REQUIRE_THROWS_AS(train_naive_bayes(examples, 2, 1.0), Error);
  REQUIRE_THROWS_AS(train_linear_svm(examples, 2), Error);
  REQUIRE_THROWS_AS(train_kmeans_classifier(examples, 2), Error);
}

TEST_CASE("scaling all counts by 10 leaves predictions unchanged", "[linear_models]") {
  SyntheticConfig cfg;
  cfg.n_tweets = 200;
  cfg.seed = 44;
  cfg.label_noise = 0.05;
  const Corpus corpus = generate_synthetic(cfg).corpus;
  std::vector<TokenSeq> docs;
  for (const auto& r : corpus.records) docs.push_back(tokenize(r.text));
  const Vocabulary vocab = build_vocab(docs, {VocabKind::word_ngram, 1});
  std::vector<LabeledExample> examples, scaled;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const SparseVector x = extract_ngrams(docs[i], vocab);
    SparseVector x10;
    for (const auto& [id, w] : x.entries) x10.add(id, 10.0 * w);
    examples.emplace_back(x, *corpus.records[i].label);
    scaled.emplace_back(std::move(x10), *corpus.records[i].label);
  }
  const NaiveBayesModel base = train_naive_bayes(examples, vocab.size(), 1.0);
  const NaiveBayesModel big = train_naive_bayes(scaled, vocab.size(), 1.0);
  for (const auto& [x, _] : examples) REQUIRE(predict(base, x) == predict(big, x));

  // Scaling alpha along with the counts leaves the smoothed conditionals
  // themselves unchanged, so the argmax cannot move.
  const NaiveBayesModel both = train_naive_bayes(scaled, vocab.size(), 10.0);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t t = 0; t < base.log_cond[c].size(); ++t)
      REQUIRE(both.log_cond[c][t] == Catch::Approx(base.log_cond[c][t]).margin(1e-12));
  for (const auto& [x, _] : examples) REQUIRE(predict(base, x) == predict(both, x));
}

TEST_CASE("svm separates two one-hot examples", "[linear_models]") {
  const std::vector<LabeledExample> examples = {{one_hot(0), 1}, {one_hot(1), -1}};
  const LinearSvmModel m = train_linear_svm(examples, 2, 1e-4, 10, 3);
  REQUIRE(predict(m, one_hot(0)) == 1);
  REQUIRE(predict(m, one_hot(1)) == -1);
}

TEST_CASE("svm training is bit-for-bit deterministic", "[linear_models]") {
  SyntheticConfig cfg;
  cfg.n_tweets = 120;
  cfg.seed = 10;
  const Corpus corpus = generate_synthetic(cfg).corpus;
  std::vector<TokenSeq> docs;
  for (const auto& r : corpus.records) docs.push_back(tokenize(r.text));
  const Vocabulary vocab = build_vocab(docs, {VocabKind::word_ngram, 1});
  std::vector<LabeledExample> examples;
  for (std::size_t i = 0; i < docs.size(); ++i)
    examples.emplace_back(extract_ngrams(docs[i], vocab), *corpus.records[i].label);
  const LinearSvmModel a = train_linear_svm(examples, vocab.size(), 1e-4, 5, 99);
  const LinearSvmModel b = train_linear_svm(examples, vocab.size(), 1e-4, 5, 99);
  REQUIRE(a.weights == b.weights);
  REQUIRE(a.bias == b.bias);
  const LinearSvmModel c = train_linear_svm(examples, vocab.size(), 1e-4, 5, 100);
  REQUIRE(a.weights != c.weights);
}

TEST_CASE("svm objective is non-increasing at epoch ends on a separable set", "[linear_models]") {
  // Fixed separable toy set; epoch e of every run replays the same shuffles,
  // so training for e epochs observes the trajectory at each epoch end.
  std::vector<LabeledExample> examples;
  for (int i = 0; i < 10; ++i) {
    SparseVector pos;
    pos.add(0, 1.0);
    pos.add(2 + (i % 3), 0.5);
    examples.emplace_back(pos, 1);
    SparseVector neg;
    neg.add(1, 1.0);
    neg.add(2 + (i % 3), 0.5);
    examples.emplace_back(neg, -1);
  }
  double prev = 1e300;
  for (int epochs = 1; epochs <= 10; ++epochs) {
    const LinearSvmModel m = train_linear_svm(examples, 5, 1e-3, epochs, 1234);
    const double obj = svm_objective(m, examples);
    REQUIRE(obj <= prev + 1e-6);
    prev = obj;
  }
}

TEST_CASE("all-zero features predict the bias sign uniformly", "[linear_models]") {
  const std::vector<LabeledExample> examples = {
      {SparseVector{}, 1}, {SparseVector{}, 1}, {SparseVector{}, -1}};
  const LinearSvmModel m = train_linear_svm(examples, 3, 1e-4, 5, 0);
  const int expected = m.bias >= 0.0 ? 1 : -1;
  for (int id = 0; id < 3; ++id) {
    SparseVector zero;  // empty = all-zero vector
    (void)id;
    REQUIRE(predict(m, zero) == expected);
  }
}

TEST_CASE("svm zero score breaks toward +1", "[linear_models]") {
  LinearSvmModel m;
  m.weights = {1.0, -1.0};
  m.bias = 0.0;
  REQUIRE(predict(m, one_hot(0)) == 1);
  REQUIRE(predict(m, one_hot(1)) == -1);
  REQUIRE(predict(m, SparseVector{}) == 1);  // score exactly 0
}

TEST_CASE("kmeans classifier recovers two tight groups", "[linear_models]") {
  Rng rng(6);
  std::vector<LabeledExample> examples;
  for (int i = 0; i < 30; ++i) {
    SparseVector a;
    a.add(0, 5.0 + rng.uniform(-0.1, 0.1));
    examples.emplace_back(a, 1);
    SparseVector b;
    b.add(1, 5.0 + rng.uniform(-0.1, 0.1));
    examples.emplace_back(b, -1);
  }
  const KMeansClassifierModel m = train_kmeans_classifier(examples, 2, 2, 5);

  // Brute-force group means per coordinate.
  double mean_pos = 0.0, mean_neg = 0.0;
  for (const auto& [x, y] : examples)
    (y == 1 ? mean_pos : mean_neg) += (y == 1 ? x.at(0) : x.at(1));
  mean_pos /= 30.0;
  mean_neg /= 30.0;

  int correct = 0;
  for (const auto& [x, y] : examples)
    if (predict(m, x) == y) ++correct;
  REQUIRE(correct == 60);

  bool found_pos = false, found_neg = false;
  for (std::size_t c = 0; c < 2; ++c) {
    if (m.cluster_label[c] == 1) {
      REQUIRE(m.centroids[c][0] == Catch::Approx(mean_pos).margin(1e-9));
      found_pos = true;
    } else {
      REQUIRE(m.centroids[c][1] == Catch::Approx(mean_neg).margin(1e-9));
      found_neg = true;
    }
  }
  REQUIRE(found_pos);
  REQUIRE(found_neg);
}

TEST_CASE("identical points cannot seed k clusters", "[linear_models]") {
  std::vector<LabeledExample> examples;
  for (int i = 0; i < 6; ++i) examples.emplace_back(one_hot(0, 2.0), i % 2 == 0 ? 1 : -1);
  REQUIRE_THROWS_AS(train_kmeans_classifier(examples, 1, 2, 0), Error);
}

TEST_CASE("cluster labels follow the training majority with ties to +1", "[linear_models]") {
  // One tight blob at coordinate 0 (3 positive, 1 negative) and one at
  // coordinate 1 (4 negative).
  std::vector<LabeledExample> examples = {
      {one_hot(0, 1.00), 1}, {one_hot(0, 1.01), 1},  {one_hot(0, 0.99), 1},
      {one_hot(0, 1.02), -1}, {one_hot(1, 1.00), -1}, {one_hot(1, 1.01), -1},
      {one_hot(1, 0.99), -1}, {one_hot(1, 1.02), -1},
  };
  const KMeansClassifierModel m = train_kmeans_classifier(examples, 2, 2, 8);
  REQUIRE(predict(m, one_hot(0)) == 1);
  REQUIRE(predict(m, one_hot(1)) == -1);

  // Balanced cluster: 1 positive + 1 negative at the same spot -> +1.
  std::vector<LabeledExample> tied = {
      {one_hot(0, 1.0), 1}, {one_hot(0, 1.001), -1}, {one_hot(1, 1.0), 1}, {one_hot(1, 1.001), -1}};
  const KMeansClassifierModel mt = train_kmeans_classifier(tied, 2, 2, 8);
  REQUIRE(mt.cluster_label[0] == 1);
  REQUIRE(mt.cluster_label[1] == 1);
}

TEST_CASE("evaluate counts the confusion matrix", "[linear_models]") {
  const EvalReport r = evaluate({1, -1, 1, 1}, {1, -1, -1, 1});
  REQUIRE(r.accuracy == 0.75);
  REQUIRE(r.tp == 2);
  REQUIRE(r.tn == 1);
  REQUIRE(r.fp == 1);
  REQUIRE(r.fn == 0);
  REQUIRE(r.false_negative_rate == 0.0);
  REQUIRE(r.false_positive_rate == 0.5);
}

TEST_CASE("perfect predictions have a clean report", "[linear_models]") {
  const EvalReport r = evaluate({1, -1, -1}, {1, -1, -1});
  REQUIRE(r.accuracy == 1.0);
  REQUIRE(r.fp == 0);
  REQUIRE(r.fn == 0);
  REQUIRE(r.tp + r.tn == 3);
}

TEST_CASE("evaluate rejects mismatched lengths", "[linear_models]") {
  REQUIRE_THROWS_AS(evaluate({1, 1}, {1}), Error);
  REQUIRE_THROWS_AS(evaluate({}, {}), Error);
}
