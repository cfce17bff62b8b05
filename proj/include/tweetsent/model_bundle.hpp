#pragma once

#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tweetsent/corpus.hpp"
#include "tweetsent/error.hpp"
#include "tweetsent/features.hpp"
#include "tweetsent/linear_models.hpp"
#include "tweetsent/neural.hpp"

namespace tweetsent {

enum class ModelKind { nb, svm, kmeans, rnn };
enum class FeatureKind { tokenizer, unigram, bigram, char5, tfidf };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::nb: return "nb";
    case ModelKind::svm: return "svm";
    case ModelKind::kmeans: return "kmeans";
    case ModelKind::rnn: return "rnn";
  }
  return "nb";
}

inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "nb") return ModelKind::nb;
  if (s == "svm") return ModelKind::svm;
  if (s == "kmeans") return ModelKind::kmeans;
  if (s == "rnn") return ModelKind::rnn;
  throw Error("unknown model kind '" + s + "' (expected nb, svm, kmeans, or rnn)");
}

inline std::string to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::tokenizer: return "tokenizer";
    case FeatureKind::unigram: return "unigram";
    case FeatureKind::bigram: return "bigram";
    case FeatureKind::char5: return "char5";
    case FeatureKind::tfidf: return "tfidf";
  }
  return "unigram";
}

inline FeatureKind feature_kind_from_string(const std::string& s) {
  if (s == "tokenizer") return FeatureKind::tokenizer;
  if (s == "unigram") return FeatureKind::unigram;
  if (s == "bigram") return FeatureKind::bigram;
  if (s == "char5") return FeatureKind::char5;
  if (s == "tfidf") return FeatureKind::tfidf;
  throw Error("unknown feature kind '" + s +
              "' (expected tokenizer, unigram, bigram, char5, or tfidf)");
}

// Display names matching the accuracy-table convention, e.g.
// "Unigram SVM" or "5-char-gram Naive Bayes".
inline std::string method_name(FeatureKind f, ModelKind m) {
  std::string feat;
  switch (f) {
    case FeatureKind::tokenizer: feat = "Tokenizer"; break;
    case FeatureKind::unigram: feat = "Unigram"; break;
    case FeatureKind::bigram: feat = "Bigram"; break;
    case FeatureKind::char5: feat = "5-char-gram"; break;
    case FeatureKind::tfidf: feat = "td-idf"; break;
  }
  std::string model;
  switch (m) {
    case ModelKind::nb: model = "Naive Bayes"; break;
    case ModelKind::svm: model = "SVM"; break;
    case ModelKind::kmeans: model = "k-means"; break;
    case ModelKind::rnn: model = "RNN"; break;
  }
  return feat + " " + model;
}

// The tokenizer feature feeds id sequences to the RNN; everything else is a
// sparse bag-of-terms for the classical models.
inline void check_combination(ModelKind model, FeatureKind features) {
  if (model == ModelKind::rnn && features != FeatureKind::tokenizer)
    throw Error("the rnn model requires --features tokenizer");
  if (model != ModelKind::rnn && features == FeatureKind::tokenizer)
    throw Error("tokenizer features require --model rnn");
}

// A trained model plus everything needed to featurize raw records the same
// way at prediction time.
struct ModelBundle {
  ModelKind kind = ModelKind::nb;
  FeatureKind features = FeatureKind::unigram;
  Vocabulary vocab;
  std::variant<NaiveBayesModel, LinearSvmModel, KMeansClassifierModel, RnnModel> model;
};

// Sparse features for one record under the bundle's feature configuration
// (classical models only).
inline SparseVector featurize(const ModelBundle& bundle, const TweetRecord& rec) {
  switch (bundle.features) {
    case FeatureKind::unigram:
    case FeatureKind::bigram:
      return extract_ngrams(tokenize(rec.text), bundle.vocab);
    case FeatureKind::char5:
      return extract_ngrams_chars(rec.text, bundle.vocab);
    case FeatureKind::tfidf: {
      const SparseVector counts = extract_ngrams(tokenize(rec.text), bundle.vocab);
      return tfidf_weight({counts}, bundle.vocab)[0];
    }
    case FeatureKind::tokenizer:
      throw Error("tokenizer features have no sparse representation");
  }
  throw Error("unreachable feature kind");
}

inline int predict_record(const ModelBundle& bundle, const TweetRecord& rec) {
  if (const auto* rnn = std::get_if<RnnModel>(&bundle.model)) {
    const std::vector<int> ids = encode_sequence(tokenize(rec.text), bundle.vocab, rnn->max_len);
    return predict(*rnn, ids);
  }
  const SparseVector x = featurize(bundle, rec);
  if (const auto* nb = std::get_if<NaiveBayesModel>(&bundle.model)) return predict(*nb, x);
  if (const auto* svm = std::get_if<LinearSvmModel>(&bundle.model)) return predict(*svm, x);
  return predict(std::get<KMeansClassifierModel>(bundle.model), x);
}

// --- JSON serialization -------------------------------------------------------

inline nlohmann::ordered_json bundle_to_json(const ModelBundle& bundle) {
  nlohmann::ordered_json obj;
  obj["kind"] = to_string(bundle.kind);
  obj["features"] = to_string(bundle.features);
  obj["vocab"] = vocab_to_json(bundle.vocab);
  if (const auto* nb = std::get_if<NaiveBayesModel>(&bundle.model)) {
    obj["model"] = {{"log_prior_neg", nb->log_prior[0]},
                    {"log_prior_pos", nb->log_prior[1]},
                    {"log_cond_neg", nb->log_cond[0]},
                    {"log_cond_pos", nb->log_cond[1]},
                    {"alpha", nb->alpha},
                    {"vocab_size", nb->vocab_size}};
  } else if (const auto* svm = std::get_if<LinearSvmModel>(&bundle.model)) {
    obj["model"] = {{"weights", svm->weights}, {"bias", svm->bias}, {"lambda", svm->lambda}};
  } else if (const auto* km = std::get_if<KMeansClassifierModel>(&bundle.model)) {
    obj["model"] = {{"centroids", km->centroids}, {"cluster_label", km->cluster_label}};
  } else {
    obj["model"] = rnn_to_json(std::get<RnnModel>(bundle.model));
  }
  return obj;
}

inline ModelBundle bundle_from_json(const nlohmann::json& obj) {
  ModelBundle bundle;
  bundle.kind = model_kind_from_string(obj.at("kind").get<std::string>());
  bundle.features = feature_kind_from_string(obj.at("features").get<std::string>());
  bundle.vocab = vocab_from_json(obj.at("vocab"));
  const auto& mj = obj.at("model");
  switch (bundle.kind) {
    case ModelKind::nb: {
      NaiveBayesModel nb;
      nb.log_prior[0] = mj.at("log_prior_neg").get<double>();
      nb.log_prior[1] = mj.at("log_prior_pos").get<double>();
      nb.log_cond[0] = mj.at("log_cond_neg").get<std::vector<double>>();
      nb.log_cond[1] = mj.at("log_cond_pos").get<std::vector<double>>();
      nb.alpha = mj.at("alpha").get<double>();
      nb.vocab_size = mj.at("vocab_size").get<int>();
      bundle.model = std::move(nb);
      break;
    }
    case ModelKind::svm: {
      LinearSvmModel svm;
      svm.weights = mj.at("weights").get<std::vector<double>>();
      svm.bias = mj.at("bias").get<double>();
      svm.lambda = mj.at("lambda").get<double>();
      bundle.model = std::move(svm);
      break;
    }
    case ModelKind::kmeans: {
      KMeansClassifierModel km;
      km.centroids = mj.at("centroids").get<std::vector<std::vector<double>>>();
      km.cluster_label = mj.at("cluster_label").get<std::vector<int>>();
      bundle.model = std::move(km);
      break;
    }
    case ModelKind::rnn:
      bundle.model = rnn_from_json(mj);
      break;
  }
  return bundle;
}

inline void save_model(const std::string& path, const ModelBundle& bundle) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file '" + path + "'");
  out << bundle_to_json(bundle).dump() << "\n";
}

inline ModelBundle load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file '" + path + "'");
  nlohmann::json obj;
  try {
    in >> obj;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed model file '" + path + "': " + e.what());
  }
  return bundle_from_json(obj);
}

}  // namespace tweetsent
