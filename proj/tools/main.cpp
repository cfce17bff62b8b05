// tweetsent: weak-label a tweet corpus, train sentiment classifiers, and run
// the pre/post-event outcome analysis. One subcommand per pipeline stage; all
// state lives in files, so runs are reproducible from a single seed.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tweetsent/cohort.hpp"
#include "tweetsent/corpus.hpp"
#include "tweetsent/features.hpp"
#include "tweetsent/geo.hpp"
#include "tweetsent/linear_models.hpp"
#include "tweetsent/model_bundle.hpp"
#include "tweetsent/neural.hpp"

namespace ts = tweetsent;

namespace {

std::string default_out(const std::string& name) {
  const char* dir = std::getenv("TWEETSENT_OUT");
  if (dir == nullptr || *dir == '\0') return name;
  std::string d = dir;
  if (d.back() != '/') d.push_back('/');
  return d + name;
}

std::vector<std::string> split_colon(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(':', pos);
    if (next == std::string::npos) {
      parts.push_back(s.substr(pos));
      break;
    }
    parts.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

// NAME:START:END[:MARGIN_DAYS], dates as YYYY-MM-DD.
ts::EventSpec parse_event(const std::string& spec) {
  const auto parts = split_colon(spec);
  if (parts.size() != 3 && parts.size() != 4)
    throw ts::Error("bad --event '" + spec + "' (expected NAME:START:END[:MARGIN_DAYS])");
  int margin = 14;
  if (parts.size() == 4) {
    try {
      margin = std::stoi(parts[3]);
    } catch (const std::exception&) {
      throw ts::Error("bad --event margin in '" + spec + "'");
    }
  }
  return ts::make_event(parts[0], parts[1], parts[2], margin);
}

// LAT:LON:STD:POSITIVE_FRACTION
ts::SyntheticRegion parse_region(const std::string& spec) {
  const auto parts = split_colon(spec);
  if (parts.size() != 4)
    throw ts::Error("bad --region '" + spec + "' (expected LAT:LON:STD:POS_FRACTION)");
  try {
    return {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3])};
  } catch (const std::exception&) {
    throw ts::Error("bad --region '" + spec + "'");
  }
}

ts::Corpus load_labeled(const std::string& path) {
  ts::Corpus corpus = ts::ingest_corpus(path, ts::Provenance::synthetic);
  for (const auto& rec : corpus.records)
    if (!rec.label) throw ts::Error("record '" + rec.id + "' in " + path + " is unlabeled");
  return corpus;
}

std::string pct(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * v);
  return buf;
}

struct TrainOptions {
  std::string model = "nb";
  std::string features = "unigram";
  std::string in_path;
  std::string val_path;
  std::string out_path;
  std::string embeddings_path;
  std::uint64_t seed = 42;
  int min_df = 1;
  double alpha = 1.0;
  double lambda = 1e-4;
  int svm_epochs = 10;
  int k = 2;
  int hidden_size = 128;
  int dense_size = 64;
  int embedding_dim = 100;
  int max_len = 50;
  int batch_size = 32;
  int epochs = 5;
  double lr = 1e-3;
  double dropout = 0.5;
};

ts::ModelBundle train_bundle(const TrainOptions& opt) {
  const ts::ModelKind kind = ts::model_kind_from_string(opt.model);
  const ts::FeatureKind features = ts::feature_kind_from_string(opt.features);
  ts::check_combination(kind, features);

  const ts::Corpus corpus = load_labeled(opt.in_path);
  if (corpus.records.empty()) throw ts::Error("training corpus " + opt.in_path + " is empty");
  std::cerr << "loaded " << corpus.records.size() << " training records from " << opt.in_path
            << "\n";

  std::vector<ts::TokenSeq> token_docs;
  std::vector<std::string> texts;
  std::vector<int> labels;
  token_docs.reserve(corpus.records.size());
  for (const auto& rec : corpus.records) {
    token_docs.push_back(ts::tokenize(rec.text));
    texts.push_back(rec.text);
    labels.push_back(*rec.label);
  }

  ts::ModelBundle bundle;
  bundle.kind = kind;
  bundle.features = features;

  if (kind == ts::ModelKind::rnn) {
    bundle.vocab = ts::build_vocab(token_docs, {ts::VocabKind::token_id, 1}, opt.min_df);
    std::vector<ts::SequenceExample> train_seq;
    for (std::size_t i = 0; i < token_docs.size(); ++i)
      train_seq.push_back({ts::encode_sequence(token_docs[i], bundle.vocab, opt.max_len),
                           labels[i]});
    std::vector<ts::SequenceExample> val_seq;
    if (!opt.val_path.empty()) {
      const ts::Corpus val = load_labeled(opt.val_path);
      for (const auto& rec : val.records)
        val_seq.push_back(
            {ts::encode_sequence(ts::tokenize(rec.text), bundle.vocab, opt.max_len), *rec.label});
    }
    ts::EmbeddingMatrix embedding =
        opt.embeddings_path.empty()
            ? ts::EmbeddingMatrix::random(bundle.vocab.size(), opt.embedding_dim,
                                          ts::derive_seed(opt.seed, 0xe3b))
            : ts::load_embeddings(opt.embeddings_path, bundle.vocab);
    ts::RnnTrainConfig cfg;
    cfg.hidden_size = opt.hidden_size;
    cfg.dense_size = opt.dense_size;
    cfg.max_len = opt.max_len;
    cfg.dropout_rate = opt.dropout;
    cfg.batch_size = opt.batch_size;
    cfg.epochs = opt.epochs;
    cfg.adam.lr = opt.lr;
    auto [model, history] = ts::train_rnn(train_seq, val_seq, std::move(embedding), cfg, opt.seed);
    for (std::size_t e = 0; e < history.train_loss.size(); ++e) {
      std::cerr << "epoch " << e + 1 << ": train loss " << history.train_loss[e];
      if (!val_seq.empty()) std::cerr << ", val accuracy " << pct(history.val_accuracy[e]);
      std::cerr << "\n";
    }
    bundle.model = std::move(model);
    return bundle;
  }

  std::vector<ts::SparseVector> vectors;
  if (features == ts::FeatureKind::char5) {
    bundle.vocab = ts::build_vocab_chars(texts, 5, opt.min_df);
    for (const auto& t : texts) vectors.push_back(ts::extract_ngrams_chars(t, bundle.vocab));
  } else {
    const int n = features == ts::FeatureKind::bigram ? 2 : 1;
    bundle.vocab = ts::build_vocab(token_docs, {ts::VocabKind::word_ngram, n}, opt.min_df);
    for (const auto& d : token_docs) vectors.push_back(ts::extract_ngrams(d, bundle.vocab));
    if (features == ts::FeatureKind::tfidf) vectors = ts::tfidf_weight(vectors, bundle.vocab);
  }
  std::cerr << "vocabulary: " << bundle.vocab.size() << " terms\n";

  std::vector<ts::LabeledExample> examples;
  examples.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i)
    examples.emplace_back(std::move(vectors[i]), labels[i]);

  switch (kind) {
    case ts::ModelKind::nb:
      bundle.model = ts::train_naive_bayes(examples, bundle.vocab.size(), opt.alpha);
      break;
    case ts::ModelKind::svm:
      bundle.model = ts::train_linear_svm(examples, bundle.vocab.size(), opt.lambda,
                                          opt.svm_epochs, opt.seed);
      break;
    case ts::ModelKind::kmeans:
      bundle.model = ts::train_kmeans_classifier(examples, bundle.vocab.size(), opt.k, opt.seed);
      break;
    case ts::ModelKind::rnn:
      break;  // handled above
  }
  return bundle;
}

ts::EvalReport eval_on(const ts::ModelBundle& bundle, const std::string& path) {
  const ts::Corpus corpus = load_labeled(path);
  if (corpus.records.empty()) throw ts::Error("evaluation corpus " + path + " is empty");
  std::vector<int> preds, gold;
  for (const auto& rec : corpus.records) {
    preds.push_back(ts::predict_record(bundle, rec));
    gold.push_back(*rec.label);
  }
  return ts::evaluate(preds, gold);
}

std::vector<ts::GeoPoint> geo_points(const ts::Corpus& corpus,
                                     const std::vector<ts::EventSpec>& events, int* skipped) {
  std::vector<ts::GeoPoint> points;
  for (const auto& rec : corpus.records) {
    if (!rec.lat || !rec.lon) {
      ++*skipped;
      continue;
    }
    if (!rec.label) throw ts::Error("record '" + rec.id + "' has no prediction attached");
    ts::GeoPoint p;
    p.sentiment = *rec.label;
    p.lat = *rec.lat;
    p.lon = *rec.lon;
    p.city = rec.city;
    p.window = ts::Window::post;
    if (!events.empty()) {
      bool in_window = false;
      for (const auto& ev : events) {
        if (rec.event && *rec.event != ev.name) continue;
        const std::int64_t margin = static_cast<std::int64_t>(ev.margin_days) * 86400;
        if (rec.created_at >= ev.start - margin && rec.created_at < ev.end + margin + 86400) {
          p.window = rec.created_at < ev.start ? ts::Window::pre : ts::Window::post;
          in_window = true;
          break;
        }
      }
      if (!in_window) {
        ++*skipped;
        continue;
      }
    }
    points.push_back(std::move(p));
  }
  return points;
}

// Reads the cohort CSV back and renders the human-readable comparison table.
void render_report(std::istream& in, std::ostream& out) {
  std::string line;
  if (!std::getline(in, line)) throw ts::Error("cohort CSV is empty");
  const std::string expected = "event,block,pre_mean,post_mean,diff,n_pre,n_post,t,df,p,sig_1pct";
  if (line != expected) throw ts::Error("unexpected cohort CSV header: " + line);
  out << "Pre/post mean sentiment by event (tweet-level averages of +-1 predictions)\n";
  out << "---------------------------------------------------------------------------\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-16s %-14s %8s %8s %8s %10s %12s\n", "event", "block", "pre",
                "post", "diff", "p", "sig at 1%");
  out << buf;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 11) throw ts::Error("bad cohort CSV row: " + line);
    const bool means_na = f[2] == "na";
    const bool test_na = f[9] == "na";
    std::string pre = "na", post = "na", diff = "na", p = "na";
    if (!means_na) {
      std::snprintf(buf, sizeof(buf), "%+.2f", std::stod(f[2]));
      pre = buf;
      std::snprintf(buf, sizeof(buf), "%+.2f", std::stod(f[3]));
      post = buf;
      std::snprintf(buf, sizeof(buf), "%+.2f", std::stod(f[4]));
      diff = buf;
    }
    if (!test_na) {
      std::snprintf(buf, sizeof(buf), "%.4g", std::stod(f[9]));
      p = buf;
    }
    const std::string sig = test_na ? "na" : (f[10] == "1" ? "yes" : "no");
    std::snprintf(buf, sizeof(buf), "%-16s %-14s %8s %8s %8s %10s %12s\n", f[0].c_str(),
                  f[1].c_str(), pre.c_str(), post.c_str(), diff.c_str(), p.c_str(), sig.c_str());
    out << buf;
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ts::Error("cannot write '" + path + "'");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tweet sentiment pipeline: synthesize or ingest a corpus, weak-label it,\n"
               "train classifiers, and compare pre/post-event sentiment"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file with [subcommand] sections; flags win");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a seeded synthetic corpus");
  ts::SyntheticConfig syn_cfg;
  std::string synth_out;
  std::vector<std::string> synth_regions, synth_events;
  synth->add_option("--seed", syn_cfg.seed, "master seed");
  synth->add_option("--out", synth_out, "output corpus (JSONL)");
  synth->add_option("--n-tweets", syn_cfg.n_tweets, "number of tweets");
  synth->add_option("--n-users", syn_cfg.n_users, "number of users");
  synth->add_option("--label-noise", syn_cfg.label_noise, "label flip probability");
  synth->add_option("--class-token-prob", syn_cfg.class_token_prob,
                    "probability a token comes from the stance lexicon");
  synth->add_option("--tokens-min", syn_cfg.tokens_min, "min tokens per tweet");
  synth->add_option("--tokens-max", syn_cfg.tokens_max, "max tokens per tweet");
  synth->add_option("--pos-lexicon", syn_cfg.positive_lexicon_size, "positive lexicon size");
  synth->add_option("--neg-lexicon", syn_cfg.negative_lexicon_size, "negative lexicon size");
  synth->add_option("--neutral-lexicon", syn_cfg.neutral_lexicon_size, "neutral lexicon size");
  synth->add_option("--region", synth_regions, "region as LAT:LON:STD:POS_FRACTION (repeatable)");
  synth->add_option("--event", synth_events, "event as NAME:START:END (repeatable)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate a JSONL corpus and re-emit it");
  std::string ingest_in, ingest_out, ingest_prov = "event_related";
  ingest->add_option("--in", ingest_in, "input corpus")->required();
  ingest->add_option("--out", ingest_out, "output corpus");
  ingest->add_option("--provenance", ingest_prov, "influential|event_related|synthetic");

  // label
  auto* label = app.add_subcommand("label", "apply influential-account stances as labels");
  std::string label_in, label_out, label_stances;
  label->add_option("--in", label_in, "influential corpus")->required();
  label->add_option("--stances", label_stances, "stance list (JSONL)")->required();
  label->add_option("--out", label_out, "output corpus");

  // split
  auto* split = app.add_subcommand("split", "stratified train/validation split");
  std::string split_in, split_train, split_val;
  double split_fraction = 0.9;
  std::uint64_t split_seed = 42;
  split->add_option("--in", split_in, "labeled corpus")->required();
  split->add_option("--out-train", split_train, "train output");
  split->add_option("--out-val", split_val, "validation output");
  split->add_option("--fraction", split_fraction, "train fraction (default 0.9)");
  split->add_option("--seed", split_seed, "shuffle seed");

  // train
  auto* train = app.add_subcommand("train", "train a sentiment classifier");
  TrainOptions topt;
  train->add_option("--model", topt.model, "nb|svm|kmeans|rnn")->required();
  train->add_option("--features", topt.features, "tokenizer|unigram|bigram|char5|tfidf")
      ->required();
  train->add_option("--in", topt.in_path, "labeled training corpus")->required();
  train->add_option("--val", topt.val_path, "validation corpus (rnn per-epoch accuracy)");
  train->add_option("--out", topt.out_path, "model output (JSON)");
  train->add_option("--seed", topt.seed, "training seed");
  train->add_option("--min-df", topt.min_df, "min document frequency for vocabulary terms");
  train->add_option("--alpha", topt.alpha, "naive bayes smoothing");
  train->add_option("--lambda", topt.lambda, "svm regularization");
  train->add_option("--svm-epochs", topt.svm_epochs, "svm epochs");
  train->add_option("--k", topt.k, "k-means cluster count");
  train->add_option("--embeddings", topt.embeddings_path,
                    "pretrained word vectors (token + floats per line); random if omitted");
  train->add_option("--hidden-size", topt.hidden_size, "lstm hidden units");
  train->add_option("--dense-size", topt.dense_size, "dense layer width");
  train->add_option("--embedding-dim", topt.embedding_dim,
                    "embedding dim when no --embeddings file is given");
  train->add_option("--max-len", topt.max_len, "sequence length");
  train->add_option("--batch-size", topt.batch_size, "minibatch size");
  train->add_option("--epochs", topt.epochs, "rnn epochs");
  train->add_option("--lr", topt.lr, "adam learning rate");
  train->add_option("--dropout", topt.dropout, "dropout rate on the final hidden state");

  // eval
  auto* eval = app.add_subcommand("eval", "accuracy table row for a trained model");
  std::string eval_model, eval_val, eval_test, eval_out;
  eval->add_option("--model", eval_model, "model JSON")->required();
  eval->add_option("--val", eval_val, "validation corpus")->required();
  eval->add_option("--test", eval_test, "test corpus (optional)");
  eval->add_option("--out", eval_out, "also write the row to this file");

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "attach predictions to a corpus");
  std::string pred_model, pred_in, pred_out;
  predict_cmd->add_option("--model", pred_model, "model JSON")->required();
  predict_cmd->add_option("--in", pred_in, "input corpus")->required();
  predict_cmd->add_option("--out", pred_out, "output corpus with label = prediction");

  // geo-cluster
  auto* geo = app.add_subcommand("geo-cluster", "k-means over (sentiment, lat, lon)");
  std::string geo_in, geo_out, geo_city_out;
  int geo_k = 4;
  std::uint64_t geo_seed = 42;
  std::vector<std::string> geo_events;
  geo->add_option("--in", geo_in, "predicted corpus")->required();
  geo->add_option("--k", geo_k, "cluster count (default 4)");
  geo->add_option("--seed", geo_seed, "seeding");
  geo->add_option("--out", geo_out, "cluster CSV");
  geo->add_option("--city-out", geo_city_out, "per-city CSV (optional)");
  geo->add_option("--event", geo_events, "event window NAME:START:END (repeatable)");

  // cohort
  auto* cohort = app.add_subcommand("cohort", "overall vs within-cohort pre/post comparison");
  std::string cohort_in, cohort_out;
  std::vector<std::string> cohort_events;
  cohort->add_option("--in", cohort_in, "predicted corpus")->required();
  cohort->add_option("--event", cohort_events, "event NAME:START:END (repeatable)")->required();
  cohort->add_option("--out", cohort_out, "cohort CSV");

  // report
  auto* report = app.add_subcommand("report", "render a cohort CSV as a text table");
  std::string report_in, report_out;
  report->add_option("--in", report_in, "cohort CSV")->required();
  report->add_option("--out", report_out, "text report output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*synth) {
      if (!synth_regions.empty()) syn_cfg.regions.clear();
      for (const auto& r : synth_regions) syn_cfg.regions.push_back(parse_region(r));
      if (!synth_events.empty()) syn_cfg.events.clear();
      for (const auto& e : synth_events) {
        const ts::EventSpec ev = parse_event(e);
        syn_cfg.events.push_back({ev.name, ev.start, ev.end});
        syn_cfg.margin_days = ev.margin_days;
      }
      const std::string out = synth_out.empty() ? default_out("synthetic.jsonl") : synth_out;
      const ts::SyntheticResult result = ts::generate_synthetic(syn_cfg);
      ts::serialize_corpus(out, result.corpus);
      std::cerr << "wrote " << result.corpus.records.size() << " tweets to " << out << "\n";
    } else if (*ingest) {
      const ts::Corpus corpus =
          ts::ingest_corpus(ingest_in, ts::provenance_from_string(ingest_prov));
      const std::string out = ingest_out.empty() ? default_out("canonical.jsonl") : ingest_out;
      ts::serialize_corpus(out, corpus);
      std::cerr << "validated " << corpus.records.size() << " records -> " << out << "\n";
    } else if (*label) {
      const ts::Corpus corpus = ts::ingest_corpus(label_in, ts::Provenance::influential);
      const ts::StanceList stances = ts::load_stances(label_stances);
      const ts::Corpus labeled = ts::apply_influential_labels(corpus, stances);
      const std::string out = label_out.empty() ? default_out("labeled.jsonl") : label_out;
      ts::serialize_corpus(out, labeled);
      std::cerr << "labeled " << labeled.records.size() << " of " << corpus.records.size()
                << " records -> " << out << "\n";
    } else if (*split) {
      const ts::Corpus corpus = load_labeled(split_in);
      auto [train_c, val_c] = ts::split_train_val(corpus, split_fraction, split_seed);
      const std::string out_t = split_train.empty() ? default_out("train.jsonl") : split_train;
      const std::string out_v = split_val.empty() ? default_out("val.jsonl") : split_val;
      ts::serialize_corpus(out_t, train_c);
      ts::serialize_corpus(out_v, val_c);
      std::cerr << "split " << corpus.records.size() << " records into "
                << train_c.records.size() << " train / " << val_c.records.size() << " val\n";
    } else if (*train) {
      const ts::ModelBundle bundle = train_bundle(topt);
      const std::string out = topt.out_path.empty() ? default_out("model.json") : topt.out_path;
      ts::save_model(out, bundle);
      std::cerr << "saved " << ts::method_name(bundle.features, bundle.kind) << " model to "
                << out << "\n";
    } else if (*eval) {
      const ts::ModelBundle bundle = ts::load_model(eval_model);
      const ts::EvalReport val_report = eval_on(bundle, eval_val);
      std::string row = ts::method_name(bundle.features, bundle.kind) + "\t" +
                        pct(val_report.accuracy) + "\t";
      if (!eval_test.empty()) {
        const ts::EvalReport test_report = eval_on(bundle, eval_test);
        row += pct(test_report.accuracy);
      } else {
        row += "-";
      }
      std::cout << row << "\n";
      std::cerr << "validation: accuracy " << pct(val_report.accuracy) << ", FNR "
                << pct(val_report.false_negative_rate) << ", FPR "
                << pct(val_report.false_positive_rate) << "\n";
      if (!eval_out.empty()) open_out(eval_out) << row << "\n";
    } else if (*predict_cmd) {
      const ts::ModelBundle bundle = ts::load_model(pred_model);
      ts::Corpus corpus = ts::ingest_corpus(pred_in, ts::Provenance::event_related);
      for (auto& rec : corpus.records) rec.label = ts::predict_record(bundle, rec);
      const std::string out = pred_out.empty() ? default_out("predicted.jsonl") : pred_out;
      ts::serialize_corpus(out, corpus);
      std::cerr << "predicted " << corpus.records.size() << " records -> " << out << "\n";
    } else if (*geo) {
      const ts::Corpus corpus = ts::ingest_corpus(geo_in, ts::Provenance::event_related);
      std::vector<ts::EventSpec> events;
      for (const auto& e : geo_events) events.push_back(parse_event(e));
      int skipped = 0;
      const std::vector<ts::GeoPoint> points = geo_points(corpus, events, &skipped);
      if (points.empty()) throw ts::Error("no geolocated points in " + geo_in);
      const ts::GeoClusterReport cluster_report =
          ts::cluster_geo_sentiment(points, geo_k, geo_seed);
      const std::string out = geo_out.empty() ? default_out("clusters.csv") : geo_out;
      {
        auto f = open_out(out);
        ts::write_cluster_csv(f, cluster_report);
      }
      std::cerr << "clustered " << points.size() << " points (" << skipped
                << " skipped) -> " << out << "\n";
      if (!geo_city_out.empty()) {
        auto f = open_out(geo_city_out);
        ts::write_city_csv(f, ts::aggregate_by_city(points));
      }
    } else if (*cohort) {
      const ts::Corpus corpus = ts::ingest_corpus(cohort_in, ts::Provenance::event_related);
      std::vector<ts::CohortReport> reports;
      for (const auto& e : cohort_events) {
        const ts::EventSpec ev = parse_event(e);
        reports.push_back(ts::compare_means(ev.name, ts::label_windows(corpus, ev)));
      }
      const std::string out = cohort_out.empty() ? default_out("cohort.csv") : cohort_out;
      auto f = open_out(out);
      ts::write_cohort_csv(f, reports);
      std::cerr << "wrote " << reports.size() << " event comparisons to " << out << "\n";
    } else if (*report) {
      std::ifstream in(report_in);
      if (!in) throw ts::Error("cannot open cohort CSV '" + report_in + "'");
      const std::string out = report_out.empty() ? default_out("report.txt") : report_out;
      auto f = open_out(out);
      render_report(in, f);
      std::cerr << "wrote report to " << out << "\n";
    }
  } catch (const ts::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
