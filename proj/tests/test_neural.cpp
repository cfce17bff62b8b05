#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "tweetsent/corpus.hpp"
#include "tweetsent/neural.hpp"

using namespace tweetsent;

namespace {

// init_scale 0.8 keeps every nonzero gradient coordinate well above the
// central-difference noise floor; the training default (0.08) leaves deep
// recurrent paths near 1e-10 where finite differences cannot resolve them.
RnnModel small_model(std::uint64_t seed, int vocab = 10, int E = 8, int H = 8, int D = 4,
                     int T = 6, double dropout = 0.0, bool trainable_emb = false) {
  EmbeddingMatrix emb = EmbeddingMatrix::random(vocab, E, seed + 1, 0.5);
  emb.trainable = trainable_emb;
  return init_rnn_model(std::move(emb), H, D, T, dropout, seed, 0.8);
}

std::vector<SequenceExample> random_batch(const RnnModel& m, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SequenceExample> batch;
  for (int i = 0; i < n; ++i) {
    SequenceExample ex;
    for (int t = 0; t < m.max_len; ++t)
      ex.ids.push_back(static_cast<int>(rng.below(static_cast<std::size_t>(m.embedding.rows()))));
    ex.label = rng.bernoulli(0.5) ? 1 : -1;
    batch.push_back(std::move(ex));
  }
  return batch;
}

}  // namespace

TEST_CASE("bce reference values", "[neural]") {
  REQUIRE(bce_loss(0.5, 1) == Catch::Approx(std::log(2.0)).epsilon(1e-12));
  REQUIRE(bce_loss(0.5, -1) == Catch::Approx(std::log(2.0)).epsilon(1e-12));
  REQUIRE(bce_loss(1.0 - 1e-7, 1) == Catch::Approx(1e-7).margin(1e-9));
  REQUIRE(bce_loss(1e-7, -1) == Catch::Approx(1e-7).margin(1e-9));
  // Clamping keeps the loss finite at the extremes.
  REQUIRE(std::isfinite(bce_loss(0.0, 1)));
  REQUIRE(std::isfinite(bce_loss(1.0, -1)));
  REQUIRE(bce_loss(0.9, 1) >= 0.0);
}

TEST_CASE("adam first step moves by about -lr for positive gradient", "[neural]") {
  double param = 0.0;
  double grad = 0.5;
  std::vector<ParamView> params = {{"x", &param, 1}};
  std::vector<ParamView> grads = {{"x", &grad, 1}};
  AdamState state = AdamState::for_params(params);
  adam_update(params, grads, state);
  // m_hat = g, v_hat = g^2, so the step is -lr * g/(|g| + eps) ~ -lr.
  REQUIRE(param == Catch::Approx(-1e-3).margin(1e-10));
  REQUIRE(state.step == 1);
}

TEST_CASE("adam with zero gradient does not move", "[neural]") {
  double param = 0.7;
  double grad = 0.0;
  std::vector<ParamView> params = {{"x", &param, 1}};
  std::vector<ParamView> grads = {{"x", &grad, 1}};
  AdamState state = AdamState::for_params(params);
  adam_update(params, grads, state);
  REQUIRE(param == 0.7);
}

TEST_CASE("adam matches an independent 100-step recomputation", "[neural]") {
  double param = 0.3;
  std::vector<ParamView> params = {{"x", &param, 1}};
  AdamState state = AdamState::for_params(params);

  // Oracle: re-derive the trajectory step by step from the update rule.
  double oracle = 0.3, om = 0.0, ov = 0.0;
  const double lr = state.cfg.lr, b1 = state.cfg.beta1, b2 = state.cfg.beta2,
               eps = state.cfg.epsilon;
  for (int step = 1; step <= 100; ++step) {
    const double g = 1.0;
    double grad = g;
    std::vector<ParamView> grads = {{"x", &grad, 1}};
    adam_update(params, grads, state);

    om = b1 * om + (1.0 - b1) * g;
    ov = b2 * ov + (1.0 - b2) * g * g;
    const double mh = om / (1.0 - std::pow(b1, step));
    const double vh = ov / (1.0 - std::pow(b2, step));
    oracle -= lr * mh / (std::sqrt(vh) + eps);
    REQUIRE(param == Catch::Approx(oracle).margin(1e-12));
  }
}

TEST_CASE("adam with lr = 0 leaves parameters unchanged", "[neural]") {
  RnnModel m = small_model(5);
  const RnnModel before = m;
  auto params = trainable_params(m);
  AdamConfig cfg;
  cfg.lr = 0.0;
  AdamState state = AdamState::for_params(params, cfg);
  RnnGrads g = RnnGrads::zeros_like(m);
  for (double& v : g.w_ih) v = 1.0;
  for (double& v : g.w2) v = -2.0;
  g.b2 = 3.0;
  adam_update(params, grad_views(g, false), state);
  REQUIRE(m.w_ih == before.w_ih);
  REQUIRE(m.w2 == before.w2);
  REQUIRE(m.b2 == before.b2);
}

TEST_CASE("adam rejects non-finite gradients naming the block", "[neural]") {
  double param = 0.0;
  double grad = std::numeric_limits<double>::quiet_NaN();
  std::vector<ParamView> params = {{"w_hh", &param, 1}};
  std::vector<ParamView> grads = {{"w_hh", &grad, 1}};
  AdamState state = AdamState::for_params(params);
  REQUIRE_THROWS_WITH(adam_update(params, grads, state),
                      Catch::Matchers::ContainsSubstring("w_hh"));
}

TEST_CASE("all-zero parameters output exactly one half", "[neural]") {
  RnnModel m = small_model(3);
  for (auto* blk : {&m.w_ih, &m.w_hh, &m.b_h, &m.w1, &m.b1, &m.w2})
    for (double& v : *blk) v = 0.0;
  m.b2 = 0.0;
  for (double& v : m.embedding.data) v = 0.0;
  const std::vector<int> ids(static_cast<std::size_t>(m.max_len), kPadId);
  REQUIRE(rnn_forward(m, ids) == 0.5);
}

TEST_CASE("forward output is strictly inside (0, 1) and deterministic", "[neural]") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RnnModel m = small_model(seed);
    for (const auto& ex : random_batch(m, 10, seed + 50)) {
      const double p = rnn_forward(m, ex.ids);
      REQUIRE(p > 0.0);
      REQUIRE(p < 1.0);
      REQUIRE(rnn_forward(m, ex.ids) == p);
    }
  }
}

TEST_CASE("sequence length and id range are validated", "[neural]") {
  RnnModel m = small_model(2);
  std::vector<int> short_ids(3, kPadId);
  REQUIRE_THROWS_AS(rnn_forward(m, short_ids), Error);
  std::vector<int> bad_ids(static_cast<std::size_t>(m.max_len), kPadId);
  bad_ids[0] = m.embedding.rows();
  REQUIRE_THROWS_AS(rnn_forward(m, bad_ids), Error);
}

TEST_CASE("eval predictions are independent of dropout rate", "[neural]") {
  RnnModel m = small_model(4);
  const auto batch = random_batch(m, 6, 77);
  std::vector<double> probs;
  for (const auto& ex : batch) probs.push_back(rnn_forward(m, ex.ids));
  m.dropout_rate = 0.9;
  for (std::size_t i = 0; i < batch.size(); ++i)
    REQUIRE(rnn_forward(m, batch[i].ids) == probs[i]);
}

TEST_CASE("train-mode dropout is seeded and differs from eval", "[neural]") {
  RnnModel m = small_model(6, 10, 8, 8, 4, 6, 0.5);
  const auto batch = random_batch(m, 1, 3);
  const double a = rnn_forward_train(m, batch[0].ids, 11);
  const double b = rnn_forward_train(m, batch[0].ids, 11);
  REQUIRE(a == b);
  const double c = rnn_forward_train(m, batch[0].ids, 12);
  const double eval_p = rnn_forward(m, batch[0].ids);
  // With rate 0.5 on 8 units a different mask almost surely changes the output.
  REQUIRE((c != a || eval_p != a));
}

TEST_CASE("gradient check passes on the small configuration across seeds", "[neural]") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RnnModel m = small_model(seed);
    const auto batch = random_batch(m, 4, seed + 1000);
    const double err = gradient_check(m, batch, 1e-5);
    INFO("seed " << seed);
    REQUIRE(err < 1e-4);
  }
}

TEST_CASE("gradient check covers trainable embeddings", "[neural]") {
  RnnModel m = small_model(9, 6, 6, 6, 3, 5, 0.0, true);
  const auto batch = random_batch(m, 3, 99);
  REQUIRE(gradient_check(m, batch, 1e-5) < 1e-4);
}

TEST_CASE("gradient check is defined at a stationary point", "[neural]") {
  // All-zero parameters and embeddings with a +1/-1 pair on identical ids:
  // every analytic gradient cancels exactly and the loss sits at the BCE
  // minimum in every direction, so the floor in the denominator keeps the
  // relative error at zero instead of 0/0.
  RnnModel m = small_model(1);
  for (auto* blk : {&m.w_ih, &m.w_hh, &m.b_h, &m.w1, &m.b1, &m.w2})
    for (double& v : *blk) v = 0.0;
  m.b2 = 0.0;
  for (double& v : m.embedding.data) v = 0.0;
  std::vector<SequenceExample> batch = {{{2, 3, 4, 5, 2, 3}, 1}, {{2, 3, 4, 5, 2, 3}, -1}};
  const RnnGrads g = detail::batch_gradients(m, batch, {}, nullptr);
  for (const double v : g.w_ih) REQUIRE(v == 0.0);
  REQUIRE(g.b2 == 0.0);
  REQUIRE(gradient_check(m, batch, 1e-5) <= 1e-4);
}

TEST_CASE("coordinate sampling gives the same verdict", "[neural]") {
  RnnModel m = small_model(12);
  const auto batch = random_batch(m, 4, 4);
  const double full = gradient_check(m, batch, 1e-5);
  const double sampled_a = gradient_check(m, batch, 1e-5, 40, 1);
  const double sampled_b = gradient_check(m, batch, 1e-5, 40, 2);
  REQUIRE((full < 1e-4) == (sampled_a < 1e-4));
  REQUIRE((sampled_a < 1e-4) == (sampled_b < 1e-4));
}

namespace {

// Desk-scale separable corpus encoded for the RNN.
struct RnnData {
  std::vector<SequenceExample> train, val;
  Vocabulary vocab;
};

RnnData make_rnn_data(int n_tweets, double noise, std::uint64_t seed, int max_len) {
  SyntheticConfig cfg;
  cfg.n_tweets = n_tweets;
  cfg.label_noise = noise;
  cfg.class_token_prob = 0.7;
  cfg.tokens_min = 4;
  cfg.tokens_max = 9;
  cfg.seed = seed;
  const Corpus corpus = generate_synthetic(cfg).corpus;
  const auto [train_c, val_c] = split_train_val(corpus, 0.9, seed);

  RnnData data;
  std::vector<TokenSeq> docs;
  for (const auto& r : train_c.records) docs.push_back(tokenize(r.text));
  data.vocab = build_vocab(docs, {VocabKind::token_id, 1});
  for (std::size_t i = 0; i < docs.size(); ++i)
    data.train.push_back({encode_sequence(docs[i], data.vocab, max_len), *train_c.records[i].label});
  for (const auto& r : val_c.records)
    data.val.push_back({encode_sequence(tokenize(r.text), data.vocab, max_len), *r.label});
  return data;
}

}  // namespace

TEST_CASE("training learns a separable corpus at desk scale", "[neural][slow]") {
  const RnnData data = make_rnn_data(600, 0.0, 31, 12);
  RnnTrainConfig cfg;
  cfg.hidden_size = 24;
  cfg.dense_size = 12;
  cfg.max_len = 12;
  cfg.dropout_rate = 0.2;
  cfg.batch_size = 16;
  cfg.epochs = 5;
  cfg.adam.lr = 1e-2;
  const EmbeddingMatrix emb = EmbeddingMatrix::random(data.vocab.size(), 16, 8, 1.0);
  const auto [model, history] = train_rnn(data.train, data.val, emb, cfg, 13);

  REQUIRE(history.train_loss.size() == 5);
  REQUIRE(history.train_loss[0] < std::log(2.0) + 0.05);
  REQUIRE(history.train_loss[4] < history.train_loss[0]);
  REQUIRE(history.val_accuracy[4] >= 0.90);
}

TEST_CASE("training history is deterministic per seed", "[neural][slow]") {
  const RnnData data = make_rnn_data(120, 0.05, 17, 8);
  RnnTrainConfig cfg;
  cfg.hidden_size = 8;
  cfg.dense_size = 4;
  cfg.max_len = 8;
  cfg.dropout_rate = 0.3;
  cfg.batch_size = 16;
  cfg.epochs = 2;
  const EmbeddingMatrix emb = EmbeddingMatrix::random(data.vocab.size(), 8, 5);
  const auto [m1, h1] = train_rnn(data.train, data.val, emb, cfg, 3);
  const auto [m2, h2] = train_rnn(data.train, data.val, emb, cfg, 3);
  REQUIRE(h1 == h2);
  REQUIRE(m1.w_hh == m2.w_hh);
  const auto [m3, h3] = train_rnn(data.train, data.val, emb, cfg, 4);
  REQUIRE(h1 != h3);
}

TEST_CASE("embeddings stay frozen through training", "[neural][slow]") {
  const RnnData data = make_rnn_data(120, 0.0, 23, 8);
  RnnTrainConfig cfg;
  cfg.hidden_size = 8;
  cfg.dense_size = 4;
  cfg.max_len = 8;
  cfg.batch_size = 16;
  cfg.epochs = 2;
  const EmbeddingMatrix emb = EmbeddingMatrix::random(data.vocab.size(), 8, 6);
  const std::vector<double> before = emb.data;
  const auto [model, history] = train_rnn(data.train, data.val, emb, cfg, 1);
  REQUIRE(model.embedding.data == before);
}

TEST_CASE("divergence reports epoch and batch", "[neural]") {
  const RnnData data = make_rnn_data(60, 0.0, 3, 6);
  RnnTrainConfig cfg;
  cfg.hidden_size = 4;
  cfg.dense_size = 4;
  cfg.max_len = 6;
  cfg.batch_size = 8;
  cfg.epochs = 1;
  EmbeddingMatrix emb = EmbeddingMatrix::random(data.vocab.size(), 4, 2);
  for (double& v : emb.data) v = std::numeric_limits<double>::infinity();
  REQUIRE_THROWS_WITH(train_rnn(data.train, data.val, emb, cfg, 1),
                      Catch::Matchers::ContainsSubstring("epoch 1"));
}

TEST_CASE("single-class training data is rejected", "[neural]") {
  std::vector<SequenceExample> train = {{{1, 1, 2}, 1}, {{1, 1, 3}, 1}};
  RnnTrainConfig cfg;
  cfg.max_len = 3;
  REQUIRE_THROWS_AS(train_rnn(train, {}, EmbeddingMatrix::random(4, 4, 1), cfg, 0), Error);
}

TEST_CASE("checkpoint round trip reproduces outputs bit for bit", "[neural]") {
  RnnModel m = small_model(21);
  const auto batch = random_batch(m, 5, 8);
  const nlohmann::json j = nlohmann::json::parse(rnn_to_json(m).dump());
  const RnnModel back = rnn_from_json(j);
  for (const auto& ex : batch) REQUIRE(rnn_forward(back, ex.ids) == rnn_forward(m, ex.ids));
}

TEST_CASE("embedding loader copies rows and infers the dimension", "[neural]") {
  const std::vector<TokenSeq> docs = {{"hello", "there"}, {"hello"}};
  const Vocabulary vocab = build_vocab(docs, {VocabKind::token_id, 1});
  std::istringstream file("hello 0.1 0.2\nmissing 0.9 0.9\n");
  const EmbeddingMatrix m = load_embeddings(file, vocab);
  REQUIRE(m.dim == 2);
  const auto row = m.row(vocab.index.at("hello") + kReservedIds);
  REQUIRE(row[0] == 0.1);
  REQUIRE(row[1] == 0.2);
  // "there" is absent from the file: zero row. PAD and OOV rows are zero.
  for (const int r : {vocab.index.at("there") + kReservedIds, kPadId, kOovId})
    for (const double v : m.row(r)) REQUIRE(v == 0.0);
}

TEST_CASE("embedding loader rejects dimension drift and empty files", "[neural]") {
  const Vocabulary vocab = build_vocab({TokenSeq{"a"}}, {VocabKind::token_id, 1});
  std::istringstream bad("a 0.1 0.2\nb 0.1 0.2 0.3\n");
  REQUIRE_THROWS_WITH(load_embeddings(bad, vocab),
                      Catch::Matchers::ContainsSubstring("line 2: expected 2 values"));
  std::istringstream empty("");
  REQUIRE_THROWS_AS(load_embeddings(empty, vocab), Error);
  std::istringstream garbage("a x y\n");
  REQUIRE_THROWS_AS(load_embeddings(garbage, vocab), Error);
}
