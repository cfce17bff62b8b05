#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tweetsent/error.hpp"
#include "tweetsent/features.hpp"
#include "tweetsent/rng.hpp"

namespace tweetsent {

// --- embeddings --------------------------------------------------------------

// Dense embedding table with two reserved rows: row 0 is OOV, row 1 is PAD.
// The PAD row is always zero; OOV is zero unless loaded from a file that
// provides it. Rows are frozen during training unless `trainable` is set.
struct EmbeddingMatrix {
  int dim = 0;
  int vocab_size = 0;  // without the 2 reserved rows
  std::vector<double> data;  // (vocab_size + kReservedIds) x dim, row-major
  bool trainable = false;

  int rows() const { return vocab_size + kReservedIds; }

  std::span<double> row(int r) {
    return {data.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
  std::span<const double> row(int r) const {
    return {data.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }

  static EmbeddingMatrix zeros(int vocab_size, int dim) {
    EmbeddingMatrix m;
    m.dim = dim;
    m.vocab_size = vocab_size;
    m.data.assign(static_cast<std::size_t>(m.rows()) * static_cast<std::size_t>(dim), 0.0);
    return m;
  }

  // Seeded Gaussian rows for every real token; OOV and PAD stay zero. The
  // default scale gives rows a norm comparable to published word vectors.
  static EmbeddingMatrix random(int vocab_size, int dim, std::uint64_t seed,
                                double scale = 0.5) {
    EmbeddingMatrix m = zeros(vocab_size, dim);
    Rng rng(derive_seed(seed, 0xe3b));
    for (int r = kReservedIds; r < m.rows(); ++r)
      for (double& v : m.row(r)) v = scale * rng.gaussian();
    return m;
  }
};

// Loads pretrained word vectors in the common plain-text format: one token
// per line followed by `dim` decimal floats. The dimension is inferred from
// the first line and enforced on every later line. Vocabulary tokens absent
// from the file keep zero rows.
inline EmbeddingMatrix load_embeddings(std::istream& in, const Vocabulary& vocab) {
  std::string line;
  EmbeddingMatrix m;
  std::size_t line_no = 0;
  int loaded = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t pos = line.find_first_of(" \t");
    if (pos == std::string::npos || pos == 0)
      throw Error("line " + std::to_string(line_no) + ": expected a token and values");
    const std::string token = line.substr(0, pos);
    std::vector<double> values;
    const char* p = line.c_str() + pos;
    const char* end = line.c_str() + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p >= end) break;
      char* after = nullptr;
      const double v = std::strtod(p, &after);
      if (after == p)
        throw Error("line " + std::to_string(line_no) + ": malformed value");
      values.push_back(v);
      p = after;
    }
    if (values.empty()) throw Error("line " + std::to_string(line_no) + ": no values");
    for (const double v : values)
      if (!std::isfinite(v))
        throw Error("line " + std::to_string(line_no) + ": non-finite value");
    if (m.dim == 0) {
      m = EmbeddingMatrix::zeros(vocab.size(), static_cast<int>(values.size()));
    } else if (static_cast<int>(values.size()) != m.dim) {
      throw Error("line " + std::to_string(line_no) + ": expected " + std::to_string(m.dim) +
                  " values, got " + std::to_string(values.size()));
    }
    const int id = vocab.id_of(token);
    if (id >= 0) {
      auto row = m.row(id + kReservedIds);
      std::copy(values.begin(), values.end(), row.begin());
      ++loaded;
    }
  }
  if (m.dim == 0) throw Error("embedding file is empty");
  (void)loaded;
  return m;
}

inline EmbeddingMatrix load_embeddings(const std::string& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embeddings file '" + path + "'");
  return load_embeddings(in, vocab);
}

// --- model -------------------------------------------------------------------

// Single-layer LSTM over embedded token ids, dropout on the final hidden
// state, dense ReLU layer, then a sigmoid output unit. Gate blocks are laid
// out input/forget/cell/output, each of height H.
struct RnnModel {
  EmbeddingMatrix embedding;
  int hidden_size = 0;
  int dense_size = 0;
  int max_len = 0;
  double dropout_rate = 0.0;

  std::vector<double> w_ih;  // [4H x dim]
  std::vector<double> w_hh;  // [4H x H]
  std::vector<double> b_h;   // [4H]
  std::vector<double> w1;    // [D x H]
  std::vector<double> b1;    // [D]
  std::vector<double> w2;    // [D]
  double b2 = 0.0;
};

// Named view of one parameter block; Adam and the gradient checker iterate
// blocks through this.
struct ParamView {
  const char* name;
  double* data;
  std::size_t size;
};

inline std::vector<ParamView> trainable_params(RnnModel& m) {
  std::vector<ParamView> v = {
      {"w_ih", m.w_ih.data(), m.w_ih.size()}, {"w_hh", m.w_hh.data(), m.w_hh.size()},
      {"b_h", m.b_h.data(), m.b_h.size()},    {"w1", m.w1.data(), m.w1.size()},
      {"b1", m.b1.data(), m.b1.size()},       {"w2", m.w2.data(), m.w2.size()},
      {"b2", &m.b2, 1},
  };
  if (m.embedding.trainable) v.push_back({"embedding", m.embedding.data.data(), m.embedding.data.size()});
  return v;
}

struct RnnGrads {
  std::vector<double> w_ih, w_hh, b_h, w1, b1, w2;
  double b2 = 0.0;
  std::vector<double> embedding;  // used only when the embedding is trainable

  static RnnGrads zeros_like(const RnnModel& m) {
    RnnGrads g;
    g.w_ih.assign(m.w_ih.size(), 0.0);
    g.w_hh.assign(m.w_hh.size(), 0.0);
    g.b_h.assign(m.b_h.size(), 0.0);
    g.w1.assign(m.w1.size(), 0.0);
    g.b1.assign(m.b1.size(), 0.0);
    g.w2.assign(m.w2.size(), 0.0);
    g.b2 = 0.0;
    if (m.embedding.trainable) g.embedding.assign(m.embedding.data.size(), 0.0);
    return g;
  }

};

inline std::vector<ParamView> grad_views(RnnGrads& g, bool with_embedding) {
  std::vector<ParamView> v = {
      {"w_ih", g.w_ih.data(), g.w_ih.size()}, {"w_hh", g.w_hh.data(), g.w_hh.size()},
      {"b_h", g.b_h.data(), g.b_h.size()},    {"w1", g.w1.data(), g.w1.size()},
      {"b1", g.b1.data(), g.b1.size()},       {"w2", g.w2.data(), g.w2.size()},
      {"b2", &g.b2, 1},
  };
  if (with_embedding) v.push_back({"embedding", g.embedding.data(), g.embedding.size()});
  return v;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Binary cross-entropy against a +-1 stance; probabilities are clamped to
// [1e-7, 1 - 1e-7] first.
inline double bce_loss(double p, int y) {
  const double pc = std::clamp(p, 1e-7, 1.0 - 1e-7);
  const double y01 = (y + 1) / 2;
  return -(y01 * std::log(pc) + (1.0 - y01) * std::log(1.0 - pc));
}

namespace detail {

struct RnnCache {
  std::vector<double> i, f, g, o;  // T x H, post-activation gate values
  std::vector<double> c, tc, h;    // T x H: cell state, tanh(cell), hidden
  std::vector<double> h_drop;      // H, final hidden after (optional) dropout
  std::vector<double> d1, a1;      // D: dense pre-activation and ReLU output
  double z2 = 0.0, p = 0.5;
};

// Forward pass. `drop_mask` (length H, inverted-dropout scaling baked in) is
// null in eval mode. The cache is required by the backward pass.
inline double rnn_forward_cached(const RnnModel& m, std::span<const int> ids,
                                 const double* drop_mask, RnnCache& cache) {
  const int H = m.hidden_size, D = m.dense_size, E = m.embedding.dim;
  const int T = static_cast<int>(ids.size());
  if (T < 1 || T != m.max_len)
    throw Error("sequence length " + std::to_string(T) + " does not match max_len " +
                std::to_string(m.max_len));
  for (const int id : ids)
    if (id < 0 || id >= m.embedding.rows())
      throw Error("token id " + std::to_string(id) + " out of range");

  const auto th = static_cast<std::size_t>(T) * static_cast<std::size_t>(H);
  cache.i.assign(th, 0.0);
  cache.f.assign(th, 0.0);
  cache.g.assign(th, 0.0);
  cache.o.assign(th, 0.0);
  cache.c.assign(th, 0.0);
  cache.tc.assign(th, 0.0);
  cache.h.assign(th, 0.0);

  std::vector<double> pre(static_cast<std::size_t>(4 * H));
  for (int t = 0; t < T; ++t) {
    const auto x = m.embedding.row(ids[static_cast<std::size_t>(t)]);
    const double* h_prev =
        t > 0 ? cache.h.data() + static_cast<std::size_t>(t - 1) * static_cast<std::size_t>(H)
              : nullptr;
    for (int j = 0; j < 4 * H; ++j) {
      double acc = m.b_h[static_cast<std::size_t>(j)];
      const double* wx = m.w_ih.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(E);
      for (int e = 0; e < E; ++e) acc += wx[e] * x[static_cast<std::size_t>(e)];
      if (h_prev) {
        const double* wh = m.w_hh.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(H);
        for (int k = 0; k < H; ++k) acc += wh[k] * h_prev[k];
      }
      pre[static_cast<std::size_t>(j)] = acc;
    }
    const std::size_t base = static_cast<std::size_t>(t) * static_cast<std::size_t>(H);
    for (int h = 0; h < H; ++h) {
      const auto hu = static_cast<std::size_t>(h);
      const double iv = sigmoid(pre[hu]);
      const double fv = sigmoid(pre[static_cast<std::size_t>(H) + hu]);
      const double gv = std::tanh(pre[2 * static_cast<std::size_t>(H) + hu]);
      const double ov = sigmoid(pre[3 * static_cast<std::size_t>(H) + hu]);
      const double c_prev = t > 0 ? cache.c[base - static_cast<std::size_t>(H) + hu] : 0.0;
      const double cv = fv * c_prev + iv * gv;
      const double tcv = std::tanh(cv);
      cache.i[base + hu] = iv;
      cache.f[base + hu] = fv;
      cache.g[base + hu] = gv;
      cache.o[base + hu] = ov;
      cache.c[base + hu] = cv;
      cache.tc[base + hu] = tcv;
      cache.h[base + hu] = ov * tcv;
    }
  }

  const std::size_t last = static_cast<std::size_t>(T - 1) * static_cast<std::size_t>(H);
  cache.h_drop.assign(static_cast<std::size_t>(H), 0.0);
  for (int h = 0; h < H; ++h) {
    const auto hu = static_cast<std::size_t>(h);
    cache.h_drop[hu] = cache.h[last + hu] * (drop_mask ? drop_mask[h] : 1.0);
  }

  cache.d1.assign(static_cast<std::size_t>(D), 0.0);
  cache.a1.assign(static_cast<std::size_t>(D), 0.0);
  for (int d = 0; d < D; ++d) {
    double acc = m.b1[static_cast<std::size_t>(d)];
    const double* w = m.w1.data() + static_cast<std::size_t>(d) * static_cast<std::size_t>(H);
    for (int h = 0; h < H; ++h) acc += w[h] * cache.h_drop[static_cast<std::size_t>(h)];
    cache.d1[static_cast<std::size_t>(d)] = acc;
    cache.a1[static_cast<std::size_t>(d)] = acc > 0.0 ? acc : 0.0;
  }
  double z2 = m.b2;
  for (int d = 0; d < D; ++d)
    z2 += m.w2[static_cast<std::size_t>(d)] * cache.a1[static_cast<std::size_t>(d)];
  cache.z2 = z2;
  cache.p = sigmoid(z2);
  return cache.p;
}

// Backpropagation through time. `dz2` is dLoss/dz2 for this example
// (already carrying any batch-mean scaling); gradients accumulate into `g`.
inline void rnn_backward(const RnnModel& m, std::span<const int> ids, const RnnCache& cache,
                         const double* drop_mask, double dz2, RnnGrads& g) {
  const int H = m.hidden_size, D = m.dense_size, E = m.embedding.dim;
  const int T = static_cast<int>(ids.size());

  // Output unit.
  g.b2 += dz2;
  std::vector<double> da1(static_cast<std::size_t>(D));
  for (int d = 0; d < D; ++d) {
    const auto du = static_cast<std::size_t>(d);
    g.w2[du] += dz2 * cache.a1[du];
    da1[du] = dz2 * m.w2[du];
  }

  // Dense ReLU layer.
  std::vector<double> dh_drop(static_cast<std::size_t>(H), 0.0);
  for (int d = 0; d < D; ++d) {
    const auto du = static_cast<std::size_t>(d);
    const double dd1 = cache.d1[du] > 0.0 ? da1[du] : 0.0;
    if (dd1 == 0.0) continue;
    g.b1[du] += dd1;
    double* w1g = g.w1.data() + du * static_cast<std::size_t>(H);
    const double* w1 = m.w1.data() + du * static_cast<std::size_t>(H);
    for (int h = 0; h < H; ++h) {
      w1g[h] += dd1 * cache.h_drop[static_cast<std::size_t>(h)];
      dh_drop[static_cast<std::size_t>(h)] += dd1 * w1[h];
    }
  }

  // Dropout on the final hidden state.
  std::vector<double> dh(static_cast<std::size_t>(H));
  for (int h = 0; h < H; ++h)
    dh[static_cast<std::size_t>(h)] =
        dh_drop[static_cast<std::size_t>(h)] * (drop_mask ? drop_mask[h] : 1.0);

  // Through time.
  std::vector<double> dc(static_cast<std::size_t>(H), 0.0);
  std::vector<double> dpre(static_cast<std::size_t>(4 * H));
  std::vector<double> dh_prev(static_cast<std::size_t>(H));
  for (int t = T - 1; t >= 0; --t) {
    const std::size_t base = static_cast<std::size_t>(t) * static_cast<std::size_t>(H);
    for (int h = 0; h < H; ++h) {
      const auto hu = static_cast<std::size_t>(h);
      const double iv = cache.i[base + hu], fv = cache.f[base + hu];
      const double gv = cache.g[base + hu], ov = cache.o[base + hu];
      const double tcv = cache.tc[base + hu];
      const double dhv = dh[hu];
      const double dov = dhv * tcv;
      double dcv = dc[hu] + dhv * ov * (1.0 - tcv * tcv);
      const double c_prev = t > 0 ? cache.c[base - static_cast<std::size_t>(H) + hu] : 0.0;
      const double div = dcv * gv;
      const double dgv = dcv * iv;
      const double dfv = dcv * c_prev;
      dc[hu] = dcv * fv;  // becomes dc for t-1
      dpre[hu] = div * iv * (1.0 - iv);
      dpre[static_cast<std::size_t>(H) + hu] = dfv * fv * (1.0 - fv);
      dpre[2 * static_cast<std::size_t>(H) + hu] = dgv * (1.0 - gv * gv);
      dpre[3 * static_cast<std::size_t>(H) + hu] = dov * ov * (1.0 - ov);
    }

    const auto x = m.embedding.row(ids[static_cast<std::size_t>(t)]);
    const double* h_prev =
        t > 0 ? cache.h.data() + base - static_cast<std::size_t>(H) : nullptr;
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    double* demb = nullptr;
    if (m.embedding.trainable)
      demb = g.embedding.data() + static_cast<std::size_t>(ids[static_cast<std::size_t>(t)]) *
                                      static_cast<std::size_t>(E);
    for (int j = 0; j < 4 * H; ++j) {
      const double dp = dpre[static_cast<std::size_t>(j)];
      if (dp == 0.0) continue;
      g.b_h[static_cast<std::size_t>(j)] += dp;
      double* wxg = g.w_ih.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(E);
      const double* wx = m.w_ih.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(E);
      for (int e = 0; e < E; ++e) {
        wxg[e] += dp * x[static_cast<std::size_t>(e)];
        if (demb) demb[e] += dp * wx[e];
      }
      if (h_prev) {
        double* whg = g.w_hh.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(H);
        const double* wh = m.w_hh.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(H);
        for (int k = 0; k < H; ++k) {
          whg[k] += dp * h_prev[k];
          dh_prev[static_cast<std::size_t>(k)] += dp * wh[k];
        }
      }
    }
    dh = dh_prev;
  }
}

// dLoss/dz2 for the clamped BCE: zero in the clamped flats, p - y' inside.
inline double bce_dz2(double p, int y) {
  if (p < 1e-7 || p > 1.0 - 1e-7) return 0.0;
  const double y01 = (y + 1) / 2;
  return p - y01;
}

}  // namespace detail

// Eval-mode forward pass: deterministic, dropout off.
inline double rnn_forward(const RnnModel& m, std::span<const int> ids) {
  detail::RnnCache cache;
  return detail::rnn_forward_cached(m, ids, nullptr, cache);
}

// Train-mode forward pass: inverted dropout on the final hidden state with a
// seeded mask.
inline double rnn_forward_train(const RnnModel& m, std::span<const int> ids, std::uint64_t seed) {
  detail::RnnCache cache;
  if (m.dropout_rate <= 0.0) return detail::rnn_forward_cached(m, ids, nullptr, cache);
  Rng rng(derive_seed(seed, 0xd309));
  const double keep = 1.0 - m.dropout_rate;
  std::vector<double> mask(static_cast<std::size_t>(m.hidden_size));
  for (double& v : mask) v = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
  return detail::rnn_forward_cached(m, ids, mask.data(), cache);
}

inline int predict(const RnnModel& m, std::span<const int> ids) {
  return rnn_forward(m, ids) >= 0.5 ? 1 : -1;
}

// --- Adam ---------------------------------------------------------------------

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moment accumulators shaped like the parameter blocks they
// update; all-zero at step 0.
struct AdamState {
  long step = 0;
  std::vector<std::vector<double>> m, v;
  AdamConfig cfg;

  static AdamState for_params(const std::vector<ParamView>& params, AdamConfig cfg = {}) {
    AdamState s;
    s.cfg = cfg;
    for (const auto& p : params) {
      s.m.emplace_back(p.size, 0.0);
      s.v.emplace_back(p.size, 0.0);
    }
    return s;
  }
};

// One Adam step over aligned parameter/gradient block lists:
//   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
//   param -= lr * m_hat / (sqrt(v_hat) + eps)   with bias-corrected moments.
inline void adam_update(const std::vector<ParamView>& params,
                        const std::vector<ParamView>& grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw Error("adam: mismatched parameter/gradient/state block counts");
  ++state.step;
  const double b1 = state.cfg.beta1, b2 = state.cfg.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t blk = 0; blk < params.size(); ++blk) {
    if (params[blk].size != grads[blk].size || params[blk].size != state.m[blk].size())
      throw Error(std::string("adam: shape mismatch in block '") + params[blk].name + "'");
    double* p = params[blk].data;
    const double* g = grads[blk].data;
    double* mm = state.m[blk].data();
    double* vv = state.v[blk].data();
    for (std::size_t i = 0; i < params[blk].size; ++i) {
      if (!std::isfinite(g[i]))
        throw Error(std::string("adam: non-finite gradient in block '") + params[blk].name + "'");
      mm[i] = b1 * mm[i] + (1.0 - b1) * g[i];
      vv[i] = b2 * vv[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = mm[i] / corr1;
      const double v_hat = vv[i] / corr2;
      p[i] -= state.cfg.lr * m_hat / (std::sqrt(v_hat) + state.cfg.epsilon);
    }
  }
}

// --- gradient check ------------------------------------------------------------

struct SequenceExample {
  std::vector<int> ids;  // encoded, length = model max_len
  int label = 1;         // -1 or +1
};

namespace detail {

inline double batch_mean_loss(const RnnModel& m, const std::vector<SequenceExample>& batch) {
  double total = 0.0;
  RnnCache cache;
  for (const auto& ex : batch)
    total += bce_loss(rnn_forward_cached(m, ex.ids, nullptr, cache), ex.label);
  return total / static_cast<double>(batch.size());
}

inline RnnGrads batch_gradients(const RnnModel& m, const std::vector<SequenceExample>& batch,
                                const std::vector<const double*>& masks, double* loss_out) {
  RnnGrads g = RnnGrads::zeros_like(m);
  RnnCache cache;
  double total = 0.0;
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double* mask = masks.empty() ? nullptr : masks[i];
    const double p = rnn_forward_cached(m, batch[i].ids, mask, cache);
    total += bce_loss(p, batch[i].label);
    rnn_backward(m, batch[i].ids, cache, mask, bce_dz2(p, batch[i].label) * inv_b, g);
  }
  if (loss_out) *loss_out = total * inv_b;
  return g;
}

}  // namespace detail

// Compares analytic BPTT gradients of the batch-mean BCE against central
// finite differences over every trainable coordinate (or a seeded sample of
// `max_coords_per_block` when positive). Dropout is off. Returns the max
// relative error |g_a - g_n| / max(|g_a| + |g_n|, 1e-12).
inline double gradient_check(RnnModel& model, const std::vector<SequenceExample>& batch,
                             double epsilon = 1e-5, int max_coords_per_block = 0,
                             std::uint64_t seed = 0) {
  if (batch.empty()) throw Error("gradient_check: empty batch");
  RnnGrads analytic = detail::batch_gradients(model, batch, {}, nullptr);
  const auto params = trainable_params(model);
  const auto grads = grad_views(analytic, model.embedding.trainable);

  Rng rng(derive_seed(seed, 0x9cc));
  double max_rel = 0.0;
  for (std::size_t blk = 0; blk < params.size(); ++blk) {
    std::vector<std::size_t> coords;
    if (max_coords_per_block > 0 &&
        params[blk].size > static_cast<std::size_t>(max_coords_per_block)) {
      for (int s = 0; s < max_coords_per_block; ++s) coords.push_back(rng.below(params[blk].size));
    } else {
      coords.resize(params[blk].size);
      std::iota(coords.begin(), coords.end(), 0);
    }
    for (const std::size_t i : coords) {
      double* p = params[blk].data + i;
      const double saved = *p;
      *p = saved + epsilon;
      const double up = detail::batch_mean_loss(model, batch);
      *p = saved - epsilon;
      const double down = detail::batch_mean_loss(model, batch);
      *p = saved;
      const double g_n = (up - down) / (2.0 * epsilon);
      const double g_a = grads[blk].data[i];
      const double rel = std::fabs(g_a - g_n) / std::max(std::fabs(g_a) + std::fabs(g_n), 1e-12);
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

// --- training -------------------------------------------------------------------

struct RnnTrainConfig {
  int hidden_size = 128;
  int dense_size = 64;
  int max_len = 50;
  double dropout_rate = 0.5;
  int batch_size = 32;
  int epochs = 5;
  double init_scale = 0.08;
  AdamConfig adam;
};

struct TrainHistory {
  std::vector<double> train_loss;    // mean BCE per epoch
  std::vector<double> val_accuracy;  // per epoch

  bool operator==(const TrainHistory&) const = default;
};

// Fresh model with uniform [-init_scale, init_scale] parameters everywhere
// except the embedding, which is adopted as-is.
inline RnnModel init_rnn_model(EmbeddingMatrix embedding, int hidden_size, int dense_size,
                               int max_len, double dropout_rate, std::uint64_t seed,
                               double init_scale = 0.08) {
  if (dropout_rate < 0.0 || dropout_rate >= 1.0)
    throw Error("rnn: dropout_rate must be in [0, 1)");
  if (hidden_size < 1 || dense_size < 1 || max_len < 1)
    throw Error("rnn: hidden_size, dense_size, and max_len must be >= 1");
  RnnModel model;
  model.embedding = std::move(embedding);
  model.hidden_size = hidden_size;
  model.dense_size = dense_size;
  model.max_len = max_len;
  model.dropout_rate = dropout_rate;
  const int H = hidden_size, D = dense_size, E = model.embedding.dim;
  model.w_ih.resize(static_cast<std::size_t>(4 * H) * static_cast<std::size_t>(E));
  model.w_hh.resize(static_cast<std::size_t>(4 * H) * static_cast<std::size_t>(H));
  model.b_h.resize(static_cast<std::size_t>(4 * H));
  model.w1.resize(static_cast<std::size_t>(D) * static_cast<std::size_t>(H));
  model.b1.resize(static_cast<std::size_t>(D));
  model.w2.resize(static_cast<std::size_t>(D));
  Rng init_rng(derive_seed(seed, 0x1417));
  for (auto* blk : {&model.w_ih, &model.w_hh, &model.b_h, &model.w1, &model.b1, &model.w2})
    for (double& w : *blk) w = init_rng.uniform(-init_scale, init_scale);
  model.b2 = init_rng.uniform(-init_scale, init_scale);
  return model;
}

// Trains the LSTM classifier with Adam on batch-mean BCE. Embeddings are
// frozen (unless flagged trainable), all other parameters start uniform in
// [-init_scale, init_scale], minibatch order and dropout masks are seeded,
// so the run is a deterministic function of (data, config, seed).
inline std::pair<RnnModel, TrainHistory> train_rnn(const std::vector<SequenceExample>& train,
                                                   const std::vector<SequenceExample>& val,
                                                   EmbeddingMatrix embedding,
                                                   const RnnTrainConfig& cfg,
                                                   std::uint64_t seed) {
  if (train.empty()) throw Error("train_rnn: empty training set");
  bool has_pos = false, has_neg = false;
  for (const auto& ex : train) (ex.label > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw Error("train_rnn: training data must contain both classes");

  RnnModel model = init_rnn_model(std::move(embedding), cfg.hidden_size, cfg.dense_size,
                                  cfg.max_len, cfg.dropout_rate, seed, cfg.init_scale);
  const int H = cfg.hidden_size;

  auto params = trainable_params(model);
  AdamState adam = AdamState::for_params(params, cfg.adam);

  TrainHistory history;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const double keep = 1.0 - cfg.dropout_rate;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(seed, 0xe90c + static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);
    double epoch_loss_sum = 0.0;

    const std::size_t n_batches =
        (train.size() + static_cast<std::size_t>(cfg.batch_size) - 1) /
        static_cast<std::size_t>(cfg.batch_size);
    for (std::size_t b = 0; b < n_batches; ++b) {
      const std::size_t lo = b * static_cast<std::size_t>(cfg.batch_size);
      const std::size_t hi = std::min(train.size(), lo + static_cast<std::size_t>(cfg.batch_size));
      std::vector<SequenceExample> batch;
      batch.reserve(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) batch.push_back(train[order[i]]);

      std::vector<std::vector<double>> mask_store;
      std::vector<const double*> masks;
      if (cfg.dropout_rate > 0.0) {
        Rng drop_rng(derive_seed(seed, 0xd0000000ULL +
                                           static_cast<std::uint64_t>(epoch) * 1000003ULL +
                                           static_cast<std::uint64_t>(b)));
        mask_store.resize(batch.size(), std::vector<double>(static_cast<std::size_t>(H)));
        for (auto& mask : mask_store)
          for (double& v : mask) v = drop_rng.bernoulli(keep) ? 1.0 / keep : 0.0;
        for (const auto& mask : mask_store) masks.push_back(mask.data());
      }

      double batch_loss = 0.0;
      RnnGrads grads = detail::batch_gradients(model, batch, masks, &batch_loss);
      if (!std::isfinite(batch_loss))
        throw Error("train_rnn: non-finite loss at epoch " + std::to_string(epoch + 1) +
                    ", batch " + std::to_string(b + 1));
      if (model.embedding.trainable) {
        // The reserved OOV and PAD rows never train.
        const auto E = static_cast<std::size_t>(model.embedding.dim);
        std::fill_n(grads.embedding.begin() + kOovId * E, E, 0.0);
        std::fill_n(grads.embedding.begin() + kPadId * E, E, 0.0);
      }
      epoch_loss_sum += batch_loss * static_cast<double>(batch.size());
      try {
        adam_update(params, grad_views(grads, model.embedding.trainable), adam);
      } catch (const Error& e) {
        throw Error("train_rnn: epoch " + std::to_string(epoch + 1) + ", batch " +
                    std::to_string(b + 1) + ": " + e.what());
      }
    }

    history.train_loss.push_back(epoch_loss_sum / static_cast<double>(train.size()));
    long correct = 0;
    for (const auto& ex : val)
      if (predict(model, ex.ids) == ex.label) ++correct;
    history.val_accuracy.push_back(
        val.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(val.size()));
  }
  return {std::move(model), std::move(history)};
}

// --- checkpointing ----------------------------------------------------------------

inline nlohmann::ordered_json rnn_to_json(const RnnModel& m) {
  nlohmann::ordered_json obj;
  obj["hidden_size"] = m.hidden_size;
  obj["dense_size"] = m.dense_size;
  obj["max_len"] = m.max_len;
  obj["dropout_rate"] = m.dropout_rate;
  obj["embedding"] = {{"dim", m.embedding.dim},
                      {"vocab_size", m.embedding.vocab_size},
                      {"trainable", m.embedding.trainable},
                      {"data", m.embedding.data}};
  obj["w_ih"] = m.w_ih;
  obj["w_hh"] = m.w_hh;
  obj["b_h"] = m.b_h;
  obj["w1"] = m.w1;
  obj["b1"] = m.b1;
  obj["w2"] = m.w2;
  obj["b2"] = m.b2;
  return obj;
}

inline RnnModel rnn_from_json(const nlohmann::json& obj) {
  RnnModel m;
  m.hidden_size = obj.at("hidden_size").get<int>();
  m.dense_size = obj.at("dense_size").get<int>();
  m.max_len = obj.at("max_len").get<int>();
  m.dropout_rate = obj.at("dropout_rate").get<double>();
  const auto& emb = obj.at("embedding");
  m.embedding.dim = emb.at("dim").get<int>();
  m.embedding.vocab_size = emb.at("vocab_size").get<int>();
  m.embedding.trainable = emb.at("trainable").get<bool>();
  m.embedding.data = emb.at("data").get<std::vector<double>>();
  m.w_ih = obj.at("w_ih").get<std::vector<double>>();
  m.w_hh = obj.at("w_hh").get<std::vector<double>>();
  m.b_h = obj.at("b_h").get<std::vector<double>>();
  m.w1 = obj.at("w1").get<std::vector<double>>();
  m.b1 = obj.at("b1").get<std::vector<double>>();
  m.w2 = obj.at("w2").get<std::vector<double>>();
  m.b2 = obj.at("b2").get<double>();
  return m;
}

}  // namespace tweetsent
