#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tweetsent/error.hpp"

namespace tweetsent {

using TokenSeq = std::vector<std::string>;

namespace detail {

// Bytes >= 0x80 are treated as word characters so multi-byte UTF-8 sequences
// survive tokenization intact; only ASCII is case-folded.
inline bool is_word_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '\'' || c >= 0x80;
}

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline bool starts_with_nocase(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (ascii_lower(s[i]) != prefix[i]) return false;
  return true;
}

inline void split_word_chars(std::string_view chunk, TokenSeq& out) {
  std::string token;
  for (char c : chunk) {
    if (is_word_char(static_cast<unsigned char>(c))) {
      token.push_back(ascii_lower(c));
    } else if (!token.empty()) {
      out.push_back(std::move(token));
      token.clear();
    }
  }
  if (!token.empty()) out.push_back(std::move(token));
}

}  // namespace detail

// Tweet tokenizer: lowercase, URLs -> "<url>", @mentions -> "<user>",
// hashtags keep their tag text, everything else split on characters that are
// not letters, digits, or apostrophes.
inline TokenSeq tokenize(std::string_view text) {
  TokenSeq tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && detail::is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !detail::is_space(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::string_view chunk = text.substr(i, j - i);
      if (detail::starts_with_nocase(chunk, "http://") ||
          detail::starts_with_nocase(chunk, "https://") ||
          detail::starts_with_nocase(chunk, "www.")) {
        tokens.emplace_back("<url>");
      } else if (chunk.size() > 1 && chunk.front() == '@') {
        tokens.emplace_back("<user>");
      } else {
        if (!chunk.empty() && chunk.front() == '#') chunk.remove_prefix(1);
        detail::split_word_chars(chunk, tokens);
      }
    }
    i = j;
  }
  return tokens;
}

// Lowercased text with whitespace collapsed to single spaces and the ends
// trimmed; the character n-gram extractors slide over this form.
inline std::string normalize_chars(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (detail::is_space(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(detail::ascii_lower(c));
  }
  return out;
}

enum class VocabKind { word_ngram, char_ngram, token_id };

struct VocabMode {
  VocabKind kind = VocabKind::word_ngram;
  int n = 1;  // n-gram width; 1 for token_id

  bool operator==(const VocabMode&) const = default;
};

// Term -> dense id map with document frequencies. Ids are assigned by
// descending document frequency, ties broken lexicographically, so the
// vocabulary is a deterministic function of the document multiset.
struct Vocabulary {
  std::map<std::string, int> index;
  std::map<std::string, int> doc_freq;
  int n_docs = 0;
  VocabMode mode;

  int size() const { return static_cast<int>(index.size()); }

  int id_of(const std::string& term) const {
    const auto it = index.find(term);
    return it == index.end() ? -1 : it->second;
  }

  bool operator==(const Vocabulary&) const = default;
};

// Sparse feature vector keyed by feature id. Zero weights are never stored.
struct SparseVector {
  std::map<int, double> entries;

  void add(int id, double w) {
    if (w == 0.0) return;
    const auto [it, inserted] = entries.emplace(id, w);
    if (!inserted) {
      it->second += w;
      if (it->second == 0.0) entries.erase(it);
    }
  }

  double at(int id) const {
    const auto it = entries.find(id);
    return it == entries.end() ? 0.0 : it->second;
  }

  double l2_norm() const {
    double s = 0.0;
    for (const auto& [_, w] : entries) s += w * w;
    return std::sqrt(s);
  }

  bool operator==(const SparseVector&) const = default;
};

namespace detail {

inline std::vector<std::string> doc_terms(const TokenSeq& tokens, const VocabMode& mode) {
  std::vector<std::string> terms;
  if (mode.kind == VocabKind::token_id || (mode.kind == VocabKind::word_ngram && mode.n == 1)) {
    terms = tokens;
    return terms;
  }
  if (mode.kind != VocabKind::word_ngram)
    throw Error("token documents require a word_ngram or token_id vocabulary");
  const int n = mode.n;
  if (static_cast<int>(tokens.size()) < n) return terms;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string term = tokens[i];
    for (int k = 1; k < n; ++k) {
      term.push_back(' ');
      term += tokens[i + k];
    }
    terms.push_back(std::move(term));
  }
  return terms;
}

inline std::vector<std::string> doc_terms_chars(std::string_view text, int n) {
  std::vector<std::string> terms;
  const std::string norm = normalize_chars(text);
  if (static_cast<int>(norm.size()) < n) return terms;
  for (std::size_t i = 0; i + n <= norm.size(); ++i)
    terms.push_back(norm.substr(i, static_cast<std::size_t>(n)));
  return terms;
}

inline Vocabulary vocab_from_term_docs(const std::vector<std::vector<std::string>>& docs,
                                       const VocabMode& mode, int min_df) {
  Vocabulary vocab;
  vocab.mode = mode;
  vocab.n_docs = static_cast<int>(docs.size());
  std::map<std::string, int> df;
  for (const auto& terms : docs) {
    std::map<std::string, bool> seen;
    for (const auto& t : terms)
      if (!seen.count(t)) {
        seen[t] = true;
        ++df[t];
      }
  }
  std::vector<std::pair<std::string, int>> kept;
  for (const auto& [term, count] : df)
    if (count >= min_df) kept.emplace_back(term, count);
  if (kept.empty()) throw Error("vocabulary is empty (min_df too high or no documents)");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (std::size_t i = 0; i < kept.size(); ++i) {
    vocab.index[kept[i].first] = static_cast<int>(i);
    vocab.doc_freq[kept[i].first] = kept[i].second;
  }
  return vocab;
}

}  // namespace detail

// Word n-gram / token-id vocabulary over tokenized documents.
inline Vocabulary build_vocab(const std::vector<TokenSeq>& docs, VocabMode mode, int min_df = 1) {
  if (docs.empty()) throw Error("build_vocab: no documents");
  if (mode.kind == VocabKind::char_ngram)
    throw Error("char_ngram vocabulary must be built from raw texts");
  std::vector<std::vector<std::string>> term_docs;
  term_docs.reserve(docs.size());
  for (const auto& d : docs) term_docs.push_back(detail::doc_terms(d, mode));
  return detail::vocab_from_term_docs(term_docs, mode, min_df);
}

// Character n-gram vocabulary over raw texts (normalized internally).
inline Vocabulary build_vocab_chars(const std::vector<std::string>& docs, int n, int min_df = 1) {
  if (docs.empty()) throw Error("build_vocab: no documents");
  std::vector<std::vector<std::string>> term_docs;
  term_docs.reserve(docs.size());
  for (const auto& d : docs) term_docs.push_back(detail::doc_terms_chars(d, n));
  return detail::vocab_from_term_docs(term_docs, {VocabKind::char_ngram, n}, min_df);
}

// Counts of in-vocabulary word n-grams; out-of-vocabulary n-grams are
// ignored.
inline SparseVector extract_ngrams(const TokenSeq& doc, const Vocabulary& vocab) {
  if (vocab.mode.kind == VocabKind::char_ngram)
    throw Error("char_ngram extraction requires raw text input");
  SparseVector vec;
  for (const auto& term : detail::doc_terms(doc, vocab.mode)) {
    const int id = vocab.id_of(term);
    if (id >= 0) vec.add(id, 1.0);
  }
  return vec;
}

// Counts of in-vocabulary character n-grams over the normalized text.
inline SparseVector extract_ngrams_chars(std::string_view text, const Vocabulary& vocab) {
  if (vocab.mode.kind != VocabKind::char_ngram)
    throw Error("extract_ngrams_chars requires a char_ngram vocabulary");
  SparseVector vec;
  for (const auto& term : detail::doc_terms_chars(text, vocab.mode.n)) {
    const int id = vocab.id_of(term);
    if (id >= 0) vec.add(id, 1.0);
  }
  return vec;
}

// tf-idf with smoothed idf: weight(t, d) = count * (ln((1+N)/(1+df)) + 1),
// then each document vector is L2-normalized. All-zero documents stay zero.
inline std::vector<SparseVector> tfidf_weight(const std::vector<SparseVector>& count_vectors,
                                              const Vocabulary& vocab) {
  std::vector<double> idf(static_cast<std::size_t>(vocab.size()), 1.0);
  for (const auto& [term, df] : vocab.doc_freq)
    idf[static_cast<std::size_t>(vocab.index.at(term))] =
        std::log((1.0 + vocab.n_docs) / (1.0 + df)) + 1.0;

  std::vector<SparseVector> out;
  out.reserve(count_vectors.size());
  for (const auto& counts : count_vectors) {
    SparseVector w;
    for (const auto& [id, c] : counts.entries) {
      if (id < 0 || id >= vocab.size())
        throw Error("feature id " + std::to_string(id) + " out of range for vocabulary");
      w.add(id, c * idf[static_cast<std::size_t>(id)]);
    }
    const double norm = w.l2_norm();
    if (norm > 0.0)
      for (auto& [_, v] : w.entries) v /= norm;
    out.push_back(std::move(w));
  }
  return out;
}

// Reserved sequence ids. Vocabulary ids are offset by kReservedIds when
// encoding so the reserved slots never collide with real tokens.
inline constexpr int kOovId = 0;
inline constexpr int kPadId = 1;
inline constexpr int kReservedIds = 2;

// Fixed-length id sequence for the recurrent model: unknown tokens map to
// the OOV id, long sequences keep their last max_len tokens, short ones are
// left-padded so the final hidden state reflects real tokens.
inline std::vector<int> encode_sequence(const TokenSeq& doc, const Vocabulary& vocab,
                                        int max_len) {
  if (max_len <= 0) throw Error("encode_sequence: max_len must be >= 1");
  if (vocab.mode.kind != VocabKind::token_id)
    throw Error("encode_sequence requires a token_id vocabulary");
  std::vector<int> ids;
  ids.reserve(doc.size());
  for (const auto& tok : doc) {
    const int id = vocab.id_of(tok);
    ids.push_back(id >= 0 ? id + kReservedIds : kOovId);
  }
  if (static_cast<int>(ids.size()) > max_len)
    ids.erase(ids.begin(), ids.end() - max_len);
  std::vector<int> out(static_cast<std::size_t>(max_len), kPadId);
  std::copy(ids.begin(), ids.end(), out.end() - static_cast<std::ptrdiff_t>(ids.size()));
  return out;
}

// --- serialization ----------------------------------------------------------

inline std::string to_string(VocabKind k) {
  switch (k) {
    case VocabKind::word_ngram: return "word_ngram";
    case VocabKind::char_ngram: return "char_ngram";
    case VocabKind::token_id: return "token_id";
  }
  return "word_ngram";
}

inline VocabKind vocab_kind_from_string(const std::string& s) {
  if (s == "word_ngram") return VocabKind::word_ngram;
  if (s == "char_ngram") return VocabKind::char_ngram;
  if (s == "token_id") return VocabKind::token_id;
  throw Error("unknown vocabulary kind '" + s + "'");
}

inline nlohmann::ordered_json vocab_to_json(const Vocabulary& vocab) {
  nlohmann::ordered_json obj;
  obj["kind"] = to_string(vocab.mode.kind);
  obj["n"] = vocab.mode.n;
  obj["n_docs"] = vocab.n_docs;
  nlohmann::ordered_json terms;
  for (const auto& [term, id] : vocab.index)
    terms[term] = nlohmann::json::array({id, vocab.doc_freq.at(term)});
  obj["terms"] = std::move(terms);
  return obj;
}

inline Vocabulary vocab_from_json(const nlohmann::json& obj) {
  Vocabulary vocab;
  vocab.mode.kind = vocab_kind_from_string(obj.at("kind").get<std::string>());
  vocab.mode.n = obj.at("n").get<int>();
  vocab.n_docs = obj.at("n_docs").get<int>();
  for (const auto& [term, v] : obj.at("terms").items()) {
    vocab.index[term] = v.at(0).get<int>();
    vocab.doc_freq[term] = v.at(1).get<int>();
  }
  return vocab;
}

}  // namespace tweetsent
