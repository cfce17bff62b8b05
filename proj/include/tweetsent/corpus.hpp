#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tweetsent/error.hpp"
#include "tweetsent/rng.hpp"
#include "tweetsent/timeutil.hpp"

namespace tweetsent {

// One tweet. `label` is the +-1 stance: gold where known, predicted once a
// model has been applied.
struct TweetRecord {
  std::string id;
  std::string user;
  std::int64_t created_at = 0;  // UTC epoch seconds
  std::string text;
  std::optional<double> lat;  // lat and lon are both present or both absent
  std::optional<double> lon;
  std::optional<std::string> city;
  std::optional<std::string> event;
  std::optional<int> label;  // -1 or +1

  bool operator==(const TweetRecord&) const = default;
};

enum class Provenance { influential, event_related, synthetic };

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::influential: return "influential";
    case Provenance::event_related: return "event_related";
    case Provenance::synthetic: return "synthetic";
  }
  return "synthetic";
}

inline Provenance provenance_from_string(const std::string& s) {
  if (s == "influential") return Provenance::influential;
  if (s == "event_related") return Provenance::event_related;
  if (s == "synthetic") return Provenance::synthetic;
  throw Error("unknown provenance '" + s + "'");
}

struct Corpus {
  std::vector<TweetRecord> records;
  Provenance provenance = Provenance::synthetic;

  bool operator==(const Corpus&) const = default;
};

// Map from normalized account handle to stance in {-1, +1}. Handles are
// matched case-insensitively with any leading '@' stripped.
struct StanceList {
  std::map<std::string, int> entries;
};

inline std::string normalize_handle(std::string_view h) {
  std::string out;
  std::size_t start = (!h.empty() && h.front() == '@') ? 1 : 0;
  out.reserve(h.size() - start);
  for (std::size_t i = start; i < h.size(); ++i) {
    char c = h[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    out.push_back(c);
  }
  return out;
}

// Lowercases ASCII and collapses runs of whitespace to single spaces,
// trimming the ends. Used as the text component of the dedup key.
inline std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    out.push_back(c);
  }
  return out;
}

namespace detail {

inline TweetRecord record_from_json(const nlohmann::json& obj, std::size_t line_no) {
  const auto fail = [line_no](const std::string& msg) -> Error {
    return Error("line " + std::to_string(line_no) + ": " + msg);
  };
  if (!obj.is_object()) throw fail("expected a JSON object");
  static const std::set<std::string> allowed = {"id",  "user", "created_at", "text", "lat",
                                                "lon", "city", "event",      "label"};
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw fail("unknown key '" + key + "'");

  TweetRecord rec;
  const auto require_string = [&](const char* key) -> std::string {
    if (!obj.contains(key) || !obj[key].is_string())
      throw fail(std::string(key) + " must be a string");
    return obj[key].get<std::string>();
  };
  rec.id = require_string("id");
  if (rec.id.empty()) throw fail("id must be non-empty");
  rec.user = require_string("user");
  try {
    rec.created_at = parse_rfc3339(require_string("created_at"));
  } catch (const Error& e) {
    throw fail(std::string("created_at: ") + e.what());
  }
  rec.text = require_string("text");

  if (obj.contains("lat") != obj.contains("lon"))
    throw fail("lat and lon must both be present or both absent");
  if (obj.contains("lat")) {
    if (!obj["lat"].is_number() || !obj["lon"].is_number())
      throw fail("lat and lon must be numbers");
    rec.lat = obj["lat"].get<double>();
    rec.lon = obj["lon"].get<double>();
    if (*rec.lat < -90.0 || *rec.lat > 90.0) throw fail("lat out of range [-90, 90]");
    if (*rec.lon < -180.0 || *rec.lon > 180.0) throw fail("lon out of range [-180, 180]");
  }
  if (obj.contains("city")) {
    if (!obj["city"].is_string()) throw fail("city must be a string");
    rec.city = obj["city"].get<std::string>();
  }
  if (obj.contains("event")) {
    if (!obj["event"].is_string()) throw fail("event must be a string");
    rec.event = obj["event"].get<std::string>();
  }
  if (obj.contains("label")) {
    if (!obj["label"].is_number_integer() || (obj["label"].get<int>() != -1 && obj["label"].get<int>() != 1))
      throw fail("label must be -1 or 1");
    rec.label = obj["label"].get<int>();
  }
  return rec;
}

inline nlohmann::ordered_json record_to_json(const TweetRecord& rec) {
  nlohmann::ordered_json obj;
  obj["id"] = rec.id;
  obj["user"] = rec.user;
  obj["created_at"] = format_rfc3339_utc(rec.created_at);
  obj["text"] = rec.text;
  if (rec.lat && rec.lon) {
    obj["lat"] = *rec.lat;
    obj["lon"] = *rec.lon;
  }
  if (rec.city) obj["city"] = *rec.city;
  if (rec.event) obj["event"] = *rec.event;
  if (rec.label) obj["label"] = *rec.label;
  return obj;
}

}  // namespace detail

// Reads a JSONL corpus: one object per line, keys per the schema above,
// unknown keys rejected. Order is preserved; ids must be unique.
inline Corpus ingest_corpus(std::istream& in, Provenance provenance) {
  Corpus corpus;
  corpus.provenance = provenance;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("line " + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
    }
    TweetRecord rec = detail::record_from_json(obj, line_no);
    if (!seen_ids.insert(rec.id).second)
      throw Error("line " + std::to_string(line_no) + ": duplicate id '" + rec.id + "'");
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

inline Corpus ingest_corpus(const std::string& path, Provenance provenance) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file '" + path + "'");
  return ingest_corpus(in, provenance);
}

inline void serialize_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& rec : corpus.records) out << detail::record_to_json(rec).dump() << "\n";
}

inline void serialize_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus file '" + path + "'");
  serialize_corpus(out, corpus);
}

// Stance list file: JSONL with keys `handle`, `stance` (-1 or 1).
inline StanceList load_stances(std::istream& in) {
  StanceList stances;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fail = [line_no](const std::string& msg) -> Error {
      return Error("line " + std::to_string(line_no) + ": " + msg);
    };
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw fail(std::string("malformed JSON (") + e.what() + ")");
    }
    if (!obj.is_object()) throw fail("expected a JSON object");
    for (const auto& [key, _] : obj.items())
      if (key != "handle" && key != "stance") throw fail("unknown key '" + key + "'");
    if (!obj.contains("handle") || !obj["handle"].is_string())
      throw fail("handle must be a string");
    if (!obj.contains("stance") || !obj["stance"].is_number_integer())
      throw fail("stance must be -1 or 1");
    const int stance = obj["stance"].get<int>();
    if (stance != -1 && stance != 1) throw fail("stance must be -1 or 1");
    const std::string handle = normalize_handle(obj["handle"].get<std::string>());
    if (handle.empty()) throw fail("handle must be non-empty");
    if (!stances.entries.emplace(handle, stance).second)
      throw fail("duplicate handle '" + handle + "'");
  }
  return stances;
}

inline StanceList load_stances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stance file '" + path + "'");
  return load_stances(in);
}

// Bulk weak labeling: every record by a listed handle gets that handle's
// stance; records by unlisted handles are dropped. The result is 100%
// labeled.
inline Corpus apply_influential_labels(const Corpus& corpus, const StanceList& stances) {
  if (stances.entries.empty()) throw Error("stance list is empty");
  if (corpus.provenance != Provenance::influential)
    throw Error("apply_influential_labels requires an influential corpus");
  Corpus out;
  out.provenance = corpus.provenance;
  for (const auto& rec : corpus.records) {
    const auto it = stances.entries.find(normalize_handle(rec.user));
    if (it == stances.entries.end()) continue;
    TweetRecord labeled = rec;
    labeled.label = it->second;
    out.records.push_back(std::move(labeled));
  }
  return out;
}

// Removes from `event_related` every record already present in
// `influential`, keyed by id first and then by the
// (user, created_at, normalized text) triple.
inline Corpus dedup_batches(const Corpus& influential, const Corpus& event_related) {
  std::set<std::string> ids;
  std::set<std::tuple<std::string, std::int64_t, std::string>> triples;
  for (const auto& rec : influential.records) {
    ids.insert(rec.id);
    triples.emplace(rec.user, rec.created_at, normalize_text(rec.text));
  }
  Corpus out;
  out.provenance = event_related.provenance;
  for (const auto& rec : event_related.records) {
    if (ids.count(rec.id)) continue;
    if (triples.count({rec.user, rec.created_at, normalize_text(rec.text)})) continue;
    out.records.push_back(rec);
  }
  return out;
}

// Stratified split: within each label class the records are shuffled by a
// seeded generator and the first floor(fraction * n_class) go to train.
// The result is an exact partition of the input and deterministic per seed.
inline std::pair<Corpus, Corpus> split_train_val(const Corpus& corpus, double train_fraction,
                                                 std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error("train_fraction must be in (0, 1)");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& rec = corpus.records[i];
    if (!rec.label) throw Error("record '" + rec.id + "' is unlabeled");
    by_class[*rec.label].push_back(i);
  }
  Rng rng(derive_seed(seed, 0x5117));
  Corpus train, val;
  train.provenance = val.provenance = corpus.provenance;
  for (auto& [label, indices] : by_class) {
    if (indices.size() < 2)
      throw Error("label class " + std::to_string(label) + " has fewer than 2 records");
    rng.shuffle(indices);
    const std::size_t n_train =
        static_cast<std::size_t>(train_fraction * static_cast<double>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j)
      (j < n_train ? train : val).records.push_back(corpus.records[indices[j]]);
  }
  return {std::move(train), std::move(val)};
}

// --- synthetic corpus ------------------------------------------------------

struct SyntheticRegion {
  double center_lat = 0.0;
  double center_lon = 0.0;
  double std_degrees = 1.0;
  double positive_fraction = 0.5;
};

struct SyntheticEvent {
  std::string name;
  std::int64_t start = 0;  // midnight UTC
  std::int64_t end = 0;
};

struct SyntheticConfig {
  int n_users = 50;
  int n_tweets = 1000;
  int positive_lexicon_size = 40;
  int negative_lexicon_size = 40;
  int neutral_lexicon_size = 80;
  int tokens_min = 5;
  int tokens_max = 12;
  double class_token_prob = 0.5;
  double label_noise = 0.0;
  std::vector<SyntheticRegion> regions = {{40.0, -74.0, 1.0, 0.7}, {33.0, -97.0, 1.0, 0.3}};
  std::vector<SyntheticEvent> events = {{"storm", 1514764800, 1515110400}};  // Jan 2018
  int margin_days = 14;
  std::uint64_t seed = 0;
};

struct SyntheticResult {
  Corpus corpus;
  std::vector<int> true_stance;  // pre-noise stance per record, same order
};

inline void validate_synthetic_config(const SyntheticConfig& cfg) {
  if (cfg.n_users < 1) throw Error("synthetic config: n_users must be >= 1");
  if (cfg.n_tweets < 0) throw Error("synthetic config: n_tweets must be >= 0");
  if (cfg.positive_lexicon_size < 1 || cfg.negative_lexicon_size < 1)
    throw Error("synthetic config: class lexicons must be non-empty");
  if (cfg.neutral_lexicon_size < 1 && cfg.class_token_prob < 1.0)
    throw Error("synthetic config: neutral lexicon empty but class_token_prob < 1");
  if (cfg.tokens_min < 1 || cfg.tokens_max < cfg.tokens_min)
    throw Error("synthetic config: tokens range is empty");
  if (cfg.class_token_prob < 0.0 || cfg.class_token_prob > 1.0)
    throw Error("synthetic config: class_token_prob must be in [0, 1]");
  if (cfg.label_noise < 0.0 || cfg.label_noise > 1.0)
    throw Error("synthetic config: label_noise must be in [0, 1]");
  if (cfg.regions.empty()) throw Error("synthetic config: at least one region required");
  for (const auto& r : cfg.regions)
    if (r.positive_fraction < 0.0 || r.positive_fraction > 1.0)
      throw Error("synthetic config: positive_fraction must be in [0, 1]");
  if (cfg.events.empty()) throw Error("synthetic config: at least one event required");
  for (const auto& e : cfg.events) {
    if (e.name.empty()) throw Error("synthetic config: event name must be non-empty");
    if (e.start > e.end) throw Error("synthetic config: event '" + e.name + "' has start > end");
  }
  if (cfg.margin_days < 1) throw Error("synthetic config: margin_days must be >= 1");
}

// Deterministic seeded generator used as a desk-scale stand-in for scraped
// data. Each user belongs to one geographic region; each tweet mixes tokens
// from its stance's lexicon with neutral tokens, and the recorded label is
// the true stance flipped with probability label_noise.
inline SyntheticResult generate_synthetic(const SyntheticConfig& cfg) {
  validate_synthetic_config(cfg);
  Rng rng(derive_seed(cfg.seed, 0x5e37));

  const auto token_name = [](const char* prefix, int i) {
    return std::string(prefix) + std::to_string(i);
  };

  std::vector<int> user_region(static_cast<std::size_t>(cfg.n_users));
  for (auto& r : user_region) r = static_cast<int>(rng.below(cfg.regions.size()));

  SyntheticResult result;
  result.corpus.provenance = Provenance::synthetic;
  result.corpus.records.reserve(static_cast<std::size_t>(cfg.n_tweets));
  result.true_stance.reserve(static_cast<std::size_t>(cfg.n_tweets));

  int id_width = 1;
  for (int n = cfg.n_tweets; n >= 10; n /= 10) ++id_width;

  for (int i = 0; i < cfg.n_tweets; ++i) {
    TweetRecord rec;
    std::string id = std::to_string(i);
    rec.id = "syn" + std::string(static_cast<std::size_t>(id_width) - id.size(), '0') + id;

    const int user = static_cast<int>(rng.below(static_cast<std::size_t>(cfg.n_users)));
    rec.user = "user" + std::to_string(user);
    const SyntheticRegion& region = cfg.regions[static_cast<std::size_t>(user_region[user])];

    const int stance = rng.bernoulli(region.positive_fraction) ? 1 : -1;
    rec.lat = std::clamp(rng.gaussian(region.center_lat, region.std_degrees), -90.0, 90.0);
    rec.lon = std::clamp(rng.gaussian(region.center_lon, region.std_degrees), -180.0, 180.0);
    rec.city = "region" + std::to_string(user_region[user]);

    const int n_tokens =
        cfg.tokens_min + static_cast<int>(rng.below(cfg.tokens_max - cfg.tokens_min + 1));
    std::string text;
    for (int t = 0; t < n_tokens; ++t) {
      if (t > 0) text.push_back(' ');
      if (rng.bernoulli(cfg.class_token_prob)) {
        if (stance > 0)
          text += token_name("pos", static_cast<int>(rng.below(cfg.positive_lexicon_size)));
        else
          text += token_name("neg", static_cast<int>(rng.below(cfg.negative_lexicon_size)));
      } else {
        text += token_name("mid", static_cast<int>(rng.below(cfg.neutral_lexicon_size)));
      }
    }
    rec.text = std::move(text);

    int label = stance;
    if (rng.bernoulli(cfg.label_noise)) label = -label;
    rec.label = label;

    const auto& ev = cfg.events[rng.below(cfg.events.size())];
    rec.event = ev.name;
    const std::int64_t margin = static_cast<std::int64_t>(cfg.margin_days) * 86400;
    // Window span matches the cohort module: pre starts margin_days before
    // the event, post runs through the whole day end + margin_days.
    rec.created_at = rng.range(ev.start - margin, ev.end + margin + 86400 - 1);

    result.true_stance.push_back(stance);
    result.corpus.records.push_back(std::move(rec));
  }
  return result;
}

}  // namespace tweetsent
