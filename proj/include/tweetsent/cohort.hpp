#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tweetsent/corpus.hpp"
#include "tweetsent/error.hpp"
#include "tweetsent/geo.hpp"
#include "tweetsent/stats.hpp"
#include "tweetsent/timeutil.hpp"

namespace tweetsent {

// Event window specification. `start` and `end` are midnight-UTC dates; the
// pre window covers margin_days strictly before onset, the post window runs
// from onset through the whole calendar day end + margin_days.
struct EventSpec {
  std::string name;
  std::int64_t start = 0;
  std::int64_t end = 0;
  int margin_days = 14;
};

inline EventSpec make_event(const std::string& name, const std::string& start_date,
                            const std::string& end_date, int margin_days = 14) {
  EventSpec ev{name, parse_date(start_date), parse_date(end_date), margin_days};
  if (ev.start > ev.end) throw Error("event '" + name + "': start is after end");
  if (ev.margin_days < 1) throw Error("event '" + name + "': margin_days must be >= 1");
  return ev;
}

struct WindowedTweet {
  TweetRecord record;
  int predicted = 1;  // -1 or +1
  Window window = Window::post;
};

// Assigns each record to the event's pre or post window; records outside
// both windows — or tagged with a different event — are excluded. Tweets at
// the start instant count as post. Requires predictions stored in `label`.
inline std::vector<WindowedTweet> label_windows(const Corpus& corpus, const EventSpec& event) {
  const std::int64_t margin = static_cast<std::int64_t>(event.margin_days) * 86400;
  const std::int64_t pre_begin = event.start - margin;
  const std::int64_t post_end = event.end + margin + 86400;  // exclusive
  std::vector<WindowedTweet> out;
  for (const auto& rec : corpus.records) {
    if (rec.event && *rec.event != event.name) continue;
    if (rec.created_at < pre_begin || rec.created_at >= post_end) continue;
    if (!rec.label)
      throw Error("record '" + rec.id + "' has no prediction attached");
    WindowedTweet wt;
    wt.record = rec;
    wt.predicted = *rec.label;
    wt.window = rec.created_at < event.start ? Window::pre : Window::post;
    out.push_back(std::move(wt));
  }
  return out;
}

struct CohortSplit {
  std::vector<WindowedTweet> pre, post;  // tweet-level subsets (all tweets by cohort users)
  std::set<std::string> users;           // users with >= 1 pre and >= 1 post tweet
};

inline CohortSplit extract_cohort(const std::vector<WindowedTweet>& windowed) {
  std::set<std::string> pre_users, post_users;
  for (const auto& wt : windowed)
    (wt.window == Window::pre ? pre_users : post_users).insert(wt.record.user);
  CohortSplit split;
  for (const auto& u : pre_users)
    if (post_users.count(u)) split.users.insert(u);
  for (const auto& wt : windowed) {
    if (!split.users.count(wt.record.user)) continue;
    (wt.window == Window::pre ? split.pre : split.post).push_back(wt);
  }
  return split;
}

// One pre/post comparison: means, their difference, and the two-sample
// Student's t-test on the underlying +-1 samples.
struct MeanComparison {
  bool applicable = false;  // false when either window is empty
  double pre_mean = 0.0;
  double post_mean = 0.0;
  double diff = 0.0;  // post_mean - pre_mean
  int n_pre = 0;
  int n_post = 0;
  TTestResult test;
  bool significant_1pct = false;
};

struct CohortReport {
  std::string event;
  MeanComparison overall;
  MeanComparison within_cohort;
  int cohort_user_count = 0;
};

namespace detail {

inline MeanComparison compare_block(const std::vector<double>& pre,
                                    const std::vector<double>& post) {
  MeanComparison c;
  c.n_pre = static_cast<int>(pre.size());
  c.n_post = static_cast<int>(post.size());
  if (pre.empty() || post.empty()) return c;
  c.applicable = true;
  double s = 0.0;
  for (double v : pre) s += v;
  c.pre_mean = s / static_cast<double>(pre.size());
  s = 0.0;
  for (double v : post) s += v;
  c.post_mean = s / static_cast<double>(post.size());
  c.diff = c.post_mean - c.pre_mean;
  // t is oriented so its sign matches diff.
  c.test = students_t_test(post, pre);
  c.significant_1pct = c.test.applicable && c.test.p < 0.01;
  return c;
}

inline std::vector<double> sentiments(const std::vector<WindowedTweet>& tweets, Window w) {
  std::vector<double> out;
  for (const auto& wt : tweets)
    if (wt.window == w) out.push_back(static_cast<double>(wt.predicted));
  return out;
}

}  // namespace detail

// Overall vs. within-cohort pre/post mean sentiment with significance at the
// 1% level. Means are plain tweet-level averages of +-1 predictions.
inline CohortReport compare_means(const std::string& event_name,
                                  const std::vector<WindowedTweet>& windowed) {
  CohortReport report;
  report.event = event_name;
  report.overall = detail::compare_block(detail::sentiments(windowed, Window::pre),
                                         detail::sentiments(windowed, Window::post));
  const CohortSplit cohort = extract_cohort(windowed);
  report.cohort_user_count = static_cast<int>(cohort.users.size());
  std::vector<double> pre, post;
  for (const auto& wt : cohort.pre) pre.push_back(static_cast<double>(wt.predicted));
  for (const auto& wt : cohort.post) post.push_back(static_cast<double>(wt.predicted));
  report.within_cohort = detail::compare_block(pre, post);
  return report;
}

// CSV with one row per (event, block); inapplicable statistics emit "na".
inline void write_cohort_csv(std::ostream& out, std::span<const CohortReport> reports) {
  out << "event,block,pre_mean,post_mean,diff,n_pre,n_post,t,df,p,sig_1pct\n";
  const auto row = [&out](const std::string& event, const char* block,
                          const MeanComparison& c) {
    out << event << ',' << block << ',';
    if (c.applicable)
      out << fmt_double(c.pre_mean) << ',' << fmt_double(c.post_mean) << ','
          << fmt_double(c.diff);
    else
      out << "na,na,na";
    out << ',' << c.n_pre << ',' << c.n_post << ',';
    if (c.test.applicable)
      out << fmt_double(c.test.t) << ',' << fmt_double(c.test.df) << ',' << fmt_double(c.test.p);
    else
      out << "na,na,na";
    out << ',' << (c.significant_1pct ? 1 : 0) << '\n';
  };
  for (const auto& r : reports) {
    row(r.event, "overall", r.overall);
    row(r.event, "within_cohort", r.within_cohort);
  }
}

}  // namespace tweetsent
