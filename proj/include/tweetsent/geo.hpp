#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tweetsent/error.hpp"
#include "tweetsent/kmeans.hpp"

namespace tweetsent {

enum class Window { pre, post };

inline std::string to_string(Window w) { return w == Window::pre ? "pre" : "post"; }

// One geolocated prediction used by the outcome analysis.
struct GeoPoint {
  int sentiment = 1;  // predicted stance, -1 or +1
  double lat = 0.0;
  double lon = 0.0;
  Window window = Window::post;
  std::optional<std::string> city;
};

// Shortest round-trip decimal form; keeps CSV output deterministic.
inline std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct GeoClusterReport {
  int k = 0;
  std::vector<int> assignments;                 // per input point
  std::vector<std::array<double, 3>> centroids;  // (sentiment, lat, lon)
  std::vector<double> mean_sentiment;           // per cluster, in [-1, 1]
  std::vector<int> sizes;                       // per cluster, sums to point count
};

// k-means over raw (sentiment, lat, lon) triples — no axis scaling, so
// geography dominates the metric. Deterministic given the seed.
inline GeoClusterReport cluster_geo_sentiment(const std::vector<GeoPoint>& points, int k,
                                              std::uint64_t seed, int max_iter = 100,
                                              double tol = 1e-6) {
  if (k < 1) throw Error("geo clustering: k must be >= 1");
  std::vector<std::vector<double>> coords;
  coords.reserve(points.size());
  for (const auto& p : points)
    coords.push_back({static_cast<double>(p.sentiment), p.lat, p.lon});
  const KMeansResult fit = kmeans_fit(coords, k, seed, max_iter, tol);

  GeoClusterReport report;
  report.k = k;
  report.assignments = fit.assignments;
  report.centroids.resize(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    const auto& cen = fit.centroids[static_cast<std::size_t>(c)];
    report.centroids[static_cast<std::size_t>(c)] = {cen[0], cen[1], cen[2]};
  }
  report.sizes.assign(static_cast<std::size_t>(k), 0);
  std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto c = static_cast<std::size_t>(fit.assignments[i]);
    ++report.sizes[c];
    sum[c] += static_cast<double>(points[i].sentiment);
  }
  report.mean_sentiment.assign(static_cast<std::size_t>(k), 0.0);
  for (int c = 0; c < k; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    if (report.sizes[cu] > 0)
      report.mean_sentiment[cu] = sum[cu] / static_cast<double>(report.sizes[cu]);
  }
  return report;
}

// Per-city tweet-level mean sentiment, split by pre/post window.
struct CityStats {
  std::optional<double> pre_mean, post_mean;
  int pre_count = 0, post_count = 0;
};

struct CityAggregates {
  std::map<std::string, CityStats> cities;  // keyed by normalized city name
  int skipped = 0;                          // points without a city
};

inline std::string normalize_city(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  std::string out;
  out.reserve(e - b);
  for (std::size_t i = b; i < e; ++i) {
    char c = s[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    out.push_back(c);
  }
  return out;
}

inline CityAggregates aggregate_by_city(const std::vector<GeoPoint>& points) {
  CityAggregates agg;
  std::map<std::string, std::array<long, 2>> sums;    // [pre, post]
  std::map<std::string, std::array<long, 2>> counts;
  for (const auto& p : points) {
    if (!p.city || normalize_city(*p.city).empty()) {
      ++agg.skipped;
      continue;
    }
    const std::string key = normalize_city(*p.city);
    const std::size_t w = p.window == Window::pre ? 0 : 1;
    sums[key][w] += p.sentiment;
    counts[key][w] += 1;
  }
  for (const auto& [city, n] : counts) {
    CityStats st;
    st.pre_count = static_cast<int>(n[0]);
    st.post_count = static_cast<int>(n[1]);
    if (n[0] > 0) st.pre_mean = static_cast<double>(sums[city][0]) / static_cast<double>(n[0]);
    if (n[1] > 0) st.post_mean = static_cast<double>(sums[city][1]) / static_cast<double>(n[1]);
    agg.cities[city] = st;
  }
  return agg;
}

// CSV emitters: plot data, not images.

inline void write_cluster_csv(std::ostream& out, const GeoClusterReport& report) {
  out << "cluster,lat,lon,size,mean_sentiment\n";
  for (int c = 0; c < report.k; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    out << c << ',' << fmt_double(report.centroids[cu][1]) << ','
        << fmt_double(report.centroids[cu][2]) << ',' << report.sizes[cu] << ','
        << fmt_double(report.mean_sentiment[cu]) << '\n';
  }
}

inline void write_city_csv(std::ostream& out, const CityAggregates& agg) {
  out << "city,window,mean,count\n";
  for (const auto& [city, st] : agg.cities) {
    if (st.pre_count > 0)
      out << city << ",pre," << fmt_double(*st.pre_mean) << ',' << st.pre_count << '\n';
    if (st.post_count > 0)
      out << city << ",post," << fmt_double(*st.post_mean) << ',' << st.post_count << '\n';
  }
}

}  // namespace tweetsent
