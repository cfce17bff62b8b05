#pragma once

#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "tweetsent/error.hpp"
#include "tweetsent/rng.hpp"

namespace tweetsent {

struct KMeansResult {
  std::vector<std::vector<double>> centroids;  // k x dim
  std::vector<int> assignments;                // per point, nearest centroid (ties: lowest id)
  std::vector<double> inertia_history;         // WCSS after each assignment pass
  int iterations = 0;
};

namespace detail {

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline std::size_t count_distinct(const std::vector<std::vector<double>>& points) {
  std::set<std::vector<double>> distinct(points.begin(), points.end());
  return distinct.size();
}

// k-means++ seeding: first centroid uniform, the rest with probability
// proportional to squared distance from the nearest chosen centroid.
inline std::vector<std::vector<double>> kmeanspp_init(
    const std::vector<std::vector<double>>& points, int k, Rng& rng) {
  std::vector<std::vector<double>> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  centroids.push_back(points[rng.below(points.size())]);
  std::vector<double> d2(points.size());
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& cen : centroids) best = std::min(best, sq_dist(points[i], cen));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      // All remaining points coincide with chosen centroids; caller has
      // verified there are >= k distinct points, so this cannot happen.
      throw Error("k-means++: degenerate point set");
    }
    const double r = rng.uniform01() * total;
    double acc = 0.0;
    std::size_t pick = points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
      acc += d2[i];
      if (acc >= r && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    if (pick == points.size()) {  // fp slack: fall back to the last viable point
      for (std::size_t i = points.size(); i-- > 0;)
        if (d2[i] > 0.0) {
          pick = i;
          break;
        }
    }
    centroids.push_back(points[pick]);
  }
  return centroids;
}

}  // namespace detail

// Lloyd iterations with k-means++ seeding. Deterministic given the seed.
// Stops when the largest centroid movement drops below tol or after
// max_iter passes. Empty clusters are re-seeded to the point currently
// farthest from its assigned centroid.
inline KMeansResult kmeans_fit(const std::vector<std::vector<double>>& points, int k,
                               std::uint64_t seed, int max_iter = 100, double tol = 1e-6) {
  if (k < 1) throw Error("k-means: k must be >= 1");
  if (points.empty()) throw Error("k-means: no points");
  const std::size_t dim = points[0].size();
  for (const auto& p : points)
    if (p.size() != dim) throw Error("k-means: inconsistent point dimensions");
  if (detail::count_distinct(points) < static_cast<std::size_t>(k))
    throw Error("k-means: fewer than k distinct points");

  Rng rng(derive_seed(seed, 0x4b4d));
  KMeansResult res;
  res.centroids = detail::kmeanspp_init(points, k, rng);
  res.assignments.assign(points.size(), 0);

  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment pass.
    double wcss = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d = detail::sq_dist(points[i], res.centroids[static_cast<std::size_t>(c)]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      res.assignments[i] = best_c;
      wcss += best;
    }
    res.inertia_history.push_back(wcss);
    res.iterations = iter + 1;

    // Update pass.
    std::vector<std::vector<double>> next(static_cast<std::size_t>(k),
                                          std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto c = static_cast<std::size_t>(res.assignments[i]);
      for (std::size_t d = 0; d < dim; ++d) next[c][d] += points[i][d];
      ++counts[c];
    }
    std::vector<bool> reseeded(points.size(), false);
    for (int c = 0; c < k; ++c) {
      const auto cu = static_cast<std::size_t>(c);
      if (counts[cu] > 0) {
        for (std::size_t d = 0; d < dim; ++d) next[cu][d] /= static_cast<double>(counts[cu]);
        continue;
      }
      // Re-seed the empty cluster with the worst-fit point.
      double worst = -1.0;
      std::size_t worst_i = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (reseeded[i]) continue;
        const double d =
            detail::sq_dist(points[i], res.centroids[static_cast<std::size_t>(res.assignments[i])]);
        if (d > worst) {
          worst = d;
          worst_i = i;
        }
      }
      next[cu] = points[worst_i];
      res.assignments[worst_i] = c;
      reseeded[worst_i] = true;
    }

    double max_shift = 0.0;
    for (int c = 0; c < k; ++c) {
      const auto cu = static_cast<std::size_t>(c);
      max_shift = std::max(max_shift, detail::sq_dist(res.centroids[cu], next[cu]));
    }
    res.centroids = std::move(next);
    if (std::sqrt(max_shift) < tol) break;
  }

  // Final assignment against the converged centroids.
  double wcss = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (int c = 0; c < k; ++c) {
      const double d = detail::sq_dist(points[i], res.centroids[static_cast<std::size_t>(c)]);
      if (d < best) {
        best = d;
        best_c = c;
      }
    }
    res.assignments[i] = best_c;
    wcss += best;
  }
  res.inertia_history.push_back(wcss);
  return res;
}

}  // namespace tweetsent
