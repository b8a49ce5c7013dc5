#pragma once

// Grouping of a resource's learner subset: 5-D feature points, min-max
// normalization, farthest-first seeding, Lloyd iterations, diameter-driven
// choice of k and extraction of the largest cluster.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lptag/error.hpp"
#include "lptag/ingest.hpp"
#include "lptag/quantify.hpp"

namespace lptag {

inline constexpr std::size_t kProfileDims = 5;

template <std::size_t Dim>
struct BasicPoint {
  std::string learner_id;
  std::array<double, Dim> coords{};

  friend bool operator==(const BasicPoint&, const BasicPoint&) = default;
};

// (a1, a2, quantified a3, quantified a4, a5 hours)
using FeaturePoint = BasicPoint<kProfileDims>;

template <std::size_t Dim>
double squared_distance(const std::array<double, Dim>& a, const std::array<double, Dim>& b) {
  double sum = 0.0;
  for (std::size_t d = 0; d < Dim; ++d) {
    const double diff = a[d] - b[d];
    sum += diff * diff;
  }
  return sum;
}

template <std::size_t Dim>
double distance(const std::array<double, Dim>& a, const std::array<double, Dim>& b) {
  return std::sqrt(squared_distance(a, b));
}

inline std::vector<FeaturePoint> to_feature_points(const LearnerSubset& subset, const ProfileIndex& profiles,
                                                   const AttributeValueMap& strategy_values,
                                                   const AttributeValueMap& presentation_values) {
  std::vector<FeaturePoint> points;
  points.reserve(subset.members.size());
  for (const auto& id : subset.members) {
    const auto it = profiles.find(id);
    if (it == profiles.end()) throw ValidationError("no profile for learner '" + id + "'");
    const auto& p = it->second;
    points.push_back({id,
                      {static_cast<double>(p.current_skill), static_cast<double>(p.target_skill),
                       strategy_values.at(p.strategy), presentation_values.at(p.presentation),
                       static_cast<double>(p.learning_hours)}});
  }
  return points;
}

template <std::size_t Dim>
struct NormalizationSpec {
  std::array<double, Dim> min{};
  std::array<double, Dim> max{};
};

template <std::size_t Dim>
NormalizationSpec<Dim> fit_normalization(const std::vector<BasicPoint<Dim>>& points) {
  if (points.empty()) throw ValidationError("cannot fit normalization on an empty point set");
  NormalizationSpec<Dim> spec{points.front().coords, points.front().coords};
  for (const auto& p : points) {
    for (std::size_t d = 0; d < Dim; ++d) {
      spec.min[d] = std::min(spec.min[d], p.coords[d]);
      spec.max[d] = std::max(spec.max[d], p.coords[d]);
    }
  }
  return spec;
}

// Maps each coordinate to (x - min) / (max - min); a constant dimension maps to 0.
inline double normalize_coordinate(double x, double lo, double hi) {
  return hi > lo ? (x - lo) / (hi - lo) : 0.0;
}

template <std::size_t Dim>
std::vector<BasicPoint<Dim>> apply_normalization(const std::vector<BasicPoint<Dim>>& points,
                                                 const NormalizationSpec<Dim>& spec) {
  std::vector<BasicPoint<Dim>> out(points.begin(), points.end());
  for (auto& p : out)
    for (std::size_t d = 0; d < Dim; ++d) p.coords[d] = normalize_coordinate(p.coords[d], spec.min[d], spec.max[d]);
  return out;
}

/// Farthest-first traversal. The first seed is drawn uniformly with `seed`;
/// each later seed maximizes its minimum distance to the seeds already chosen
/// (ties go to the smallest learner_id). Returns indices into `points`.
template <std::size_t Dim>
std::vector<std::size_t> farthest_first_seeds(const std::vector<BasicPoint<Dim>>& points, std::size_t k,
                                              std::uint64_t seed) {
  if (k < 1) throw ValidationError("k must be >= 1");
  if (k > points.size()) throw ValidationError("insufficient points");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  std::vector<std::size_t> seeds{pick(rng)};
  std::vector<bool> chosen(points.size(), false);
  chosen[seeds[0]] = true;

  std::vector<double> min_dist(points.size(), std::numeric_limits<double>::infinity());
  while (seeds.size() < k) {
    const auto& last = points[seeds.back()].coords;
    std::size_t best = points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (chosen[i]) continue;
      min_dist[i] = std::min(min_dist[i], squared_distance(points[i].coords, last));
      if (best == points.size() || min_dist[i] > min_dist[best] ||
          (min_dist[i] == min_dist[best] && points[i].learner_id < points[best].learner_id)) {
        best = i;
      }
    }
    chosen[best] = true;
    seeds.push_back(best);
  }
  return seeds;
}

template <std::size_t Dim>
struct Clustering {
  std::size_t k = 0;
  std::vector<std::array<double, Dim>> centroids;
  std::vector<std::string> learner_ids;  // parallel to the input points
  std::vector<std::size_t> assignment;   // parallel to the input points
  double sse = 0.0;
  std::vector<double> sse_trace;  // seeding SSE, then one entry per iteration
  int iterations = 0;

  std::vector<std::size_t> cluster_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (auto a : assignment) ++sizes[a];
    return sizes;
  }
};

namespace detail {

template <std::size_t Dim>
std::size_t nearest_centroid(const std::array<double, Dim>& p, const std::vector<std::array<double, Dim>>& centroids) {
  std::size_t best = 0;
  double best_d = squared_distance(p, centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

template <std::size_t Dim>
double clustering_sse(const std::vector<BasicPoint<Dim>>& points, const Clustering<Dim>& cl) {
  double sse = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) sse += squared_distance(points[i].coords, cl.centroids[cl.assignment[i]]);
  return sse;
}

}  // namespace detail

/// Lloyd's algorithm from the given seed points. Empty clusters are repaired
/// by moving in the point farthest from its own centroid.
template <std::size_t Dim>
Clustering<Dim> lloyd_kmeans(const std::vector<BasicPoint<Dim>>& points, std::span<const std::size_t> seeds,
                             int max_iters) {
  if (max_iters < 1) throw ValidationError("max_iters must be >= 1");
  if (seeds.empty()) throw ValidationError("at least one seed is required");
  {
    std::vector<std::size_t> sorted(seeds.begin(), seeds.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw ValidationError("seeds must be distinct");
    if (sorted.back() >= points.size()) throw ValidationError("seed index out of range");
  }

  const std::size_t n = points.size();
  Clustering<Dim> cl;
  cl.k = seeds.size();
  for (auto s : seeds) cl.centroids.push_back(points[s].coords);
  cl.learner_ids.reserve(n);
  for (const auto& p : points) cl.learner_ids.push_back(p.learner_id);
  cl.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) cl.assignment[i] = detail::nearest_centroid(points[i].coords, cl.centroids);
  cl.sse_trace.push_back(detail::clustering_sse(points, cl));

  std::vector<std::size_t> sizes;
  for (int it = 0; it < max_iters; ++it) {
    const auto before = cl.assignment;

    sizes = cl.cluster_sizes();
    for (std::size_t c = 0; c < cl.k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = n;
      double far_d = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[cl.assignment[i]] < 2) continue;
        const double d = squared_distance(points[i].coords, cl.centroids[cl.assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far == n) break;
      --sizes[cl.assignment[far]];
      ++sizes[c];
      cl.assignment[far] = c;
      cl.centroids[c] = points[far].coords;
    }

    std::vector<std::array<double, Dim>> sums(cl.k, std::array<double, Dim>{});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < Dim; ++d) sums[cl.assignment[i]][d] += points[i].coords[d];
    for (std::size_t c = 0; c < cl.k; ++c) {
      if (sizes[c] == 0) continue;
      for (std::size_t d = 0; d < Dim; ++d) cl.centroids[c][d] = sums[c][d] / static_cast<double>(sizes[c]);
    }

    for (std::size_t i = 0; i < n; ++i) cl.assignment[i] = detail::nearest_centroid(points[i].coords, cl.centroids);
    cl.sse_trace.push_back(detail::clustering_sse(points, cl));
    cl.iterations = it + 1;
    if (cl.assignment == before) break;
  }
  cl.sse = cl.sse_trace.back();
  return cl;
}

/// Mean over non-empty clusters of the largest pairwise member distance
/// (0 for singleton clusters).
template <std::size_t Dim>
double average_diameter(const Clustering<Dim>& cl, const std::vector<BasicPoint<Dim>>& points) {
  std::vector<std::vector<std::size_t>> members(cl.k);
  for (std::size_t i = 0; i < cl.assignment.size(); ++i) members[cl.assignment[i]].push_back(i);
  double total = 0.0;
  std::size_t non_empty = 0;
  for (const auto& m : members) {
    if (m.empty()) continue;
    ++non_empty;
    double diam2 = 0.0;
    for (std::size_t a = 0; a < m.size(); ++a)
      for (std::size_t b = a + 1; b < m.size(); ++b)
        diam2 = std::max(diam2, squared_distance(points[m[a]].coords, points[m[b]].coords));
    total += std::sqrt(diam2);
  }
  return non_empty ? total / static_cast<double>(non_empty) : 0.0;
}

struct KTraceRow {
  std::size_t k = 0;
  double sse = 0.0;
  double avg_diameter = 0.0;
};

template <std::size_t Dim>
struct KSelection {
  Clustering<Dim> clustering;
  std::vector<KTraceRow> trace;  // descending k
};

inline constexpr int kDefaultLloydIters = 100;

// True when shrinking from `diam_k` to `diam_prev` (k-1 clusters) is a "very large" increase.
inline bool diameter_jump(double diam_prev, double diam_k, double gamma) {
  if (diam_k == 0.0) return diam_prev > 0.0;
  return diam_prev > gamma * diam_k;
}

/// Clusters for k = min(k_max, |points|) down to 1 and keeps the k right
/// before the first jump in average diameter by more than `gamma`. Without a
/// jump the single-cluster result is returned.
template <std::size_t Dim>
KSelection<Dim> select_k(const std::vector<BasicPoint<Dim>>& points, std::size_t k_max, double gamma, std::uint64_t seed,
                         int max_iters = kDefaultLloydIters) {
  if (points.empty()) throw ValidationError("no points to cluster");
  if (k_max < 1) throw ValidationError("k_max must be >= 1");
  if (!(gamma > 1.0)) throw ValidationError("gamma must be > 1");

  const std::size_t top = std::min(k_max, points.size());
  std::vector<Clustering<Dim>> runs(top + 1);
  std::vector<double> diam(top + 1, 0.0);
  KSelection<Dim> out;
  for (std::size_t k = top; k >= 1; --k) {
    const auto seeds = farthest_first_seeds(points, k, seed);
    runs[k] = lloyd_kmeans(points, std::span<const std::size_t>(seeds), max_iters);
    diam[k] = average_diameter(runs[k], points);
    out.trace.push_back({k, runs[k].sse, diam[k]});
  }

  std::size_t chosen = 1;
  for (std::size_t k = top; k >= 2; --k) {
    if (diameter_jump(diam[k - 1], diam[k], gamma)) {
      chosen = k;
      break;
    }
  }
  out.clustering = std::move(runs[chosen]);
  return out;
}

/// Members of the most populated cluster, sorted. Ties go to the cluster that
/// holds the smallest learner_id.
template <std::size_t Dim>
std::vector<std::string> largest_cluster(const Clustering<Dim>& cl) {
  if (cl.k == 0 || cl.assignment.empty()) throw ValidationError("empty clustering");
  const auto sizes = cl.cluster_sizes();
  std::vector<const std::string*> smallest(cl.k, nullptr);
  for (std::size_t i = 0; i < cl.assignment.size(); ++i) {
    auto& s = smallest[cl.assignment[i]];
    if (!s || cl.learner_ids[i] < *s) s = &cl.learner_ids[i];
  }
  std::size_t best = cl.k;
  for (std::size_t c = 0; c < cl.k; ++c) {
    if (sizes[c] == 0) continue;
    if (best == cl.k || sizes[c] > sizes[best] || (sizes[c] == sizes[best] && *smallest[c] < *smallest[best])) best = c;
  }
  std::vector<std::string> members;
  members.reserve(sizes[best]);
  for (std::size_t i = 0; i < cl.assignment.size(); ++i)
    if (cl.assignment[i] == best) members.push_back(cl.learner_ids[i]);
  std::sort(members.begin(), members.end());
  return members;
}

}  // namespace lptag
