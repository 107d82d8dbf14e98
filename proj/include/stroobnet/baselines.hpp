#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "stroobnet/distance.hpp"
#include "stroobnet/error.hpp"
#include "stroobnet/model.hpp"
#include "stroobnet/parallel.hpp"
#include "stroobnet/rng.hpp"

// Comparison strategies: k-means, DBSCAN, statistical mode and grid binning.
// All are deterministic functions of (points, params, seed).

namespace stroobnet {

enum class BaselineStrategy { KMeans, Dbscan, Mode, Grid };

constexpr std::string_view to_string(BaselineStrategy s) {
  switch (s) {
    case BaselineStrategy::KMeans: return "kmeans";
    case BaselineStrategy::Dbscan: return "dbscan";
    case BaselineStrategy::Mode: return "mode";
    case BaselineStrategy::Grid: return "grid";
  }
  return "kmeans";
}

inline constexpr int kNoise = -1;

struct BaselineParams {
  std::optional<std::size_t> k;
  std::optional<std::size_t> max_iters;
  std::optional<double> eps_km;
  std::optional<std::size_t> min_pts;
  std::optional<std::size_t> n;
  std::optional<double> bin_size_deg;
};

struct BaselineResult {
  BaselineStrategy strategy = BaselineStrategy::KMeans;
  std::vector<GeoPoint> centroids;
  std::vector<int> assignments;  // per point; kNoise for unassigned
  BaselineParams params;
  std::uint64_t seed = 0;
  std::vector<double> objective_trace;  // kmeans only, one entry per accepted iteration
  std::size_t iterations = 0;
};

namespace detail {

inline int nearest_centroid(GeoPoint p, std::span<const GeoPoint> centroids, double* dist_out) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = haversine(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  if (dist_out) *dist_out = best_d;
  return best;
}

inline double assign_all(std::span<const GeoPoint> points, std::span<const GeoPoint> centroids,
                         std::vector<int>& labels) {
  labels.assign(points.size(), 0);
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double d = 0.0;
    labels[i] = nearest_centroid(points[i], centroids, &d);
    total += d;
  }
  return total;
}

inline std::vector<GeoPoint> kmeanspp_init(std::span<const GeoPoint> points, std::size_t k,
                                           CounterRng& rng) {
  std::vector<GeoPoint> centers;
  std::vector<char> taken(points.size(), 0);
  std::size_t first = rng.below(points.size());
  centers.push_back(points[first]);
  taken[first] = 1;
  std::vector<double> d2(points.size(), std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = haversine(points[i], centers.back());
      d2[i] = std::min(d2[i], d * d);
      if (!taken[i]) total += d2[i];
    }
    std::size_t pick = points.size();
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (taken[i] || d2[i] == 0.0) continue;
        pick = i;
        target -= d2[i];
        if (target < 0.0) break;
      }
    } else {
      // Every remaining point coincides with a center: pick uniformly.
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (!taken[i]) free.push_back(i);
      }
      pick = free[rng.below(free.size())];
    }
    taken[pick] = 1;
    centers.push_back(points[pick]);
  }
  return centers;
}

// Moves each empty cluster's centroid onto the point farthest from its
// assigned centroid, then reassigns. Returns the resulting objective.
inline double reseed_empty(std::span<const GeoPoint> points, std::vector<GeoPoint>& centroids,
                           std::vector<int>& labels, double objective) {
  for (std::size_t guard = 0; guard < centroids.size(); ++guard) {
    std::vector<std::size_t> sizes(centroids.size(), 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    auto empty = std::find(sizes.begin(), sizes.end(), std::size_t{0});
    if (empty == sizes.end()) break;
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = haversine(points[i], centroids[static_cast<std::size_t>(labels[i])]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    centroids[static_cast<std::size_t>(empty - sizes.begin())] = points[far];
    objective = assign_all(points, centroids, labels);
  }
  return objective;
}

}  // namespace detail

/// Lloyd iteration with k-means++ seeding. Points are assigned to their
/// nearest centroid by haversine; centroids are arithmetic means in degree
/// space. The first mean update is always taken; afterwards an update that
/// would raise the summed haversine objective ends the run, so
/// objective_trace never increases.
inline BaselineResult kmeans(std::span<const GeoPoint> points, std::size_t k,
                             std::size_t max_iters, std::uint64_t seed) {
  if (k < 1 || k > points.size()) {
    throw Error(ErrorCode::BadK, "k=" + std::to_string(k) + " points=" + std::to_string(points.size()));
  }
  if (max_iters < 1) throw Error(ErrorCode::ValidationError, "max_iters must be >= 1");

  CounterRng rng(seed, "kmeans");
  std::vector<GeoPoint> centroids = detail::kmeanspp_init(points, k, rng);
  std::vector<int> labels;
  double objective = detail::assign_all(points, centroids, labels);
  objective = detail::reseed_empty(points, centroids, labels, objective);

  BaselineResult result;
  result.strategy = BaselineStrategy::KMeans;
  result.params.k = k;
  result.params.max_iters = max_iters;
  result.seed = seed;

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    std::vector<double> sum_lat(k, 0.0), sum_lon(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      sum_lat[c] += points[i].lat;
      sum_lon[c] += points[i].lon;
      ++count[c];
    }
    std::vector<GeoPoint> next = centroids;
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] > 0) {
        next[c] = {sum_lat[c] / static_cast<double>(count[c]),
                   sum_lon[c] / static_cast<double>(count[c])};
      }
    }
    std::vector<int> next_labels;
    double next_objective = detail::assign_all(points, next, next_labels);
    next_objective = detail::reseed_empty(points, next, next_labels, next_objective);
    if (iter > 0 && next_objective > objective) break;

    const bool stable = next_labels == labels && next == centroids;
    centroids = std::move(next);
    labels = std::move(next_labels);
    objective = next_objective;
    result.objective_trace.push_back(objective);
    ++result.iterations;
    if (stable) break;
  }
  result.centroids = std::move(centroids);
  result.assignments = std::move(labels);
  return result;
}

/// Density-based clustering over haversine distances. A point is core when at
/// least min_pts points (itself included) lie within eps_km. Clusters are the
/// connected components of core points; a border point joins the cluster of
/// its nearest core neighbor (ties by that core's coordinates), which makes
/// the partition independent of input order. Clusters are numbered by their
/// lowest member index.
inline BaselineResult dbscan(std::span<const GeoPoint> points, double eps_km, std::size_t min_pts,
                             Workers workers = {}) {
  if (!(eps_km > 0.0)) throw Error(ErrorCode::ValidationError, "eps_km must be > 0");
  if (min_pts < 1) throw Error(ErrorCode::ValidationError, "min_pts must be >= 1");
  const std::size_t m = points.size();

  std::vector<std::vector<std::size_t>> hoods(m);
  parallel_for(m, workers, [&](std::size_t i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (haversine(points[i], points[j]) <= eps_km) hoods[i].push_back(j);
    }
  });
  std::vector<char> core(m, 0);
  for (std::size_t i = 0; i < m; ++i) core[i] = hoods[i].size() >= min_pts;

  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < m; ++i) {
    if (!core[i]) continue;
    for (auto j : hoods[i]) {
      if (core[j]) {
        auto a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }

  // Representative core (component root) for every clustered point.
  std::vector<std::optional<std::size_t>> root(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (core[i]) {
      root[i] = find(i);
      continue;
    }
    std::optional<std::size_t> best;
    double best_d = 0.0;
    for (auto j : hoods[i]) {
      if (!core[j]) continue;
      const double d = haversine(points[i], points[j]);
      const bool better =
          !best || d < best_d ||
          (d == best_d && std::pair(points[j].lat, points[j].lon) <
                              std::pair(points[*best].lat, points[*best].lon));
      if (better) {
        best = j;
        best_d = d;
      }
    }
    if (best) root[i] = find(*best);
  }

  // Label by lowest member index: scanning in index order assigns labels in
  // order of first appearance.
  std::map<std::size_t, int> label_of_root;
  BaselineResult result;
  result.strategy = BaselineStrategy::Dbscan;
  result.params.eps_km = eps_km;
  result.params.min_pts = min_pts;
  result.assignments.assign(m, kNoise);
  for (std::size_t i = 0; i < m; ++i) {
    if (!root[i]) continue;
    auto [it, inserted] =
        label_of_root.try_emplace(*root[i], static_cast<int>(label_of_root.size()));
    result.assignments[i] = it->second;
  }
  return result;
}

inline std::size_t cluster_count(const BaselineResult& result) {
  int max_label = kNoise;
  for (int l : result.assignments) max_label = std::max(max_label, l);
  return static_cast<std::size_t>(max_label + 1);
}

/// Coordinate mean of each DBSCAN cluster, ordered by label.
inline std::vector<GeoPoint> dbscan_centroids(const BaselineResult& result,
                                              std::span<const GeoPoint> points) {
  if (result.strategy != BaselineStrategy::Dbscan) {
    throw Error(ErrorCode::ValidationError, "dbscan_centroids needs a dbscan result");
  }
  if (points.size() != result.assignments.size()) {
    throw Error(ErrorCode::DimensionMismatch, "points vs assignments");
  }
  const std::size_t clusters = cluster_count(result);
  if (clusters == 0) throw Error(ErrorCode::NoClusters, "all points are noise");
  std::vector<double> sum_lat(clusters, 0.0), sum_lon(clusters, 0.0);
  std::vector<std::size_t> count(clusters, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int l = result.assignments[i];
    if (l == kNoise) continue;
    const auto c = static_cast<std::size_t>(l);
    sum_lat[c] += points[i].lat;
    sum_lon[c] += points[i].lon;
    ++count[c];
  }
  std::vector<GeoPoint> out(clusters);
  for (std::size_t c = 0; c < clusters; ++c) {
    out[c] = {sum_lat[c] / static_cast<double>(count[c]), sum_lon[c] / static_cast<double>(count[c])};
  }
  return out;
}

/// Convenience: run dbscan and fill in the synthesized centroids.
inline BaselineResult dbscan_with_centroids(std::span<const GeoPoint> points, double eps_km,
                                            std::size_t min_pts, Workers workers = {}) {
  auto result = dbscan(points, eps_km, min_pts, workers);
  if (cluster_count(result) > 0) result.centroids = dbscan_centroids(result, points);
  return result;
}

/// Most frequent locations (coordinates compared after rounding to 7
/// decimals). Ties go to the lexicographically smaller (lat, lon). Each
/// centroid is the first input point of its group, an actual location.
inline BaselineResult mode_clustering(std::span<const GeoPoint> points, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::ValidationError, "n must be >= 1");
  using Key = std::pair<std::int64_t, std::int64_t>;
  auto key_of = [](GeoPoint p) {
    return Key{std::llround(p.lat * 1e7), std::llround(p.lon * 1e7)};
  };
  struct Group {
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::map<Key, Group> groups;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto [it, inserted] = groups.try_emplace(key_of(points[i]), Group{0, i});
    ++it->second.count;
  }
  std::vector<std::pair<Key, Group>> ranked(groups.begin(), groups.end());
  // std::map iteration is already key-ascending, so a stable sort on count
  // leaves ties in (lat, lon) order.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second.count > b.second.count; });
  if (ranked.size() > n) ranked.resize(n);

  BaselineResult result;
  result.strategy = BaselineStrategy::Mode;
  result.params.n = n;
  std::map<Key, int> rank;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    result.centroids.push_back(points[ranked[r].second.first]);
    rank[ranked[r].first] = static_cast<int>(r);
  }
  result.assignments.assign(points.size(), kNoise);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (auto it = rank.find(key_of(points[i])); it != rank.end()) result.assignments[i] = it->second;
  }
  return result;
}

/// Bin index along one axis: bin i covers [i*size, (i+1)*size), with the edges
/// evaluated in floating point exactly as written.
inline std::int64_t grid_bin_index(double value, double bin_size_deg) {
  auto i = static_cast<std::int64_t>(std::floor(value / bin_size_deg));
  while (static_cast<double>(i) * bin_size_deg > value) --i;
  while (static_cast<double>(i + 1) * bin_size_deg <= value) ++i;
  return i;
}

/// Top-n most populated lat/lon bins anchored at (0, 0); centroid is the bin
/// center. Ties by (bin_lat, bin_lon) ascending.
inline BaselineResult grid_binning(std::span<const GeoPoint> points, double bin_size_deg,
                                   std::size_t n) {
  if (!(bin_size_deg > 0.0) || !std::isfinite(bin_size_deg)) {
    throw Error(ErrorCode::ValidationError, "bin_size_deg must be > 0");
  }
  if (n < 1) throw Error(ErrorCode::ValidationError, "n must be >= 1");
  using Bin = std::pair<std::int64_t, std::int64_t>;
  std::vector<Bin> bin_of(points.size());
  std::map<Bin, std::size_t> counts;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bin_of[i] = {grid_bin_index(points[i].lat, bin_size_deg),
                 grid_bin_index(points[i].lon, bin_size_deg)};
    ++counts[bin_of[i]];
  }
  std::vector<std::pair<Bin, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > n) ranked.resize(n);

  BaselineResult result;
  result.strategy = BaselineStrategy::Grid;
  result.params.n = n;
  result.params.bin_size_deg = bin_size_deg;
  std::map<Bin, int> rank;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const auto [bl, bo] = ranked[r].first;
    const double lat = (static_cast<double>(bl) + 0.5) * bin_size_deg;
    const double lon = (static_cast<double>(bo) + 0.5) * bin_size_deg;
    result.centroids.push_back({std::clamp(lat, -90.0, 90.0), std::clamp(lon, -180.0, 180.0)});
    rank[ranked[r].first] = static_cast<int>(r);
  }
  result.assignments.assign(points.size(), kNoise);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (auto it = rank.find(bin_of[i]); it != rank.end()) result.assignments[i] = it->second;
  }
  return result;
}

}  // namespace stroobnet
