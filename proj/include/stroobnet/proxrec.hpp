#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "stroobnet/distance.hpp"
#include "stroobnet/error.hpp"
#include "stroobnet/model.hpp"
#include "stroobnet/parallel.hpp"

// Proximal-recurrence clustering.
//
// Every unobserved event anchors one candidate cluster: the events within
// radius_km of it. Candidates are ranked by member count (density, highest
// first, ties by lower anchor index) and accepted greedily; a candidate is
// suppressed when an already accepted, denser cluster contains its anchor.
// Anchors are always real event locations, never averaged positions.

namespace stroobnet {

struct AnchoredCluster {
  std::size_t anchor_index = 0;           // index into the unobserved sequence
  GeoPoint anchor_location;
  std::vector<std::size_t> member_indices;  // sorted, includes the anchor

  std::size_t density() const noexcept { return member_indices.size(); }
  bool contains(std::size_t event_index) const {
    return std::binary_search(member_indices.begin(), member_indices.end(), event_index);
  }

  friend bool operator==(const AnchoredCluster&, const AnchoredCluster&) = default;
};

struct ClusterSelection {
  std::vector<AnchoredCluster> clusters;
  double radius_km = kDefaultRadiusKm;
  std::size_t requested_n = 0;

  friend bool operator==(const ClusterSelection&, const ClusterSelection&) = default;
};

using Neighborhoods = std::vector<std::vector<std::size_t>>;

/// N(i) = {j : dm(i, j) <= radius_km}, each sorted ascending.
inline Neighborhoods neighborhoods(const DistanceMatrix& dm, double radius_km, Workers workers = {}) {
  require_kind(dm, MatrixKind::Unipartite);
  Neighborhoods out(dm.rows());
  parallel_for(dm.rows(), workers, [&](std::size_t i) {
    const auto row = dm.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] <= radius_km) out[i].push_back(j);
    }
  });
  return out;
}

/// Same result as neighborhoods(unipartite_matrix(points), radius_km) without
/// materializing the m x m matrix. Distances go through the same haversine
/// call, so threshold decisions are identical.
inline Neighborhoods neighborhoods_direct(std::span<const GeoPoint> points, double radius_km,
                                          double earth_radius_km = kEarthRadiusKm,
                                          Workers workers = {}) {
  if (points.empty()) throw Error(ErrorCode::EmptyInput, "events");
  const std::size_t m = points.size();
  Neighborhoods out(m);
  parallel_for(m, workers, [&](std::size_t i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = i == j ? 0.0 : haversine(points[i], points[j], earth_radius_km);
      if (d <= radius_km) out[i].push_back(j);
    }
  });
  return out;
}

inline std::vector<AnchoredCluster> clusters_from_neighborhoods(std::span<const GeoPoint> points,
                                                                Neighborhoods hoods) {
  if (hoods.size() != points.size()) {
    throw Error(ErrorCode::DimensionMismatch, "neighborhoods vs events");
  }
  std::vector<AnchoredCluster> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.push_back({i, points[i], std::move(hoods[i])});
  }
  return out;
}

/// One candidate per event, anchored at that event.
inline std::vector<AnchoredCluster> build_clusters(const std::vector<EventNode>& unobserved,
                                                   const DistanceMatrix& dm, double radius_km,
                                                   Workers workers = {}) {
  require_kind(dm, MatrixKind::Unipartite);
  if (dm.rows() != unobserved.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "matrix " + std::to_string(dm.rows()) + " vs events " +
                    std::to_string(unobserved.size()));
  }
  const auto points = locations_of(unobserved);
  return clusters_from_neighborhoods(points, neighborhoods(dm, radius_km, workers));
}

/// Greedy maximal-dense selection over candidates ranked by
/// (density desc, anchor_index asc).
inline ClusterSelection select_maximal_dense(std::vector<AnchoredCluster> candidates,
                                             std::size_t n, double radius_km) {
  if (n < 1) throw Error(ErrorCode::ValidationError, "n must be >= 1");
  if (candidates.empty()) throw Error(ErrorCode::NoCandidates, "no candidate clusters");

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto da = candidates[a].density();
    const auto db = candidates[b].density();
    if (da != db) return da > db;
    return candidates[a].anchor_index < candidates[b].anchor_index;
  });

  ClusterSelection selection;
  selection.radius_km = radius_km;
  selection.requested_n = n;
  for (auto idx : order) {
    if (selection.clusters.size() == n) break;
    auto& candidate = candidates[idx];
    const bool suppressed =
        std::any_of(selection.clusters.begin(), selection.clusters.end(),
                    [&](const AnchoredCluster& accepted) {
                      return accepted.contains(candidate.anchor_index);
                    });
    if (!suppressed) selection.clusters.push_back(std::move(candidate));
  }
  return selection;
}

/// Top-n maximal-dense clusters over the unobserved events.
inline ClusterSelection proximal_recurrence(const std::vector<EventNode>& unobserved,
                                            const NetworkConfig& config, Workers workers = {}) {
  validate(config);
  if (unobserved.empty()) throw Error(ErrorCode::EmptyInput, "unobserved");
  const auto points = locations_of(unobserved);
  auto hoods = neighborhoods_direct(points, config.radius_km, config.earth_radius_km, workers);
  return select_maximal_dense(clusters_from_neighborhoods(points, std::move(hoods)),
                              config.insert_count, config.radius_km);
}

}  // namespace stroobnet
