#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "stroobnet/error.hpp"
#include "stroobnet/model.hpp"
#include "stroobnet/parallel.hpp"

namespace stroobnet {

/// Great-circle distance in kilometers on a sphere of the given radius.
///
/// The arguments are put in a canonical order before evaluation, so
/// haversine(a, b) and haversine(b, a) are bit-identical. Clusters, links and
/// planner degrees all compare distances against the same radius and rely on
/// that.
inline double haversine(GeoPoint a, GeoPoint b, double earth_radius_km = kEarthRadiusKm) {
  if (b.lat < a.lat || (b.lat == a.lat && b.lon < a.lon)) std::swap(a, b);
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * kDeg;
  const double dlon = (b.lon - a.lon) * kDeg;
  const double s_lat = std::sin(dlat / 2.0);
  const double s_lon = std::sin(dlon / 2.0);
  double h = s_lat * s_lat + std::cos(a.lat * kDeg) * std::cos(b.lat * kDeg) * s_lon * s_lon;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * earth_radius_km * std::asin(std::sqrt(h));
}

enum class MatrixKind { Bipartite, Unipartite };

/// Dense row-major kilometer distances. Bipartite: observers x events.
/// Unipartite: events x events, symmetric with a zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix(std::size_t rows, std::size_t cols, MatrixKind kind)
      : rows_(rows), cols_(cols), kind_(kind), values_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  MatrixKind kind() const noexcept { return kind_; }

  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  MatrixKind kind_;
  std::vector<double> values_;
};

inline void require_kind(const DistanceMatrix& dm, MatrixKind kind) {
  if (dm.kind() != kind) {
    throw Error(ErrorCode::KindMismatch,
                kind == MatrixKind::Bipartite ? "expected bipartite" : "expected unipartite");
  }
}

inline DistanceMatrix bipartite_matrix(std::span<const GeoPoint> observers,
                                       std::span<const GeoPoint> events,
                                       double earth_radius_km = kEarthRadiusKm,
                                       Workers workers = {}) {
  if (observers.empty()) throw Error(ErrorCode::EmptyInput, "observers");
  if (events.empty()) throw Error(ErrorCode::EmptyInput, "events");
  DistanceMatrix dm(observers.size(), events.size(), MatrixKind::Bipartite);
  parallel_for(observers.size(), workers, [&](std::size_t i) {
    for (std::size_t j = 0; j < events.size(); ++j) {
      dm(i, j) = haversine(observers[i], events[j], earth_radius_km);
    }
  });
  return dm;
}

inline DistanceMatrix bipartite_matrix(const std::vector<ObserverNode>& observers,
                                       const std::vector<EventNode>& events,
                                       double earth_radius_km = kEarthRadiusKm,
                                       Workers workers = {}) {
  const auto o = locations_of(observers);
  const auto e = locations_of(events);
  return bipartite_matrix(std::span<const GeoPoint>(o), std::span<const GeoPoint>(e),
                          earth_radius_km, workers);
}

/// Upper triangle is computed once and mirrored.
inline DistanceMatrix unipartite_matrix(std::span<const GeoPoint> points,
                                        double earth_radius_km = kEarthRadiusKm,
                                        Workers workers = {}) {
  if (points.empty()) throw Error(ErrorCode::EmptyInput, "events");
  const std::size_t m = points.size();
  DistanceMatrix dm(m, m, MatrixKind::Unipartite);
  parallel_for(m, workers, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      dm(i, j) = haversine(points[i], points[j], earth_radius_km);
    }
  });
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) dm(j, i) = dm(i, j);
  }
  return dm;
}

inline DistanceMatrix unipartite_matrix(const std::vector<EventNode>& events,
                                        double earth_radius_km = kEarthRadiusKm,
                                        Workers workers = {}) {
  const auto p = locations_of(events);
  return unipartite_matrix(std::span<const GeoPoint>(p), earth_radius_km, workers);
}

}  // namespace stroobnet
