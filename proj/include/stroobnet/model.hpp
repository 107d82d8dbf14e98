#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "stroobnet/error.hpp"

namespace stroobnet {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kDefaultRadiusKm = 0.2;
inline constexpr std::size_t kDefaultInsertCount = 100;

/// Id prefix reserved for observers created by the planner.
inline constexpr std::string_view kPlannedIdPrefix = "planned:";

/// WGS84 coordinate in degrees. Values are stored as given; no longitude
/// wrapping is applied.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Validating constructor for GeoPoint.
inline GeoPoint validate_geopoint(double lat, double lon) {
  if (!std::isfinite(lat)) throw Error(ErrorCode::NonFinite, "lat");
  if (!std::isfinite(lon)) throw Error(ErrorCode::NonFinite, "lon");
  if (lat < -90.0 || lat > 90.0) {
    throw Error(ErrorCode::OutOfRange, "lat=" + std::to_string(lat));
  }
  if (lon < -180.0 || lon > 180.0) {
    throw Error(ErrorCode::OutOfRange, "lon=" + std::to_string(lon));
  }
  return GeoPoint{lat, lon};
}

enum class Membership { City, Private, Synthetic, Planned };
enum class Mobility { Stationary, Mobile };

constexpr std::string_view to_string(Membership m) {
  switch (m) {
    case Membership::City: return "city";
    case Membership::Private: return "private";
    case Membership::Synthetic: return "synthetic";
    case Membership::Planned: return "planned";
  }
  return "city";
}

constexpr std::string_view to_string(Mobility m) {
  return m == Mobility::Mobile ? "mobile" : "stationary";
}

struct ObserverNode {
  std::string id;
  GeoPoint location;
  Membership membership = Membership::City;
  std::string source;
  // Ingested for completeness; single-snapshot analysis ignores it.
  Mobility mobility = Mobility::Stationary;
};

struct EventTimestamps {
  std::string create;
  std::string dispatch;
  std::string arrive;
  std::string closed;
};

struct EventNode {
  std::string id;
  GeoPoint location;
  std::string event_type;
  std::string type_text;
  std::optional<int> priority;  // 3 (highest) .. 0
  std::optional<EventTimestamps> timestamps;
};

struct NetworkConfig {
  double radius_km = kDefaultRadiusKm;
  std::size_t insert_count = kDefaultInsertCount;
  double earth_radius_km = kEarthRadiusKm;
};

inline void validate(const NetworkConfig& config) {
  if (!(config.radius_km > 0.0) || !std::isfinite(config.radius_km)) {
    throw Error(ErrorCode::ValidationError, "radius_km must be > 0");
  }
  if (config.insert_count < 1) {
    throw Error(ErrorCode::ValidationError, "insert_count must be >= 1");
  }
  if (!(config.earth_radius_km > 0.0) || !std::isfinite(config.earth_radius_km)) {
    throw Error(ErrorCode::ValidationError, "earth_radius_km must be > 0");
  }
}

inline NetworkConfig default_config() { return NetworkConfig{}; }

/// Field-wise override of the defaults; unset fields keep their default.
inline NetworkConfig make_config(std::optional<double> radius_km,
                                 std::optional<std::size_t> insert_count,
                                 std::optional<double> earth_radius_km = std::nullopt) {
  NetworkConfig config = default_config();
  if (radius_km) config.radius_km = *radius_km;
  if (insert_count) config.insert_count = *insert_count;
  if (earth_radius_km) config.earth_radius_km = *earth_radius_km;
  validate(config);
  return config;
}

template <typename Node>
void require_unique_ids(const std::vector<Node>& nodes, std::string_view what) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(nodes.size());
  for (const auto& node : nodes) {
    if (!seen.insert(node.id).second) {
      throw Error(ErrorCode::DuplicateId, std::string(what) + ":" + node.id);
    }
  }
}

inline void validate_priority(int priority) {
  if (priority < 0 || priority > 3) {
    throw Error(ErrorCode::OutOfRange, "priority=" + std::to_string(priority));
  }
}

template <typename Node>
std::vector<GeoPoint> locations_of(const std::vector<Node>& nodes) {
  std::vector<GeoPoint> out;
  out.reserve(nodes.size());
  for (const auto& node : nodes) out.push_back(node.location);
  return out;
}

}  // namespace stroobnet
