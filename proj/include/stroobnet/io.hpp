#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <tuple>
#include <unordered_set>
#include <variant>
#include <vector>

#include "stroobnet/csv.hpp"
#include "stroobnet/distance.hpp"
#include "stroobnet/error.hpp"
#include "stroobnet/model.hpp"
#include "stroobnet/rng.hpp"

namespace stroobnet {

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_accepted = 0;
  std::size_t rows_rejected = 0;
  std::map<std::string, std::size_t> rejection_reasons;

  void reject(const std::string& reason) {
    ++rows_rejected;
    ++rejection_reasons[reason];
  }
};

/// Closed lat/lon rectangle.
struct BoundingBox {
  double min_lat = -90.0;
  double min_lon = -180.0;
  double max_lat = 90.0;
  double max_lon = 180.0;

  bool contains(GeoPoint p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
  }
};

namespace detail {

// Maps normalized header names to column positions.
class Header {
 public:
  explicit Header(const csv::Row& row) {
    for (std::size_t i = 0; i < row.size(); ++i) columns_.emplace(csv::header_key(row[i]), i);
  }
  std::optional<std::size_t> find(const std::string& name) const {
    auto it = columns_.find(name);
    if (it == columns_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t require(const std::string& name) const {
    auto col = find(name);
    if (!col) throw Error(ErrorCode::MissingColumn, name);
    return *col;
  }

 private:
  std::unordered_map<std::string, std::size_t> columns_;
};

inline std::string cell(const csv::Row& row, std::optional<std::size_t> col) {
  if (!col || *col >= row.size()) return {};
  return csv::trim(row[*col]);
}

inline std::vector<csv::Row> read_rows(std::istream& in) {
  if (!in) throw Error(ErrorCode::Unreadable, "stream");
  auto rows = csv::read_all(in);
  if (rows.empty()) throw Error(ErrorCode::Unreadable, "no header row");
  return rows;
}

// Parses and validates a coordinate pair; on failure returns the rejection
// reason instead.
inline std::variant<GeoPoint, std::string> parse_location(const std::string& lat_text,
                                                          const std::string& lon_text) {
  const auto lat = csv::parse_double(lat_text);
  if (!lat) return std::string("ParseError(lat)");
  const auto lon = csv::parse_double(lon_text);
  if (!lon) return std::string("ParseError(lon)");
  try {
    return validate_geopoint(*lat, *lon);
  } catch (const Error& e) {
    return std::string(to_string(e.code())) + "(" + e.detail().substr(0, 3) + ")";
  }
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Unreadable, path.string());
  return in;
}

}  // namespace detail

/// Observer CSV. Required columns: id, latitude, longitude. Optional:
/// membership, data_source, mobility, address, x, y (address, x and y are
/// accepted but unused).
inline std::pair<std::vector<ObserverNode>, IngestReport> load_observers_csv(std::istream& in) {
  const auto rows = detail::read_rows(in);
  const detail::Header header(rows.front());
  const auto c_id = header.require("id");
  const auto c_lat = header.require("latitude");
  const auto c_lon = header.require("longitude");
  const auto c_membership = header.find("membership");
  const auto c_source = header.find("data_source");
  const auto c_mobility = header.find("mobility");

  std::vector<ObserverNode> out;
  IngestReport report;
  std::unordered_set<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ++report.rows_read;
    if (row.size() != rows.front().size()) {
      report.reject("FieldCount");
      continue;
    }
    ObserverNode node;
    node.id = detail::cell(row, c_id);
    if (node.id.empty()) {
      report.reject("MissingId");
      continue;
    }
    if (node.id.starts_with(kPlannedIdPrefix)) {
      report.reject("ReservedId");
      continue;
    }
    auto loc = detail::parse_location(detail::cell(row, c_lat), detail::cell(row, c_lon));
    if (auto* reason = std::get_if<std::string>(&loc)) {
      report.reject(*reason);
      continue;
    }
    node.location = std::get<GeoPoint>(loc);

    const auto membership = csv::lower(detail::cell(row, c_membership));
    if (membership.empty() || membership == "city") {
      node.membership = Membership::City;
    } else if (membership == "private") {
      node.membership = Membership::Private;
    } else if (membership == "synthetic") {
      node.membership = Membership::Synthetic;
    } else if (membership == "planned") {
      node.membership = Membership::Planned;
    } else {
      report.reject("BadMembership");
      continue;
    }
    const auto mobility = csv::lower(detail::cell(row, c_mobility));
    if (mobility.empty() || mobility == "stationary") {
      node.mobility = Mobility::Stationary;
    } else if (mobility == "mobile") {
      node.mobility = Mobility::Mobile;
    } else {
      report.reject("BadMobility");
      continue;
    }
    node.source = detail::cell(row, c_source);
    if (!ids.insert(node.id).second) {
      report.reject("DuplicateId");
      continue;
    }
    out.push_back(std::move(node));
    ++report.rows_accepted;
  }
  return {std::move(out), std::move(report)};
}

inline std::pair<std::vector<ObserverNode>, IngestReport> load_observers_csv(
    const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return load_observers_csv(in);
}

/// Parses "(lat, lon)" as found in the combined geolocation column.
inline std::optional<std::pair<std::string, std::string>> split_geolocation(std::string_view text) {
  std::string t = csv::trim(text);
  if (t.size() >= 2 && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
  const auto comma = t.find(',');
  if (comma == std::string::npos) return std::nullopt;
  return std::pair{csv::trim(t.substr(0, comma)), csv::trim(t.substr(comma + 1))};
}

/// Event CSV. Required: nopd_item, and either latitude+longitude or a combined
/// geolocation column "(lat, lon)". Optional: type, type_text, priority,
/// time_create, time_dispatch, time_arrive, time_closed. Other columns are
/// ignored.
inline std::pair<std::vector<EventNode>, IngestReport> load_events_csv(std::istream& in) {
  const auto rows = detail::read_rows(in);
  const detail::Header header(rows.front());
  const auto c_id = header.require("nopd_item");
  auto c_lat = header.find("latitude");
  auto c_lon = header.find("longitude");
  const auto c_geo = header.find("geolocation");
  if (!c_geo || (c_lat && c_lon)) {
    c_lat = header.require("latitude");
    c_lon = header.require("longitude");
  }
  const auto c_type = header.find("type");
  const auto c_type_text = header.find("type_text");
  const auto c_priority = header.find("priority");
  const auto c_create = header.find("time_create");
  const auto c_dispatch = header.find("time_dispatch");
  const auto c_arrive = header.find("time_arrive");
  const auto c_closed = header.find("time_closed");
  const bool has_times = c_create || c_dispatch || c_arrive || c_closed;

  std::vector<EventNode> out;
  IngestReport report;
  std::unordered_set<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ++report.rows_read;
    if (row.size() != rows.front().size()) {
      report.reject("FieldCount");
      continue;
    }
    EventNode node;
    node.id = detail::cell(row, c_id);
    if (node.id.empty()) {
      report.reject("MissingId");
      continue;
    }
    std::string lat_text, lon_text;
    if (c_lat && c_lon) {
      lat_text = detail::cell(row, c_lat);
      lon_text = detail::cell(row, c_lon);
    } else {
      auto parts = split_geolocation(detail::cell(row, c_geo));
      if (!parts) {
        report.reject("ParseError(geolocation)");
        continue;
      }
      std::tie(lat_text, lon_text) = *parts;
    }
    auto loc = detail::parse_location(lat_text, lon_text);
    if (auto* reason = std::get_if<std::string>(&loc)) {
      report.reject(*reason);
      continue;
    }
    node.location = std::get<GeoPoint>(loc);

    const auto priority_text = detail::cell(row, c_priority);
    if (!priority_text.empty()) {
      const auto p = csv::parse_int(priority_text);
      if (!p) {
        report.reject("ParseError(priority)");
        continue;
      }
      if (*p < 0 || *p > 3) {
        report.reject("OutOfRange(priority)");
        continue;
      }
      node.priority = static_cast<int>(*p);
    }
    node.event_type = detail::cell(row, c_type);
    node.type_text = detail::cell(row, c_type_text);
    if (has_times) {
      node.timestamps = EventTimestamps{detail::cell(row, c_create), detail::cell(row, c_dispatch),
                                        detail::cell(row, c_arrive), detail::cell(row, c_closed)};
    }
    if (!ids.insert(node.id).second) {
      report.reject("DuplicateId");
      continue;
    }
    out.push_back(std::move(node));
    ++report.rows_accepted;
  }
  return {std::move(out), std::move(report)};
}

inline std::pair<std::vector<EventNode>, IngestReport> load_events_csv(
    const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return load_events_csv(in);
}

/// One type code per line; blank lines and '#' comments are skipped.
inline std::set<std::string> load_type_allowlist(std::istream& in) {
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto code = csv::trim(line);
    if (!code.empty() && code.back() == '\r') code.pop_back();
    if (!code.empty()) out.insert(code);
  }
  return out;
}

/// Keeps events whose type is in the allowlist (empty = all types) and whose
/// location lies inside bbox when one is given.
inline std::vector<EventNode> filter_events(const std::vector<EventNode>& events,
                                            const std::set<std::string>& type_allowlist,
                                            const std::optional<BoundingBox>& bbox) {
  std::vector<EventNode> out;
  for (const auto& e : events) {
    if (!type_allowlist.empty() && !type_allowlist.contains(e.event_type)) continue;
    if (bbox && !bbox->contains(e.location)) continue;
    out.push_back(e);
  }
  return out;
}

struct PlantedCluster {
  GeoPoint center;
  std::size_t count = 0;
  double spread_km = 0.0;
};

struct SyntheticSpec {
  std::size_t n_observers = 0;
  std::size_t n_background_events = 0;
  std::vector<PlantedCluster> planted_clusters;
  BoundingBox bounding_box;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  std::vector<ObserverNode> observers;
  std::vector<EventNode> events;
  std::vector<GeoPoint> planted_centers;
};

namespace detail {

inline void validate_spec(const SyntheticSpec& spec) {
  const auto& b = spec.bounding_box;
  auto fail = [](const std::string& why) { throw Error(ErrorCode::ImpossibleSpec, why); };
  try {
    validate_geopoint(b.min_lat, b.min_lon);
    validate_geopoint(b.max_lat, b.max_lon);
  } catch (const Error&) {
    fail("bounding box outside coordinate range");
  }
  if (b.min_lat > b.max_lat || b.min_lon > b.max_lon) fail("bounding box min exceeds max");
  const bool zero_area = b.min_lat == b.max_lat || b.min_lon == b.max_lon;
  if (zero_area && (spec.n_observers > 0 || spec.n_background_events > 0)) {
    fail("zero-area bounding box with uniform draws");
  }
  for (const auto& c : spec.planted_clusters) {
    if (!b.contains(c.center)) fail("planted center outside bounding box");
    if (!(c.spread_km >= 0.0) || !std::isfinite(c.spread_km)) fail("spread_km must be >= 0");
  }
}

inline GeoPoint uniform_in(const BoundingBox& b, CounterRng& rng) {
  return {rng.uniform(b.min_lat, b.max_lat), rng.uniform(b.min_lon, b.max_lon)};
}

// Rejection-samples a point within spread_km (haversine) of center.
inline GeoPoint sample_near(GeoPoint center, double spread_km, CounterRng& rng) {
  if (spread_km == 0.0) return center;
  const double dlat = spread_km / (kEarthRadiusKm * std::numbers::pi / 180.0);
  const double cos_lat = std::cos(center.lat * std::numbers::pi / 180.0);
  const double dlon = cos_lat > 1e-9 ? std::min(180.0, dlat / cos_lat) : 180.0;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const GeoPoint p{rng.uniform(center.lat - dlat, center.lat + dlat),
                     rng.uniform(center.lon - dlon, center.lon + dlon)};
    if (p.lat < -90.0 || p.lat > 90.0 || p.lon < -180.0 || p.lon > 180.0) continue;
    if (haversine(center, p) <= spread_km) return p;
  }
  throw Error(ErrorCode::ImpossibleSpec, "cannot sample within spread");
}

inline std::string padded(std::string_view prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", i);
  return std::string(prefix) + buf;
}

}  // namespace detail

/// Seeded synthetic layout: uniform observers and background events in the
/// bounding box plus planted clusters. Each draw family uses its own random
/// stream, so e.g. adding observers does not move the events.
inline SyntheticData synth_generate(const SyntheticSpec& spec) {
  detail::validate_spec(spec);
  const CounterRng root(spec.seed, "synth");
  SyntheticData data;

  auto observer_rng = root.split("observers");
  for (std::size_t i = 0; i < spec.n_observers; ++i) {
    ObserverNode node;
    node.id = detail::padded("O", i);
    node.location = detail::uniform_in(spec.bounding_box, observer_rng);
    node.membership = Membership::Synthetic;
    node.source = "synthetic";
    data.observers.push_back(std::move(node));
  }

  std::size_t next_event = 0;
  auto background_rng = root.split("background");
  for (std::size_t i = 0; i < spec.n_background_events; ++i) {
    EventNode e;
    e.id = detail::padded("E", next_event++);
    e.location = detail::uniform_in(spec.bounding_box, background_rng);
    e.event_type = "BG";
    e.type_text = "background";
    data.events.push_back(std::move(e));
  }
  for (std::size_t c = 0; c < spec.planted_clusters.size(); ++c) {
    const auto& cluster = spec.planted_clusters[c];
    auto rng = root.split("cluster-" + std::to_string(c));
    for (std::size_t i = 0; i < cluster.count; ++i) {
      EventNode e;
      e.id = detail::padded("E", next_event++);
      e.location = detail::sample_near(cluster.center, cluster.spread_km, rng);
      e.event_type = "PC";
      e.type_text = "planted cluster " + std::to_string(c);
      data.events.push_back(std::move(e));
    }
    data.planted_centers.push_back(cluster.center);
  }
  return data;
}

/// Planted centers drawn uniformly from the box shrunk by `margin_deg`.
inline std::vector<PlantedCluster> random_planted_clusters(const BoundingBox& box, std::size_t k,
                                                           std::size_t count, double spread_km,
                                                           std::uint64_t seed,
                                                           double margin_deg = 0.0) {
  CounterRng rng(seed, "planted-centers");
  BoundingBox inner{box.min_lat + margin_deg, box.min_lon + margin_deg, box.max_lat - margin_deg,
                    box.max_lon - margin_deg};
  if (inner.min_lat > inner.max_lat || inner.min_lon > inner.max_lon) inner = box;
  std::vector<PlantedCluster> out;
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back({detail::uniform_in(inner, rng), count, spread_km});
  }
  return out;
}

inline std::string format_coordinate(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_observers_csv(std::ostream& out, const std::vector<ObserverNode>& observers) {
  out << "id,membership,data_source,mobility,address,latitude,longitude,x,y\n";
  for (const auto& o : observers) {
    out << csv::escape(o.id) << ',' << to_string(o.membership) << ',' << csv::escape(o.source)
        << ',' << to_string(o.mobility) << ",," << format_coordinate(o.location.lat) << ','
        << format_coordinate(o.location.lon) << ",,\n";
  }
}

inline void write_events_csv(std::ostream& out, const std::vector<EventNode>& events) {
  out << "nopd_item,type,type_text,priority,latitude,longitude\n";
  for (const auto& e : events) {
    out << csv::escape(e.id) << ',' << csv::escape(e.event_type) << ',' << csv::escape(e.type_text)
        << ',' << (e.priority ? std::to_string(*e.priority) : std::string()) << ','
        << format_coordinate(e.location.lat) << ',' << format_coordinate(e.location.lon) << '\n';
  }
}

/// Writes to a temporary sibling and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Unreadable, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::Unreadable, "write failed " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace stroobnet
