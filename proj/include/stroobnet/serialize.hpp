#pragma once

#include <cstdio>
#include <cstdlib>
#include <variant>
#include <string>
#include <vector>

#include "json.hpp"
#include "stroobnet/io.hpp"
#include "stroobnet/metrics.hpp"
#include "stroobnet/network.hpp"
#include "stroobnet/planner.hpp"

// JSON artifacts. Keys are sorted (nlohmann::json objects are ordered maps),
// derived reals are rounded to 9 significant digits, and coordinates are
// written with full round-trip precision so a reloaded plan places observers
// at exactly the same points.

namespace stroobnet {

using Json = nlohmann::json;

inline double round_sig9(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

/// Canonical text form: 2-space indent, newline-terminated.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json to_json(const IngestReport& r) {
  Json reasons = Json::object();
  for (const auto& [k, v] : r.rejection_reasons) reasons[k] = v;
  return {{"rows_read", r.rows_read},
          {"rows_accepted", r.rows_accepted},
          {"rows_rejected", r.rows_rejected},
          {"rejection_reasons", reasons}};
}

inline Json to_json(const CoverageStats& s) {
  return {{"observed", s.observed},
          {"unobserved", s.unobserved},
          {"fraction_observed", round_sig9(s.fraction_observed)}};
}

inline CoverageStats coverage_from_json(const Json& j) {
  return {j.at("observed").get<std::size_t>(), j.at("unobserved").get<std::size_t>(),
          j.at("fraction_observed").get<double>()};
}

struct StateSummary {
  std::size_t observer_count = 0;
  std::size_t event_count = 0;
  double radius_km = 0.0;
  std::size_t observed = 0;
  std::size_t unobserved = 0;
  std::vector<std::size_t> centrality;
  std::string fingerprint;

  friend bool operator==(const StateSummary&, const StateSummary&) = default;
};

inline StateSummary summarize(const NetworkState& state) {
  return {state.observers().size(), state.events().size(), round_sig9(state.radius_km()),
          state.observed().size(),  state.unobserved().size(), state.centrality(),
          fingerprint(state)};
}

inline Json to_json(const StateSummary& s) {
  return {{"observer_count", s.observer_count}, {"event_count", s.event_count},
          {"radius_km", s.radius_km},           {"observed", s.observed},
          {"unobserved", s.unobserved},         {"centrality", s.centrality},
          {"fingerprint", s.fingerprint}};
}

inline StateSummary state_summary_from_json(const Json& j) {
  return {j.at("observer_count").get<std::size_t>(),
          j.at("event_count").get<std::size_t>(),
          j.at("radius_km").get<double>(),
          j.at("observed").get<std::size_t>(),
          j.at("unobserved").get<std::size_t>(),
          j.at("centrality").get<std::vector<std::size_t>>(),
          j.value("fingerprint", std::string())};
}

inline Json classification_json(const NetworkState& state) {
  auto listing = [&](const std::vector<std::size_t>& idx) {
    Json arr = Json::array();
    for (auto e : idx) arr.push_back({{"index", e}, {"id", state.events()[e].id}});
    return arr;
  };
  return {{"observed", listing(state.observed())}, {"unobserved", listing(state.unobserved())}};
}

inline Json point_json(GeoPoint p) { return {{"lat", p.lat}, {"lon", p.lon}}; }

inline GeoPoint point_from_json(const Json& j) {
  return validate_geopoint(j.at("lat").get<double>(), j.at("lon").get<double>());
}

inline Json to_json(const ClusterSelection& sel) {
  Json clusters = Json::array();
  for (const auto& c : sel.clusters) {
    clusters.push_back({{"anchor_index", c.anchor_index},
                        {"anchor", point_json(c.anchor_location)},
                        {"density", c.density()},
                        {"members", c.member_indices}});
  }
  return {{"kind", "cluster_selection"},
          {"radius_km", round_sig9(sel.radius_km)},
          {"requested_n", sel.requested_n},
          {"clusters", clusters}};
}

/// Per-point assignments are left out: they can be recomputed and would
/// dominate the artifact size in iterative mode.
inline Json to_json(const BaselineResult& res) {
  Json centroids = Json::array();
  for (auto c : res.centroids) centroids.push_back(point_json(c));
  Json params = Json::object();
  if (res.params.k) params["k"] = *res.params.k;
  if (res.params.max_iters) params["max_iters"] = *res.params.max_iters;
  if (res.params.eps_km) params["eps_km"] = round_sig9(*res.params.eps_km);
  if (res.params.min_pts) params["min_pts"] = *res.params.min_pts;
  if (res.params.n) params["n"] = *res.params.n;
  if (res.params.bin_size_deg) params["bin_size_deg"] = round_sig9(*res.params.bin_size_deg);
  Json trace = Json::array();
  for (double v : res.objective_trace) trace.push_back(round_sig9(v));
  return {{"kind", to_string(res.strategy)},
          {"centroids", centroids},
          {"params", params},
          {"seed", res.seed},
          {"objective_trace", trace},
          {"iterations", res.iterations}};
}

inline SelectionSource source_from_json(const Json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "cluster_selection") {
    ClusterSelection sel;
    sel.radius_km = j.at("radius_km").get<double>();
    sel.requested_n = j.at("requested_n").get<std::size_t>();
    for (const auto& c : j.at("clusters")) {
      AnchoredCluster cluster;
      cluster.anchor_index = c.at("anchor_index").get<std::size_t>();
      cluster.anchor_location = point_from_json(c.at("anchor"));
      cluster.member_indices = c.at("members").get<std::vector<std::size_t>>();
      if (cluster.density() != c.at("density").get<std::size_t>()) {
        throw Error(ErrorCode::ValidationError, "cluster density does not match members");
      }
      sel.clusters.push_back(std::move(cluster));
    }
    return sel;
  }
  BaselineResult res;
  bool known = false;
  for (auto s : {BaselineStrategy::KMeans, BaselineStrategy::Dbscan, BaselineStrategy::Mode,
                 BaselineStrategy::Grid}) {
    if (to_string(s) == kind) {
      res.strategy = s;
      known = true;
    }
  }
  if (!known) throw Error(ErrorCode::UnknownStrategy, kind);
  for (const auto& c : j.at("centroids")) res.centroids.push_back(point_from_json(c));
  const auto& p = j.at("params");
  if (p.contains("k")) res.params.k = p["k"].get<std::size_t>();
  if (p.contains("max_iters")) res.params.max_iters = p["max_iters"].get<std::size_t>();
  if (p.contains("eps_km")) res.params.eps_km = p["eps_km"].get<double>();
  if (p.contains("min_pts")) res.params.min_pts = p["min_pts"].get<std::size_t>();
  if (p.contains("n")) res.params.n = p["n"].get<std::size_t>();
  if (p.contains("bin_size_deg")) res.params.bin_size_deg = p["bin_size_deg"].get<double>();
  res.seed = j.at("seed").get<std::uint64_t>();
  res.objective_trace = j.at("objective_trace").get<std::vector<double>>();
  res.iterations = j.at("iterations").get<std::size_t>();
  return res;
}

inline Json to_json(const InsertionPlan& plan) {
  Json nodes = Json::array();
  for (const auto& o : plan.new_observers) {
    nodes.push_back({{"id", o.id}, {"lat", o.location.lat}, {"lon", o.location.lon}});
  }
  Json sources = Json::array();
  for (const auto& src : plan.sources) {
    std::visit([&](const auto& s) { sources.push_back(to_json(s)); }, src);
  }
  return {{"strategy", to_string(plan.strategy)},
          {"mode", to_string(plan.mode)},
          {"procedure", plan.mode == InsertionMode::Batch ? "static-batch" : "iterative-extension"},
          {"seed", plan.seed},
          {"new_observers", nodes},
          {"sources", sources},
          {"state_fingerprint", plan.state_fingerprint}};
}

inline InsertionPlan plan_from_json(const Json& j) {
  InsertionPlan plan;
  plan.strategy = parse_strategy(j.at("strategy").get<std::string>());
  plan.mode = parse_mode(j.at("mode").get<std::string>());
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.state_fingerprint = j.value("state_fingerprint", std::string());
  for (const auto& n : j.at("new_observers")) {
    ObserverNode o;
    o.id = n.at("id").get<std::string>();
    o.location = point_from_json(n);
    o.membership = Membership::Planned;
    o.source = std::string(to_string(plan.strategy));
    plan.new_observers.push_back(std::move(o));
  }
  if (j.contains("sources")) {
    for (const auto& s : j.at("sources")) plan.sources.push_back(source_from_json(s));
  }
  return plan;
}

inline Json to_json(const InsertionReport& r) {
  return {{"before", to_json(r.before)},
          {"after", to_json(r.after)},
          {"new_node_degrees", r.new_node_degrees},
          {"observed_delta", r.observed_delta}};
}

inline InsertionReport report_from_json(const Json& j) {
  InsertionReport r;
  r.before = coverage_from_json(j.at("before"));
  r.after = coverage_from_json(j.at("after"));
  r.new_node_degrees = j.at("new_node_degrees").get<std::vector<std::size_t>>();
  r.observed_delta = j.at("observed_delta").get<std::size_t>();
  return r;
}

inline Json to_json(const DegreeHistogram& h) {
  return {{"bin_edges", h.bin_edges}, {"counts", h.counts}, {"source", to_string(h.source)}};
}

inline DegreeHistogram histogram_from_json(const Json& j) {
  DegreeHistogram h;
  h.bin_edges = j.at("bin_edges").get<std::vector<std::size_t>>();
  h.counts = j.at("counts").get<std::vector<std::size_t>>();
  const auto source = j.at("source").get<std::string>();
  if (source == "original") {
    h.source = HistogramSource::Original;
  } else if (source == "inserted") {
    h.source = HistogramSource::Inserted;
  } else if (source == "combined") {
    h.source = HistogramSource::Combined;
  } else {
    throw Error(ErrorCode::ValidationError, "histogram source " + source);
  }
  return h;
}

inline std::string histogram_csv(const DegreeHistogram& h) {
  std::string out = "source,bin_low,bin_high,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    out += std::string(to_string(h.source)) + "," + std::to_string(h.bin_edges[b]) + "," +
           std::to_string(h.bin_edges[b + 1]) + "," + std::to_string(h.counts[b]) + "\n";
  }
  return out;
}

inline Json to_json(const ShiftSummary& s) {
  Json j = {{"mean_before", round_sig9(s.mean_before)},
            {"mean_after", round_sig9(s.mean_after)},
            {"median_before", round_sig9(s.median_before)},
            {"median_after", round_sig9(s.median_after)},
            {"skewness_before", round_sig9(s.skewness_before)},
            {"skewness_after", round_sig9(s.skewness_after)}};
  j["inserted_mean"] = s.inserted_mean ? Json(round_sig9(*s.inserted_mean)) : Json(nullptr);
  return j;
}

inline Json to_json(const SyntheticData& d) {
  Json centers = Json::array();
  for (const auto& c : d.planted_centers) centers.push_back({{"lat", c.lat}, {"lon", c.lon}});
  return {{"observer_count", d.observers.size()},
          {"event_count", d.events.size()},
          {"planted_centers", centers}};
}

}  // namespace stroobnet
