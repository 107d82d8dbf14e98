#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stroobnet/baselines.hpp"
#include "stroobnet/error.hpp"
#include "stroobnet/metrics.hpp"
#include "stroobnet/model.hpp"
#include "stroobnet/network.hpp"
#include "stroobnet/proxrec.hpp"

namespace stroobnet {

enum class Strategy { ProximalRecurrence, KMeans, Dbscan, Mode, Grid };

inline constexpr Strategy kAllStrategies[] = {Strategy::ProximalRecurrence, Strategy::KMeans,
                                              Strategy::Dbscan, Strategy::Mode, Strategy::Grid};

constexpr std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::ProximalRecurrence: return "proximal_recurrence";
    case Strategy::KMeans: return "kmeans";
    case Strategy::Dbscan: return "dbscan";
    case Strategy::Mode: return "mode";
    case Strategy::Grid: return "grid";
  }
  return "proximal_recurrence";
}

inline Strategy parse_strategy(std::string_view name) {
  for (auto s : kAllStrategies) {
    if (to_string(s) == name) return s;
  }
  if (name == "proxrec" || name == "proximal-recurrence") return Strategy::ProximalRecurrence;
  throw Error(ErrorCode::UnknownStrategy, std::string(name));
}

enum class InsertionMode { Batch, Iterative };

constexpr std::string_view to_string(InsertionMode m) {
  return m == InsertionMode::Batch ? "batch" : "iterative";
}

inline InsertionMode parse_mode(std::string_view name) {
  if (name == "batch") return InsertionMode::Batch;
  if (name == "iterative") return InsertionMode::Iterative;
  throw Error(ErrorCode::ValidationError, "mode=" + std::string(name));
}

inline constexpr std::size_t kDefaultMinPts = 3;
inline constexpr std::size_t kDefaultMaxIters = 100;
inline constexpr double kDefaultBinSizeDeg = 0.002;

/// Strategy parameters; unset values fall back to the config
/// (k -> insert_count, eps_km -> radius_km) or to the defaults above.
struct StrategyParams {
  std::optional<std::size_t> k;
  std::size_t max_iters = kDefaultMaxIters;
  std::optional<double> eps_km;
  std::size_t min_pts = kDefaultMinPts;
  double bin_size_deg = kDefaultBinSizeDeg;
};

using SelectionSource = std::variant<ClusterSelection, BaselineResult>;

struct InsertionPlan {
  Strategy strategy = Strategy::ProximalRecurrence;
  InsertionMode mode = InsertionMode::Batch;
  std::uint64_t seed = 0;
  std::vector<ObserverNode> new_observers;
  // One entry in batch mode; one per step in iterative mode, with indices
  // relative to the unobserved sequence at that step.
  std::vector<SelectionSource> sources;
  std::string state_fingerprint;
};

struct InsertionReport {
  CoverageStats before;
  CoverageStats after;
  std::vector<std::size_t> new_node_degrees;  // against the original unobserved set
  std::size_t observed_delta = 0;
};

namespace detail {

inline ObserverNode planned_observer(Strategy strategy, std::size_t index, GeoPoint at) {
  ObserverNode node;
  node.id = std::string(kPlannedIdPrefix) + std::string(to_string(strategy)) + ":" + std::to_string(index);
  node.location = at;
  node.membership = Membership::Planned;
  node.source = std::string(to_string(strategy));
  return node;
}

// Runs one strategy over the given events and returns up to n placement
// points together with the raw selection.
inline std::pair<std::vector<GeoPoint>, SelectionSource> run_strategy(
    Strategy strategy, const std::vector<EventNode>& events, std::size_t n,
    const StrategyParams& params, const NetworkConfig& config, std::uint64_t seed,
    Workers workers) {
  const auto points = locations_of(events);
  std::vector<GeoPoint> placements;
  switch (strategy) {
    case Strategy::ProximalRecurrence: {
      NetworkConfig c = config;
      c.insert_count = n;
      auto selection = proximal_recurrence(events, c, workers);
      for (const auto& cl : selection.clusters) placements.push_back(cl.anchor_location);
      return {std::move(placements), std::move(selection)};
    }
    case Strategy::KMeans: {
      const std::size_t k = std::min(params.k.value_or(n), points.size());
      auto result = kmeans(points, k, params.max_iters, seed);
      placements = result.centroids;
      if (placements.size() > n) placements.resize(n);
      return {std::move(placements), std::move(result)};
    }
    case Strategy::Dbscan: {
      // A minimum cluster size above the population would make every point
      // noise regardless of layout.
      const std::size_t min_pts = std::min(params.min_pts, points.size());
      auto result = dbscan_with_centroids(points, params.eps_km.value_or(config.radius_km),
                                          min_pts, workers);
      result.seed = seed;
      // Largest clusters first (label order on ties) so truncation to n keeps
      // the best-supported centroids.
      std::vector<std::size_t> size(result.centroids.size(), 0);
      for (int l : result.assignments) {
        if (l != kNoise) ++size[static_cast<std::size_t>(l)];
      }
      std::vector<std::size_t> order(size.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return size[a] > size[b]; });
      if (order.size() > n) order.resize(n);
      for (auto c : order) placements.push_back(result.centroids[c]);
      return {std::move(placements), std::move(result)};
    }
    case Strategy::Mode: {
      auto result = mode_clustering(points, n);
      result.seed = seed;
      placements = result.centroids;
      return {std::move(placements), std::move(result)};
    }
    case Strategy::Grid: {
      auto result = grid_binning(points, params.bin_size_deg, n);
      result.seed = seed;
      placements = result.centroids;
      return {std::move(placements), std::move(result)};
    }
  }
  throw Error(ErrorCode::UnknownStrategy, "strategy");
}

// Iterative proximal recurrence without recomputing distances each step:
// neighborhoods over the original unobserved set are computed once and
// densities are decremented as events become covered. Each step picks the
// same anchor the full n = 1 pipeline would pick on the remaining events.
inline void iterative_proximal(const std::vector<EventNode>& unobserved, const NetworkConfig& config,
                               Workers workers, InsertionPlan& plan) {
  const auto points = locations_of(unobserved);
  const auto hoods =
      neighborhoods_direct(points, config.radius_km, config.earth_radius_km, workers);
  const std::size_t m = points.size();
  std::vector<char> alive(m, 1);
  std::vector<std::size_t> density(m);
  for (std::size_t i = 0; i < m; ++i) density[i] = hoods[i].size();
  std::size_t remaining = m;

  for (std::size_t step = 0; step < config.insert_count && remaining > 0; ++step) {
    std::size_t anchor = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (alive[i] && (anchor == m || density[i] > density[anchor])) anchor = i;
    }
    // Position of every alive event in the current (shrinking) sequence.
    std::vector<std::size_t> position(m, 0);
    for (std::size_t i = 0, p = 0; i < m; ++i) {
      if (alive[i]) position[i] = p++;
    }
    AnchoredCluster cluster;
    cluster.anchor_index = position[anchor];
    cluster.anchor_location = points[anchor];
    std::vector<std::size_t> covered;
    for (auto j : hoods[anchor]) {
      if (alive[j]) {
        covered.push_back(j);
        cluster.member_indices.push_back(position[j]);
      }
    }
    for (auto j : covered) {
      alive[j] = 0;
      --remaining;
      for (auto k : hoods[j]) --density[k];
    }
    plan.new_observers.push_back(planned_observer(plan.strategy, step, points[anchor]));
    plan.sources.emplace_back(ClusterSelection{{std::move(cluster)}, config.radius_km, 1});
  }
}

// Generic iterative mode: rerun the strategy with n = 1 on the events still
// unobserved, place one observer, drop the events it covers.
inline void iterative_baseline(std::vector<EventNode> unobserved, const StrategyParams& params,
                               const NetworkConfig& config, std::uint64_t seed, Workers workers,
                               InsertionPlan& plan) {
  StrategyParams step_params = params;
  step_params.k = 1;
  for (std::size_t step = 0; step < config.insert_count && !unobserved.empty(); ++step) {
    auto [placements, source] =
        run_strategy(plan.strategy, unobserved, 1, step_params, config, seed + step, workers);
    if (placements.empty()) break;
    const GeoPoint at = placements.front();
    plan.new_observers.push_back(planned_observer(plan.strategy, step, at));
    plan.sources.push_back(std::move(source));
    std::erase_if(unobserved, [&](const EventNode& e) {
      return haversine(at, e.location, config.earth_radius_km) <= config.radius_km;
    });
  }
}

}  // namespace detail

inline InsertionPlan plan_insertions(const NetworkState& state, Strategy strategy,
                                     const StrategyParams& params, const NetworkConfig& config,
                                     InsertionMode mode, std::uint64_t seed, Workers workers = {}) {
  validate(config);
  if (state.unobserved().empty()) throw Error(ErrorCode::NothingUnobserved, "all events observed");
  InsertionPlan plan;
  plan.strategy = strategy;
  plan.mode = mode;
  plan.seed = seed;
  plan.state_fingerprint = fingerprint(state);

  auto unobserved = state.unobserved_events();
  if (mode == InsertionMode::Batch) {
    auto [placements, source] = detail::run_strategy(strategy, unobserved, config.insert_count,
                                                     params, config, seed, workers);
    for (std::size_t i = 0; i < placements.size(); ++i) {
      plan.new_observers.push_back(detail::planned_observer(strategy, i, placements[i]));
    }
    plan.sources.push_back(std::move(source));
  } else if (strategy == Strategy::ProximalRecurrence) {
    detail::iterative_proximal(unobserved, config, workers, plan);
  } else {
    detail::iterative_baseline(unobserved, params, config, seed, workers, plan);
  }

  // Continue numbering after planned observers already in the state so that
  // repeated rounds never reuse an id.
  const auto existing = static_cast<std::size_t>(
      std::count_if(state.observers().begin(), state.observers().end(), [](const ObserverNode& o) {
        return std::string_view(o.id).starts_with(kPlannedIdPrefix);
      }));
  for (std::size_t i = 0; i < plan.new_observers.size(); ++i) {
    plan.new_observers[i] = detail::planned_observer(strategy, existing + i,
                                                     plan.new_observers[i].location);
  }
  return plan;
}


/// Rebuilds the network with the planned observers added and reports the
/// coverage change. Throws StateMismatch when the plan was made for another
/// state.
inline std::pair<NetworkState, InsertionReport> apply_insertions(const NetworkState& state,
                                                                 const InsertionPlan& plan,
                                                                 const NetworkConfig& config,
                                                                 Workers workers = {}) {
  validate(config);
  if (plan.state_fingerprint != fingerprint(state)) {
    throw Error(ErrorCode::StateMismatch, "plan fingerprint " + plan.state_fingerprint);
  }
  if (config.radius_km != state.radius_km()) {
    throw Error(ErrorCode::StateMismatch, "radius differs from state");
  }
  auto observers = state.observers();
  observers.insert(observers.end(), plan.new_observers.begin(), plan.new_observers.end());
  auto after = init_stroobnet(std::move(observers), state.events(), config, workers);

  // Adding observers can only add observations.
  for (auto e : state.observed()) {
    if (after.observations()[e] == 0) {
      throw Error(ErrorCode::InvariantViolation, "coverage shrank at event " + std::to_string(e));
    }
  }

  InsertionReport report;
  report.before = coverage_stats(state);
  report.after = coverage_stats(after);
  report.observed_delta = report.after.observed - report.before.observed;
  report.new_node_degrees.reserve(plan.new_observers.size());
  for (const auto& node : plan.new_observers) {
    std::size_t degree = 0;
    for (auto e : state.unobserved()) {
      if (haversine(node.location, state.events()[e].location, config.earth_radius_km) <=
          config.radius_km) {
        ++degree;
      }
    }
    report.new_node_degrees.push_back(degree);
  }
  return {std::move(after), std::move(report)};
}

}  // namespace stroobnet
