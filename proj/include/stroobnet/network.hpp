#pragma once

#include <atomic>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "stroobnet/distance.hpp"
#include "stroobnet/error.hpp"
#include "stroobnet/model.hpp"

namespace stroobnet {

struct Link {
  std::size_t observer;
  std::size_t event;

  friend auto operator<=>(const Link&, const Link&) = default;
};

/// Observer-event pairs within range, sorted by (observer, event).
struct LinkSet {
  std::vector<Link> links;

  std::size_t size() const noexcept { return links.size(); }
  friend bool operator==(const LinkSet&, const LinkSet&) = default;
};

struct EventPartition {
  std::vector<std::size_t> observed;
  std::vector<std::size_t> unobserved;
};

/// Pairs with distance <= radius_km. A distance exactly equal to the radius
/// is a link.
inline LinkSet link_set(const DistanceMatrix& dm, double radius_km) {
  require_kind(dm, MatrixKind::Bipartite);
  LinkSet out;
  for (std::size_t o = 0; o < dm.rows(); ++o) {
    const auto row = dm.row(o);
    for (std::size_t e = 0; e < row.size(); ++e) {
      if (row[e] <= radius_km) out.links.push_back({o, e});
    }
  }
  return out;
}

/// Degree of every observer: the number of events within radius_km.
inline std::vector<std::size_t> observer_centrality(const DistanceMatrix& dm, double radius_km) {
  require_kind(dm, MatrixKind::Bipartite);
  std::vector<std::size_t> counts(dm.rows(), 0);
  for (std::size_t o = 0; o < dm.rows(); ++o) {
    for (double d : dm.row(o)) counts[o] += d <= radius_km ? 1 : 0;
  }
  return counts;
}

inline std::vector<std::size_t> event_observations(const DistanceMatrix& dm, double radius_km) {
  require_kind(dm, MatrixKind::Bipartite);
  std::vector<std::size_t> counts(dm.cols(), 0);
  for (std::size_t o = 0; o < dm.rows(); ++o) {
    const auto row = dm.row(o);
    for (std::size_t e = 0; e < row.size(); ++e) counts[e] += row[e] <= radius_km ? 1 : 0;
  }
  return counts;
}

inline EventPartition classify_events(const DistanceMatrix& dm, double radius_km) {
  const auto observations = event_observations(dm, radius_km);
  EventPartition out;
  for (std::size_t e = 0; e < observations.size(); ++e) {
    (observations[e] > 0 ? out.observed : out.unobserved).push_back(e);
  }
  return out;
}

namespace detail {
inline std::atomic<std::uint64_t>& states_checked() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}
}  // namespace detail

/// Number of NetworkState objects whose invariants have been verified in this
/// process. Every construction is checked; a failure throws instead.
inline std::uint64_t network_states_checked() { return detail::states_checked().load(); }

/// Immutable snapshot of the observer-event network.
class NetworkState {
 public:
  NetworkState(std::vector<ObserverNode> observers, std::vector<EventNode> events,
               double radius_km, LinkSet links, std::vector<std::size_t> centrality,
               std::vector<std::size_t> observations, EventPartition partition)
      : observers_(std::move(observers)),
        events_(std::move(events)),
        radius_km_(radius_km),
        links_(std::move(links)),
        centrality_(std::move(centrality)),
        observations_(std::move(observations)),
        partition_(std::move(partition)) {
    check_invariants();
  }

  const std::vector<ObserverNode>& observers() const noexcept { return observers_; }
  const std::vector<EventNode>& events() const noexcept { return events_; }
  double radius_km() const noexcept { return radius_km_; }
  const LinkSet& links() const noexcept { return links_; }
  const std::vector<std::size_t>& centrality() const noexcept { return centrality_; }
  const std::vector<std::size_t>& observations() const noexcept { return observations_; }
  const std::vector<std::size_t>& observed() const noexcept { return partition_.observed; }
  const std::vector<std::size_t>& unobserved() const noexcept { return partition_.unobserved; }

  std::vector<EventNode> unobserved_events() const {
    std::vector<EventNode> out;
    out.reserve(partition_.unobserved.size());
    for (auto e : partition_.unobserved) out.push_back(events_[e]);
    return out;
  }

 private:
  void check_invariants() const {
    auto fail = [](const char* what) { throw Error(ErrorCode::InvariantViolation, what); };
    if (centrality_.size() != observers_.size()) fail("centrality size");
    if (observations_.size() != events_.size()) fail("observations size");

    std::vector<char> seen(events_.size(), 0);
    for (auto e : partition_.observed) {
      if (e >= events_.size() || seen[e]) fail("partition overlap");
      if (observations_[e] == 0) fail("observed event without observation");
      seen[e] = 1;
    }
    for (auto e : partition_.unobserved) {
      if (e >= events_.size() || seen[e]) fail("partition overlap");
      if (observations_[e] != 0) fail("unobserved event with observation");
      seen[e] = 1;
    }
    if (partition_.observed.size() + partition_.unobserved.size() != events_.size()) {
      fail("partition not exhaustive");
    }

    std::uint64_t degree_sum = 0;
    for (auto c : centrality_) degree_sum += c;
    std::uint64_t observation_sum = 0;
    for (auto c : observations_) observation_sum += c;
    if (degree_sum != links_.size() || observation_sum != links_.size()) fail("handshake");

    std::vector<std::size_t> per_observer(observers_.size(), 0);
    for (const auto& link : links_.links) {
      if (link.observer >= observers_.size() || link.event >= events_.size()) fail("link index");
      ++per_observer[link.observer];
    }
    if (per_observer != centrality_) fail("centrality != incident links");
    ++detail::states_checked();
  }

  std::vector<ObserverNode> observers_;
  std::vector<EventNode> events_;
  double radius_km_;
  LinkSet links_;
  std::vector<std::size_t> centrality_;
  std::vector<std::size_t> observations_;
  EventPartition partition_;
};

inline NetworkState init_stroobnet(std::vector<ObserverNode> observers,
                                   std::vector<EventNode> events,
                                   const NetworkConfig& config, Workers workers = {}) {
  validate(config);
  require_unique_ids(observers, "observer");
  require_unique_ids(events, "event");
  const auto dm = bipartite_matrix(observers, events, config.earth_radius_km, workers);
  auto links = link_set(dm, config.radius_km);
  auto centrality = observer_centrality(dm, config.radius_km);
  auto observations = event_observations(dm, config.radius_km);
  auto partition = classify_events(dm, config.radius_km);
  return NetworkState(std::move(observers), std::move(events), config.radius_km,
                      std::move(links), std::move(centrality), std::move(observations),
                      std::move(partition));
}

/// FNV-1a digest of node ids, coordinates and radius; identifies the state a
/// plan was computed against.
inline std::string fingerprint(const NetworkState& state) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_bytes = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  auto mix_double = [&](double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    mix_bytes(&bits, sizeof bits);
  };
  auto mix_string = [&](const std::string& s) {
    mix_bytes(s.data(), s.size());
    const char sep = '\x1f';
    mix_bytes(&sep, 1);
  };
  mix_double(state.radius_km());
  for (const auto& o : state.observers()) {
    mix_string(o.id);
    mix_double(o.location.lat);
    mix_double(o.location.lon);
  }
  const char group = '\x1e';
  mix_bytes(&group, 1);
  for (const auto& e : state.events()) {
    mix_string(e.id);
    mix_double(e.location.lat);
    mix_double(e.location.lon);
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace stroobnet
