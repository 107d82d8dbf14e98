#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "stroobnet/proxrec.hpp"

using namespace stroobnet;

namespace {

// Offsets a point by roughly `km` kilometers north.
GeoPoint north(GeoPoint p, double km) { return {p.lat + km / 111.19492664455873, p.lon}; }
GeoPoint east(GeoPoint p, double km) {
  return {p.lat, p.lon + km / (111.19492664455873 * std::cos(p.lat * std::numbers::pi / 180.0))};
}

const GeoPoint kBase{29.95, -90.08};

std::vector<GeoPoint> isolated_points(std::size_t n) {
  std::vector<GeoPoint> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(east(kBase, 1.0 * static_cast<double>(i)));
  return pts;
}

}  // namespace

TEST(Neighborhoods, IsolatedPointsOnlyContainThemselves) {
  const auto hoods = neighborhoods(unipartite_matrix(isolated_points(5)), 0.2);
  for (std::size_t i = 0; i < hoods.size(); ++i) EXPECT_EQ(hoods[i], std::vector<std::size_t>{i});
}

TEST(Neighborhoods, ColocatedPointsSeeEachOther) {
  const std::vector<GeoPoint> pts(4, kBase);
  for (const auto& n : neighborhoods(unipartite_matrix(pts), 0.2)) {
    EXPECT_EQ(n, (std::vector<std::size_t>{0, 1, 2, 3}));
  }
}

TEST(Neighborhoods, MatchesThresholdScanAndIsSymmetric) {
  std::mt19937_64 gen(21);
  const auto pts = oracle::clumpy_points(gen, 10);
  const auto hoods = neighborhoods(unipartite_matrix(pts), 0.2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<std::size_t> want;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (haversine(pts[i], pts[j]) <= 0.2) want.push_back(j);
    }
    EXPECT_EQ(hoods[i], want);
    for (auto j : hoods[i]) {
      EXPECT_TRUE(std::binary_search(hoods[j].begin(), hoods[j].end(), i));
    }
  }
}

TEST(Neighborhoods, DirectPathEqualsMatrixPath) {
  std::mt19937_64 gen(22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = oracle::clumpy_points(gen, 150);
    EXPECT_EQ(neighborhoods(unipartite_matrix(pts), 0.2),
              neighborhoods_direct(pts, 0.2, kEarthRadiusKm, Workers{3}));
  }
}

TEST(Neighborhoods, RequiresUnipartite) {
  const std::vector<GeoPoint> p{kBase};
  EXPECT_THROW(neighborhoods(bipartite_matrix(p, p), 0.2), Error);
}

TEST(BuildClusters, SingleEvent) {
  const auto events = oracle::events_at({kBase});
  const auto cl = build_clusters(events, unipartite_matrix(events), 0.2);
  ASSERT_EQ(cl.size(), 1u);
  EXPECT_EQ(cl[0].density(), 1u);
  EXPECT_EQ(cl[0].anchor_location, kBase);
}

TEST(BuildClusters, MutuallyCloseTriple) {
  const auto events = oracle::events_at({kBase, north(kBase, 0.05), east(kBase, 0.05)});
  const auto cl = build_clusters(events, unipartite_matrix(events), 0.2);
  ASSERT_EQ(cl.size(), 3u);
  for (const auto& c : cl) EXPECT_EQ(c.density(), 3u);
}

TEST(BuildClusters, DensitiesEqualNeighborCounts) {
  std::mt19937_64 gen(23);
  const auto pts = oracle::clumpy_points(gen, 15);
  const auto events = oracle::events_at(pts);
  const auto cl = build_clusters(events, unipartite_matrix(events), 0.2);
  const auto counts = oracle::neighbor_counts(pts, 0.2);
  for (std::size_t i = 0; i < cl.size(); ++i) {
    EXPECT_EQ(cl[i].anchor_index, i);
    EXPECT_EQ(cl[i].density(), counts[i]);
    EXPECT_TRUE(cl[i].contains(i));
  }
}

TEST(BuildClusters, DimensionMismatch) {
  const auto events = oracle::events_at({kBase, kBase});
  const auto dm = unipartite_matrix(std::vector<GeoPoint>{kBase});
  try {
    build_clusters(events, dm, 0.2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(SelectMaximalDense, TiesGoToLowestAnchorIndex) {
  const auto events = oracle::events_at(isolated_points(6));
  auto cl = build_clusters(events, unipartite_matrix(events), 0.2);
  const auto sel = select_maximal_dense(cl, 3, 0.2);
  ASSERT_EQ(sel.clusters.size(), 3u);
  EXPECT_EQ(sel.clusters[0].anchor_index, 0u);
  EXPECT_EQ(sel.clusters[1].anchor_index, 1u);
  EXPECT_EQ(sel.clusters[2].anchor_index, 2u);
}

TEST(SelectMaximalDense, PlantedBlobPicksArgmaxAnchor) {
  std::mt19937_64 gen(24);
  std::vector<GeoPoint> pts;
  std::uniform_real_distribution<double> off(-0.08, 0.08);
  for (int i = 0; i < 20; ++i) pts.push_back(east(north(kBase, off(gen)), off(gen)));
  for (int i = 0; i < 15; ++i) pts.push_back(east(north(kBase, 3.0 + i), 2.0));
  const auto counts = oracle::neighbor_counts(pts, 0.2);
  const auto argmax = static_cast<std::size_t>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());

  const auto events = oracle::events_at(pts);
  const auto sel = select_maximal_dense(build_clusters(events, unipartite_matrix(events), 0.2), 1, 0.2);
  ASSERT_EQ(sel.clusters.size(), 1u);
  EXPECT_EQ(sel.clusters[0].anchor_index, argmax);
  EXPECT_EQ(sel.clusters[0].density(), counts[argmax]);
}

// Blob A (10 points) and blob B (6 points) overlap: the densest anchor in A
// reaches every point of B. A far blob C has 4 points. With n = 2 every
// candidate of A and B is suppressed after the first pick and C is taken;
// the greedy oracle agrees.
TEST(SelectMaximalDense, OverlappingBlobsSuppressWeaker) {
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(east(kBase, 0.004 * i));
  for (int i = 0; i < 6; ++i) pts.push_back(east(kBase, 0.19 + 0.004 * i));
  const GeoPoint c_center = north(kBase, 5.0);
  for (int i = 0; i < 4; ++i) pts.push_back(east(c_center, 0.01 * i));

  const auto events = oracle::events_at(pts);
  const auto sel = select_maximal_dense(build_clusters(events, unipartite_matrix(events), 0.2), 2, 0.2);
  const auto want = oracle::greedy_selection(pts, 0.2, 2);
  ASSERT_EQ(sel.clusters.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(sel.clusters[i].anchor_index, want[i].anchor);
    EXPECT_EQ(sel.clusters[i].density(), want[i].density);
  }
  // The second pick comes from blob C (indices 16..19).
  EXPECT_GE(sel.clusters[1].anchor_index, 16u);
}

TEST(SelectMaximalDense, Errors) {
  EXPECT_THROW(select_maximal_dense({}, 1, 0.2), Error);
  try {
    select_maximal_dense({}, 1, 0.2);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoCandidates);
  }
  const auto events = oracle::events_at({kBase});
  EXPECT_THROW(select_maximal_dense(build_clusters(events, unipartite_matrix(events), 0.2), 0, 0.2),
               Error);
}

TEST(ProximalRecurrence, SingleEventExhaustsBeforeN) {
  const auto sel = proximal_recurrence(oracle::events_at({kBase}), default_config());
  ASSERT_EQ(sel.clusters.size(), 1u);
  EXPECT_EQ(sel.clusters[0].density(), 1u);
  EXPECT_EQ(sel.requested_n, 100u);
}

TEST(ProximalRecurrence, IsolatedEventsGiveExactlyNSingletons) {
  auto config = default_config();
  config.insert_count = 4;
  const auto sel = proximal_recurrence(oracle::events_at(isolated_points(9)), config);
  ASSERT_EQ(sel.clusters.size(), 4u);
  for (const auto& c : sel.clusters) EXPECT_EQ(c.density(), 1u);
}

TEST(ProximalRecurrence, MatchesEndToEndGreedyOracle) {
  std::mt19937_64 gen(25);
  for (int trial = 0; trial < 25; ++trial) {
    const auto pts = oracle::clumpy_points(gen, 120);
    auto config = default_config();
    config.insert_count = 8;
    const auto sel = proximal_recurrence(oracle::events_at(pts), config);
    const auto want = oracle::greedy_selection(pts, 0.2, 8);
    ASSERT_EQ(sel.clusters.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      EXPECT_EQ(sel.clusters[i].anchor_index, want[i].anchor);
      EXPECT_EQ(sel.clusters[i].density(), want[i].density);
    }
  }
}

TEST(ProximalRecurrence, SelectionInvariants) {
  std::mt19937_64 gen(26);
  for (int trial = 0; trial < 25; ++trial) {
    const auto pts = oracle::clumpy_points(gen, 100);
    auto config = default_config();
    config.insert_count = 10;
    const auto sel = proximal_recurrence(oracle::events_at(pts), config);
    const auto counts = oracle::neighbor_counts(pts, 0.2);
    ASSERT_FALSE(sel.clusters.empty());
    EXPECT_EQ(sel.clusters[0].density(), *std::max_element(counts.begin(), counts.end()));
    for (std::size_t i = 0; i < sel.clusters.size(); ++i) {
      const auto& c = sel.clusters[i];
      // Anchors are real event locations.
      EXPECT_EQ(c.anchor_location, pts[c.anchor_index]);
      for (auto m : c.member_indices) EXPECT_LE(haversine(c.anchor_location, pts[m]), 0.2);
      if (i > 0) {
        const auto& prev = sel.clusters[i - 1];
        EXPECT_TRUE(prev.density() > c.density() ||
                    (prev.density() == c.density() && prev.anchor_index < c.anchor_index));
      }
      for (std::size_t j = 0; j < i; ++j) {
        EXPECT_GT(haversine(c.anchor_location, sel.clusters[j].anchor_location), 0.2);
      }
    }
  }
}

TEST(ProximalRecurrence, GreedyPrefixProperty) {
  std::mt19937_64 gen(27);
  for (int trial = 0; trial < 10; ++trial) {
    const auto events = oracle::events_at(oracle::clumpy_points(gen, 80));
    auto config = default_config();
    ClusterSelection prev;
    for (std::size_t n = 1; n <= 12; ++n) {
      config.insert_count = n;
      const auto sel = proximal_recurrence(events, config);
      ASSERT_GE(sel.clusters.size(), prev.clusters.size());
      for (std::size_t i = 0; i < prev.clusters.size(); ++i) {
        EXPECT_EQ(sel.clusters[i], prev.clusters[i]);
      }
      prev = sel;
    }
  }
}

TEST(ProximalRecurrence, IndependentOfWorkerCount) {
  std::mt19937_64 gen(28);
  const auto events = oracle::events_at(oracle::clumpy_points(gen, 300));
  const auto one = proximal_recurrence(events, default_config(), Workers{1});
  EXPECT_EQ(one, proximal_recurrence(events, default_config(), Workers{4}));
  EXPECT_EQ(one, proximal_recurrence(events, default_config(), Workers{7}));
}

TEST(ProximalRecurrence, EmptyInputIsError) {
  EXPECT_THROW(proximal_recurrence({}, default_config()), Error);
}
