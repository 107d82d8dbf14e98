#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "stroobnet/distance.hpp"

using namespace stroobnet;

TEST(Haversine, IdentityIsZero) {
  const GeoPoint p{29.9511, -90.0715};
  EXPECT_EQ(haversine(p, p), 0.0);
}

// Expected values are pi*R and pi*R/2 and agree with the law-of-cosines
// oracle.
TEST(Haversine, HalfAndQuarterGreatCircle) {
  EXPECT_NEAR(haversine({0, 0}, {0, 180}, 6371.0), 20015.0869, 1e-3);
  EXPECT_NEAR(oracle::cosine_law_km({0, 0}, {0, 180}), 20015.0869, 1e-3);
  EXPECT_NEAR(haversine({0, 0}, {90, 0}, 6371.0), 10007.5434, 1e-3);
  EXPECT_NEAR(oracle::cosine_law_km({0, 0}, {90, 0}), 10007.5434, 1e-3);
  EXPECT_NEAR(haversine({0, 0}, {0, 180}, 6371.0), std::numbers::pi * 6371.0, 1e-9);
}

TEST(Haversine, SymmetricBitwiseAndBounded) {
  std::mt19937_64 gen(11);
  for (int i = 0; i < 1000; ++i) {
    const auto a = oracle::random_global_point(gen);
    const auto b = oracle::random_global_point(gen);
    const double d = haversine(a, b);
    EXPECT_EQ(d, haversine(b, a));
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, std::numbers::pi * 6371.0 + 1e-9);
  }
}

TEST(Haversine, MatchesCosineLawOracle) {
  std::mt19937_64 gen(12);
  for (int i = 0; i < 1000; ++i) {
    const auto a = oracle::random_global_point(gen);
    const auto b = oracle::random_global_point(gen);
    const double got = haversine(a, b);
    const double want = oracle::cosine_law_km(a, b);
    EXPECT_LE(std::abs(got - want) / std::max(want, 1e-12), 1e-6);
  }
}

TEST(Haversine, TriangleInequality) {
  std::mt19937_64 gen(13);
  for (int i = 0; i < 2000; ++i) {
    const auto a = oracle::random_global_point(gen);
    const auto b = oracle::random_global_point(gen);
    const auto c = oracle::random_global_point(gen);
    EXPECT_LE(haversine(a, c), haversine(a, b) + haversine(b, c) + 1e-9);
  }
  // City-scale triples too.
  for (int i = 0; i < 2000; ++i) {
    const auto a = oracle::random_point(gen, oracle::kCityBox);
    const auto b = oracle::random_point(gen, oracle::kCityBox);
    const auto c = oracle::random_point(gen, oracle::kCityBox);
    EXPECT_LE(haversine(a, c), haversine(a, b) + haversine(b, c) + 1e-9);
  }
}

TEST(BipartiteMatrix, SingleColocatedPair) {
  const std::vector<GeoPoint> o{{29.95, -90.07}}, e{{29.95, -90.07}};
  const auto dm = bipartite_matrix(o, e);
  ASSERT_EQ(dm.rows(), 1u);
  ASSERT_EQ(dm.cols(), 1u);
  EXPECT_EQ(dm(0, 0), 0.0);
  EXPECT_EQ(dm.kind(), MatrixKind::Bipartite);
}

TEST(BipartiteMatrix, Shape) {
  std::mt19937_64 gen(1);
  std::vector<GeoPoint> o, e;
  for (int i = 0; i < 3; ++i) o.push_back(oracle::random_point(gen, oracle::kCityBox));
  for (int i = 0; i < 5; ++i) e.push_back(oracle::random_point(gen, oracle::kCityBox));
  const auto dm = bipartite_matrix(o, e);
  EXPECT_EQ(dm.rows(), 3u);
  EXPECT_EQ(dm.cols(), 5u);
}

TEST(BipartiteMatrix, EqualsLoopedScalarCalls) {
  std::mt19937_64 gen(2);
  std::vector<GeoPoint> o, e;
  for (int i = 0; i < 2; ++i) o.push_back(oracle::random_global_point(gen));
  for (int i = 0; i < 2; ++i) e.push_back(oracle::random_global_point(gen));
  const auto dm = bipartite_matrix(o, e, 6371.0);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(dm(i, j), haversine(o[i], e[j], 6371.0));
  }
}

TEST(BipartiteMatrix, EmptySideIsError) {
  const std::vector<GeoPoint> some{{0, 0}}, none;
  try {
    bipartite_matrix(none, some);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::EmptyInput);
    EXPECT_EQ(err.detail(), "observers");
  }
  try {
    bipartite_matrix(some, none);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.detail(), "events");
  }
}

TEST(UnipartiteMatrix, SingleEvent) {
  const std::vector<GeoPoint> p{{10, 10}};
  const auto dm = unipartite_matrix(p);
  ASSERT_EQ(dm.rows(), 1u);
  EXPECT_EQ(dm(0, 0), 0.0);
}

TEST(UnipartiteMatrix, SymmetricZeroDiagonalAndMatchesLoop) {
  std::mt19937_64 gen(3);
  std::vector<GeoPoint> p;
  for (int i = 0; i < 4; ++i) p.push_back(oracle::random_global_point(gen));
  const auto dm = unipartite_matrix(p);
  EXPECT_EQ(dm.kind(), MatrixKind::Unipartite);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(dm(i, i), 0.0);
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_EQ(dm(i, j), dm(j, i));
      if (i != j) {
        EXPECT_EQ(dm(i, j), haversine(p[i], p[j]));
      }
    }
  }
  EXPECT_THROW(unipartite_matrix(std::span<const GeoPoint>{}), Error);
}

TEST(Matrix, IndependentOfWorkerCount) {
  std::mt19937_64 gen(4);
  std::vector<GeoPoint> o, e;
  for (int i = 0; i < 37; ++i) o.push_back(oracle::random_point(gen, oracle::kCityBox));
  for (int i = 0; i < 113; ++i) e.push_back(oracle::random_point(gen, oracle::kCityBox));
  const auto one = bipartite_matrix(o, e, kEarthRadiusKm, Workers{1});
  for (unsigned w : {2u, 3u, 8u}) {
    EXPECT_EQ(one, bipartite_matrix(o, e, kEarthRadiusKm, Workers{w}));
  }
  const auto u1 = unipartite_matrix(e, kEarthRadiusKm, Workers{1});
  EXPECT_EQ(u1, unipartite_matrix(e, kEarthRadiusKm, Workers{5}));
}
