#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <stdexcept>

#include "mptsim/service.hpp"
#include "mptsim_test/fixtures.hpp"

namespace {

using namespace mptsim;

TEST(Models, ValidateRejectsNonPositive) {
  EXPECT_THROW((ArrivalModel{.lambda = 0.0}).validate(), std::invalid_argument);
  EXPECT_THROW((ArrivalModel{.lambda = NAN}).validate(), std::invalid_argument);
  EXPECT_NO_THROW((ArrivalModel{.lambda = 0.1}).validate());
  EXPECT_THROW((SizeModel{.mean_size = -1.0}).validate(), std::invalid_argument);
  EXPECT_THROW((SizeModel{.mean_size = INFINITY}).validate(), std::invalid_argument);
}

TEST(SampleSize, UniformStaysInBandWithRightMean) {
  Rng rng(1, streams::kEndpoints);
  const SizeModel model{.mean_size = 10.0};
  double sum = 0.0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    const double s = sample_size(model, rng);
    ASSERT_GE(s, 5.0);
    ASSERT_LT(s, 15.0);
    sum += s;
  }
  EXPECT_NEAR(sum / kDraws, 10.0, 0.05);
}

TEST(SampleSize, ConstantIgnoresRng) {
  Rng rng(1);
  const SizeModel model{.mean_size = 7.5, .distribution = SizeDistribution::kConstant};
  const auto before = Rng(1).next();
  EXPECT_DOUBLE_EQ(sample_size(model, rng), 7.5);
  EXPECT_EQ(rng.next(), before);
}

TEST(SampleArrivalCount, MeanMatchesLambda) {
  Rng rng(2, streams::kArrivals);
  const ArrivalModel model{.lambda = 300.0};
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) sum += static_cast<double>(sample_arrival_count(model, rng));
  EXPECT_NEAR(sum / 10000.0, 300.0, 3.0);
}

class SpawnTest : public ::testing::Test {
 protected:
  std::shared_ptr<RouteCache> routes =
      std::make_shared<RouteCache>(std::make_shared<const Topology>(build_topology(reference_params(1))));
};

TEST_F(SpawnTest, ServicesAreWellFormed) {
  Rng rng(5, streams::kEndpoints);
  const SizeModel sizes{.mean_size = 20.0};
  const auto services = spawn_services(*routes, 500, Mode::kMP, sizes, rng, 40, 7);
  ASSERT_EQ(services.size(), 500U);
  const Topology& t = routes->topology();
  for (std::size_t i = 0; i < services.size(); ++i) {
    const Service& s = services[i];
    EXPECT_EQ(s.id, 40 + i);
    EXPECT_EQ(s.birth_tick, 7U);
    EXPECT_TRUE(t.is_leaf(s.src));
    EXPECT_TRUE(t.is_leaf(s.dst));
    EXPECT_NE(s.src, s.dst);
    EXPECT_GE(s.initial_size, 10.0);
    EXPECT_LT(s.initial_size, 30.0);
    EXPECT_EQ(s.residual, s.initial_size);
    ASSERT_TRUE(s.assignment);
    EXPECT_EQ(s.assignment, routes->get(s.src, s.dst, Mode::kMP));
  }
}

TEST_F(SpawnTest, ModeDoesNotChangeTheDraws) {
  Rng a(9, streams::kEndpoints);
  Rng b(9, streams::kEndpoints);
  const SizeModel sizes;
  const auto sp = spawn_services(*routes, 200, Mode::kSP, sizes, a, 0, 1);
  const auto mp = spawn_services(*routes, 200, Mode::kMP, sizes, b, 0, 1);
  for (std::size_t i = 0; i < sp.size(); ++i) {
    EXPECT_EQ(sp[i].src, mp[i].src);
    EXPECT_EQ(sp[i].dst, mp[i].dst);
    EXPECT_EQ(sp[i].initial_size, mp[i].initial_size);
    EXPECT_EQ(sp[i].assignment->paths.size(), 1U);
  }
  EXPECT_EQ(a.next(), b.next());
}

TEST_F(SpawnTest, EndpointsAreRoughlyUniform) {
  Rng rng(3, streams::kEndpoints);
  const auto services = spawn_services(*routes, 20000, Mode::kSP, SizeModel{}, rng, 0, 1);
  const auto leaves = routes->topology().leaves();
  std::vector<int> hits(routes->topology().node_count(), 0);
  for (const Service& s : services) ++hits[s.src];
  // Expected ~20000 / |leaves| per leaf; no leaf may be starved or flooded.
  const double expected = 20000.0 / static_cast<double>(leaves.size());
  for (const Node& leaf : leaves) {
    EXPECT_LT(std::abs(hits[leaf.id] - expected), 6.0 * std::sqrt(expected) + 1.0);
  }
}

TEST(Spawn, NeedsTwoLeaves) {
  mptsim_test::TopologyBuilder b(mptsim_test::plain_params({10, 1}));
  b.add(2, b.add(1));
  RouteCache routes(std::make_shared<const Topology>(b.build()));
  Rng rng(1);
  EXPECT_THROW(spawn_services(routes, 1, Mode::kSP, SizeModel{}, rng, 0, 1), std::invalid_argument);
}

}  // namespace
