#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <sstream>

#include "gossip_age/errors.hpp"
#include "gossip_age/exact.hpp"
#include "oracles.hpp"

using namespace gossip_age;

namespace {

TopologySpec torus(std::size_t side) {
  TopologySpec s;
  s.side = side;
  return s;
}

TopologySpec of_kind(TopologyKind kind, std::size_t n, double lambda_e = 1.0,
                     double lambda = 1.0) {
  TopologySpec s;
  s.kind = kind;
  s.n = n;
  s.lambda_e = lambda_e;
  s.lambda = lambda;
  return s;
}

std::uint64_t full_mask(std::size_t n) { return (std::uint64_t{1} << n) - 1; }

}  // namespace

TEST(Enumerate, CompleteAndRingCounts) {
  EXPECT_EQ(enumerate_connected_masks(build_network(of_kind(TopologyKind::complete, 3))).size(),
            7u);
  EXPECT_EQ(enumerate_connected_masks(build_network(of_kind(TopologyKind::ring, 4))).size(), 13u);
  // a path has n(n+1)/2 intervals
  EXPECT_EQ(enumerate_connected_masks(build_network(of_kind(TopologyKind::line, 7))).size(), 28u);
}

TEST(Enumerate, TorusThreeMatchesBruteForceFilter) {
  const GossipNetwork net = build_network(torus(3));
  const auto masks = enumerate_connected_masks(net);
  const oracle::Rates r = oracle::torus2d(3);
  std::vector<std::uint64_t> expected;
  for (std::uint64_t m = 1; m < 512; ++m) {
    if (oracle::connected(r, m)) expected.push_back(m);
  }
  std::stable_sort(expected.begin(), expected.end(), [](std::uint64_t a, std::uint64_t b) {
    return std::popcount(a) < std::popcount(b);
  });
  EXPECT_EQ(masks, expected);

  const auto subsets = enumerate_connected_subsets(net);
  ASSERT_EQ(subsets.size(), masks.size());
  for (std::size_t k = 0; k < masks.size(); ++k) EXPECT_EQ(subsets[k].to_mask(), masks[k]);
}

TEST(Enumerate, RefusesNetworksAboveTheCap) {
  const GossipNetwork big = build_network(torus(5));
  try {
    enumerate_connected_masks(big);
    FAIL() << "expected CapacityError";
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("16"), std::string::npos) << e.what();
  }
  EXPECT_THROW(solve_version_ages(big, SolverLimits{64}), CapacityError);
}

TEST(Solver, SingleNode) {
  const AgeTable t = solve_version_ages(build_network(of_kind(TopologyKind::complete, 1, 3.0, 2.0)));
  EXPECT_DOUBLE_EQ(t.age(1), 1.5);
  EXPECT_DOUBLE_EQ(t.singleton_mean(), 1.5);
}

TEST(Solver, CompleteTwoHandFixture) {
  const AgeTable t = solve_version_ages(build_network(of_kind(TopologyKind::complete, 2)));
  EXPECT_NEAR(t.age(0b11), 1.0, 1e-15);
  EXPECT_NEAR(t.age(0b01), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.age(0b10), 4.0 / 3.0, 1e-15);
}

TEST(Solver, RingThreeHandFixture) {
  const AgeTable t = solve_version_ages(build_network(of_kind(TopologyKind::ring, 3)));
  EXPECT_NEAR(t.age(0b111), 1.0, 1e-15);
  for (std::uint64_t pair : {0b011u, 0b101u, 0b110u}) EXPECT_NEAR(t.age(pair), 1.2, 1e-14);
  for (std::uint64_t one : {0b001u, 0b010u, 0b100u}) EXPECT_NEAR(t.age(one), 1.65, 1e-14);
}

TEST(Solver, AgesScaleWithRateRatio) {
  const AgeTable base = solve_version_ages(build_network(of_kind(TopologyKind::ring, 6)));
  const AgeTable scaled =
      solve_version_ages(build_network(of_kind(TopologyKind::ring, 6, 3.0, 0.5)));
  for (std::uint64_t m : base.subsets()) EXPECT_NEAR(scaled.age(m), 6.0 * base.age(m), 1e-12);
}

TEST(Solver, MatchesRingRecursion) {
  for (std::size_t n = 3; n <= 12; ++n) {
    const AgeTable t = solve_version_ages(build_network(of_kind(TopologyKind::ring, n)));
    const auto v = oracle::ring_ages(n);
    for (std::uint64_t m : t.subsets()) {
      EXPECT_NEAR(t.age(m), v[std::popcount(m) - 1], 1e-12) << "n=" << n << " mask " << m;
    }
  }
}

TEST(Solver, MatchesDefinitionRecursionOnTorusAndLine) {
  {
    const oracle::Rates r = oracle::torus2d(3, 1.0, 2.0);
    TopologySpec s = torus(3);
    s.lambda_e = 2.0;
    const AgeTable t = solve_version_ages(build_network(s));
    oracle::AgeRecursion rec(r);
    for (std::uint64_t m : t.subsets()) EXPECT_NEAR(t.age(m), rec(m), 1e-12) << m;
  }
  {
    const oracle::Rates r = oracle::line(7);
    const AgeTable t = solve_version_ages(build_network(of_kind(TopologyKind::line, 7)));
    oracle::AgeRecursion rec(r);
    for (std::uint64_t m : t.subsets()) EXPECT_NEAR(t.age(m), rec(m), 1e-12) << m;
  }
}

TEST(Solver, TableOrderAndLookup) {
  const AgeTable t = solve_version_ages(build_network(of_kind(TopologyKind::line, 4)));
  const auto order = t.subsets();
  ASSERT_EQ(order.front(), full_mask(4));
  for (std::size_t k = 1; k < order.size(); ++k) {
    const int a = std::popcount(order[k - 1]), b = std::popcount(order[k]);
    EXPECT_TRUE(a > b || (a == b && order[k - 1] < order[k]));
  }
  EXPECT_FALSE(t.contains(0b0101));
  EXPECT_THROW((void)t.age(0b0101), PreconditionError);
  EXPECT_THROW((void)t.age(0), PreconditionError);
}

TEST(Solver, CsvLayout) {
  const AgeTable t = solve_version_ages(build_network(of_kind(TopologyKind::complete, 2)));
  std::ostringstream out;
  t.write_csv(out);
  EXPECT_EQ(out.str(),
            "# gossip-age v1\nsubset,size,v_S\n0x3,2,1\n0x1,1,1.3333333333333333\n"
            "0x2,1,1.3333333333333333\n");
}

TEST(Solver, SupersetsAreNeverOlder) {
  for (const GossipNetwork& net :
       {build_network(torus(4)), build_network(of_kind(TopologyKind::line, 9)),
        build_network(of_kind(TopologyKind::complete, 7))}) {
    const AgeTable t = solve_version_ages(net);
    for (std::uint64_t m : t.subsets()) {
      if (m == full_mask(net.size())) continue;
      const NodeSubset s = NodeSubset::from_mask(net.size(), m);
      neighbors_of_set(net, s).for_each([&](NodeId i) {
        const std::uint64_t up = m | (std::uint64_t{1} << i);
        EXPECT_LE(t.age(up), t.age(m) + 1e-12);
      });
    }
  }
}

TEST(CompleteOracle, SmallCases) {
  const auto v1 = complete_graph_oracle(1, 1.0, 1.0);
  ASSERT_EQ(v1.size(), 1u);
  EXPECT_DOUBLE_EQ(v1[0], 1.0);
  const auto v2 = complete_graph_oracle(2, 1.0, 1.0);
  ASSERT_EQ(v2.size(), 2u);
  EXPECT_NEAR(v2[0], 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(v2[1], 1.0, 1e-15);
}

TEST(CompleteOracle, MatchesSolverPerSize) {
  for (std::size_t n = 1; n <= 12; ++n) {
    const AgeTable t = solve_version_ages(build_network(of_kind(TopologyKind::complete, n, 1.5)));
    const auto v = complete_graph_oracle(n, 1.5, 1.0);
    for (std::uint64_t m : t.subsets()) {
      EXPECT_NEAR(t.age(m), v[std::popcount(m) - 1], 1e-12) << "n=" << n;
    }
  }
}

TEST(LemmaBounds, SandwichOnSmallNetworks) {
  for (const GossipNetwork& net :
       {build_network(torus(3)), build_network(of_kind(TopologyKind::ring, 8)),
        build_network(of_kind(TopologyKind::line, 8)),
        build_network(of_kind(TopologyKind::complete, 6))}) {
    const AgeTable t = solve_version_ages(net);
    for (std::uint64_t m : t.subsets()) {
      if (m == full_mask(net.size())) continue;
      const NodeSubset s = NodeSubset::from_mask(net.size(), m);
      EXPECT_LE(lemma2_lower_bound(net, s, t), t.age(m) + 1e-9);
      EXPECT_GE(lemma1_upper_bound(net, s, t), t.age(m) - 1e-9);
    }
  }
}

TEST(LemmaBounds, CollapseWhenSymmetric) {
  const GossipNetwork net = build_network(of_kind(TopologyKind::complete, 5));
  const AgeTable t = solve_version_ages(net);
  for (std::uint64_t m : t.subsets()) {
    if (m == full_mask(5)) continue;
    const NodeSubset s = NodeSubset::from_mask(5, m);
    EXPECT_NEAR(lemma1_upper_bound(net, s, t), t.age(m), 1e-12);
    EXPECT_NEAR(lemma2_lower_bound(net, s, t), t.age(m), 1e-12);
  }
}

TEST(LemmaBounds, StrictOnLineEnd) {
  // node 0 of a line: its one neighbor sends at lambda/2, unlike a ring
  const GossipNetwork net = build_network(of_kind(TopologyKind::line, 5));
  const AgeTable t = solve_version_ages(net);
  const NodeSubset mid(5, {2});
  EXPECT_NEAR(lemma1_upper_bound(net, mid, t), t.age(0b00100), 1e-12);
  const NodeSubset pair(5, {1, 2});
  EXPECT_LT(lemma2_lower_bound(net, pair, t), t.age(pair));
  EXPECT_GT(lemma1_upper_bound(net, pair, t), t.age(pair));
}

TEST(LemmaBounds, RejectFullSet) {
  const GossipNetwork net = build_network(of_kind(TopologyKind::complete, 3));
  const AgeTable t = solve_version_ages(net);
  EXPECT_THROW(lemma1_upper_bound(net, NodeSubset::full(3), t), PreconditionError);
  EXPECT_THROW(lemma2_lower_bound(net, NodeSubset::full(3), t), PreconditionError);
}
