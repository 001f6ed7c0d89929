#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "gossip_age/errors.hpp"
#include "gossip_age/kv_config.hpp"
#include "gossip_age/topology.hpp"

using namespace gossip_age;

namespace {

TopologySpec torus(std::size_t side, int d = 2) {
  TopologySpec s;
  s.side = side;
  s.dimension = d;
  return s;
}

TopologySpec of_kind(TopologyKind kind, std::size_t n) {
  TopologySpec s;
  s.kind = kind;
  s.n = n;
  return s;
}

}  // namespace

TEST(NodeSubset, BasicOperations) {
  NodeSubset s(70, {0, 5, 69});
  EXPECT_EQ(s.size(), 3u);
  EXPECT_TRUE(s.contains(69));
  s.erase(5);
  s.erase(5);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.members(), (std::vector<NodeId>{0, 69}));
  EXPECT_THROW(s.insert(70), PreconditionError);
  EXPECT_THROW((void)s.to_mask(), PreconditionError);
}

TEST(NodeSubset, MaskAndHex) {
  const auto s = NodeSubset::from_mask(9, 0b100000011);
  EXPECT_EQ(s.members(), (std::vector<NodeId>{0, 1, 8}));
  EXPECT_EQ(s.to_mask(), 0b100000011u);
  EXPECT_EQ(s.to_hex(), "0x103");
  EXPECT_EQ(NodeSubset::full(4).to_hex(), "0xf");
}

TEST(TopologySpec, TorusTenBySixteen) {
  const GossipNetwork net = build_network(torus(10));
  ASSERT_EQ(net.size(), 100u);
  for (NodeId i = 0; i < 100; ++i) {
    ASSERT_EQ(net.out_links(i).size(), 4u);
    for (const Link& l : net.out_links(i)) EXPECT_DOUBLE_EQ(l.rate, 0.25);
    EXPECT_DOUBLE_EQ(net.source_rate(i), 0.01);
  }
}

TEST(TopologySpec, CompleteTwo) {
  const GossipNetwork net = build_network(of_kind(TopologyKind::complete, 2));
  EXPECT_DOUBLE_EQ(net.gossip_rate(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(net.gossip_rate(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(net.source_rate(0), 0.5);
  EXPECT_DOUBLE_EQ(net.source_rate(1), 0.5);
}

TEST(TopologySpec, ThreeDimensionalTorus) {
  const GossipNetwork net = build_network(torus(3, 3));
  ASSERT_EQ(net.size(), 27u);
  for (NodeId i = 0; i < 27; ++i) {
    ASSERT_EQ(net.out_links(i).size(), 6u);
    for (const Link& l : net.out_links(i)) EXPECT_NEAR(l.rate, 1.0 / 6.0, 1e-15);
  }
}

TEST(TopologySpec, RejectsInvalidSpecs) {
  EXPECT_THROW(build_network(torus(2)), ConfigError);
  EXPECT_THROW(build_network(torus(0)), ConfigError);
  EXPECT_THROW(build_network(of_kind(TopologyKind::complete, 0)), ConfigError);
  EXPECT_THROW(build_network(of_kind(TopologyKind::line, 0)), ConfigError);
  EXPECT_THROW(build_network(of_kind(TopologyKind::ring, 2)), ConfigError);
  TopologySpec bad_rate = torus(4);
  bad_rate.lambda = 0.0;
  EXPECT_THROW(build_network(bad_rate), ConfigError);
  bad_rate.lambda = 1.0;
  bad_rate.lambda_e = -1.0;
  EXPECT_THROW(build_network(bad_rate), ConfigError);
  TopologySpec mismatch = torus(4);
  mismatch.n = 15;
  EXPECT_THROW(mismatch.validate(), ConfigError);
}

TEST(TopologySpec, OutRatesSumToLambda) {
  std::vector<TopologySpec> specs = {torus(3), torus(5), torus(4, 3), torus(7, 1),
                                     of_kind(TopologyKind::ring, 9),
                                     of_kind(TopologyKind::complete, 6),
                                     of_kind(TopologyKind::line, 6)};
  for (TopologySpec s : specs) {
    s.lambda = 2.5;
    const GossipNetwork net = build_network(s);
    double source_total = 0.0;
    for (NodeId i = 0; i < net.size(); ++i) {
      source_total += net.source_rate(i);
      const bool line_end = s.kind == TopologyKind::line && (i == 0 || i + 1 == net.size());
      const double expected = line_end ? 1.25 : 2.5;
      EXPECT_NEAR(net.out_rate(i), expected, 1e-12 * 2.5) << s.describe() << " node " << i;
    }
    EXPECT_NEAR(source_total, 2.5, 1e-12) << s.describe();
    EXPECT_TRUE(net.is_connected());
  }
}

TEST(TopologySpec, SourceRateIntoFullSet) {
  const GossipNetwork net = build_network(torus(6));
  EXPECT_NEAR(source_rate_into_set(net, NodeSubset::full(36)), 1.0, 1e-12);
}

TEST(TopologySpec, KeyValueRoundTrip) {
  TopologySpec s = of_kind(TopologyKind::ring, 12);
  s.lambda = 0.5;
  s.lambda_e = 3.0;
  EXPECT_EQ(TopologySpec::from_key_values(s.to_key_values()), s);
  const TopologySpec t = torus(8, 3);
  EXPECT_EQ(TopologySpec::from_key_values(t.to_key_values()).node_count(), 512u);
  EXPECT_THROW(TopologySpec::from_key_values({{"kind", "ring"}}), ConfigError);
  EXPECT_THROW(TopologySpec::from_key_values({{"kind", "hypercube"}}), ConfigError);
  EXPECT_THROW(TopologySpec::from_key_values({{"colour", "red"}}), ConfigError);
  EXPECT_THROW(parse_topology_kind("open-grid"), ConfigError);
}

TEST(KeyValues, ParsesCommentsAndSections) {
  std::istringstream in("# comment\n[run]\n; other\n\nside = 12\nlambda=0.5 \nside=14\n");
  const KeyValues kv = parse_key_values(in);
  EXPECT_EQ(kv.at("side"), "14");
  EXPECT_EQ(kv.at("lambda"), "0.5");
  std::istringstream bad("side 12\n");
  EXPECT_THROW(parse_key_values(bad), ConfigError);
  EXPECT_THROW(parse_double("x", "abc"), ConfigError);
  EXPECT_THROW(parse_double("x", "inf"), ConfigError);
  EXPECT_THROW(parse_integer("x", "12a"), ConfigError);
  EXPECT_EQ(parse_integer("x", "-3"), -3);
}

TEST(Neighbors, SingletonOnTorusHasFourGridNeighbors) {
  const GossipNetwork net = build_network(torus(10));
  const NodeId center = 5 * 10 + 5;
  const NodeSubset nb = neighbors_of_set(net, NodeSubset(100, {center}));
  EXPECT_EQ(nb.members(), (std::vector<NodeId>{45, 54, 56, 65}));
  const NodeSubset corner = neighbors_of_set(net, NodeSubset(100, {0}));
  EXPECT_EQ(corner.members(), (std::vector<NodeId>{1, 9, 10, 90}));
}

TEST(Neighbors, CompleteGraph) {
  const GossipNetwork net = build_network(of_kind(TopologyKind::complete, 5));
  EXPECT_EQ(neighbors_of_set(net, NodeSubset(5, {0, 1})).members(),
            (std::vector<NodeId>{2, 3, 4}));
  EXPECT_THROW(neighbors_of_set(net, NodeSubset(5)), PreconditionError);
  EXPECT_TRUE(neighbors_of_set(net, NodeSubset::full(5)).empty());
}

TEST(Neighbors, DisjointFromSetAndRatesQuantized) {
  const GossipNetwork net = build_network(torus(6));
  std::mt19937_64 rng(7);
  std::size_t connected_seen = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::uint64_t mask = rng() & ((std::uint64_t{1} << 36) - 1) & rng();
    if (mask == 0) continue;
    const NodeSubset s = NodeSubset::from_mask(36, mask);
    const NodeSubset nb = neighbors_of_set(net, s);
    nb.for_each([&](NodeId i) { EXPECT_FALSE(s.contains(i)); });
    if (!is_connected_subset(net, s)) continue;
    ++connected_seen;
    nb.for_each([&](NodeId i) {
      const double r = lambda_into_set(net, i, s);
      const double quarters = r * 4.0;
      EXPECT_NEAR(quarters, std::round(quarters), 1e-12);
      EXPECT_GE(quarters, 1.0 - 1e-12);
      EXPECT_LE(quarters, 4.0 + 1e-12);
    });
  }
  EXPECT_GT(connected_seen, 0u);
}

TEST(LambdaIntoSet, SingleEdgeMemberAndPocket) {
  const GossipNetwork net = build_network(torus(10));
  // node (1,1) touches S = {(1,2)} once
  EXPECT_DOUBLE_EQ(lambda_into_set(net, 11, NodeSubset(100, {12})), 0.25);
  EXPECT_DOUBLE_EQ(lambda_into_set(net, 12, NodeSubset(100, {12})), 0.0);
  // pocket at (2,2): S surrounds it on the left, top and right
  const NodeSubset u(100, {11, 12, 13, 21, 23});
  EXPECT_DOUBLE_EQ(lambda_into_set(net, 22, u), 0.75);
}

TEST(GossipNetwork, CoordinatesRoundTrip) {
  const GossipNetwork net = build_network(torus(4, 3));
  for (NodeId i = 0; i < net.size(); ++i) {
    const auto c = net.coordinates(i);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(net.node_at(c), i);
  }
  EXPECT_EQ(net.coordinates(1), (std::vector<std::size_t>{0, 0, 1}));
  const GossipNetwork complete = build_network(of_kind(TopologyKind::complete, 3));
  EXPECT_THROW(complete.coordinates(0), PreconditionError);
}

TEST(GossipNetwork, TranslationRelabelingIsIsomorphic) {
  const std::size_t L = 5;
  const GossipNetwork net = build_network(torus(L));
  auto shift = [&](NodeId i) {
    const std::size_t r = i / L, c = i % L;
    return static_cast<NodeId>(((r + 2) % L) * L + (c + 3) % L);
  };
  std::vector<std::vector<Link>> links(net.size());
  std::vector<double> source(net.size());
  for (NodeId i = 0; i < net.size(); ++i) {
    for (const Link& l : net.out_links(i)) links[shift(i)].push_back({shift(l.target), l.rate});
    source[shift(i)] = net.source_rate(i);
  }
  const GossipNetwork moved(net.size(), links, source, net.lambda(), net.lambda_e(), net.tag());
  EXPECT_EQ(moved.fingerprint(), net.fingerprint());
  for (NodeId i = 0; i < net.size(); ++i) {
    for (const Link& l : net.out_links(i)) {
      EXPECT_DOUBLE_EQ(moved.gossip_rate(shift(i), shift(l.target)), l.rate);
    }
  }
  EXPECT_NE(build_network(of_kind(TopologyKind::ring, 25)).fingerprint(), net.fingerprint());
}

TEST(GossipNetwork, LineEndNodesIdleHalfTheirBudget) {
  const GossipNetwork net = build_network(of_kind(TopologyKind::line, 4));
  EXPECT_DOUBLE_EQ(net.gossip_rate(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(net.out_rate(0), 0.5);
  EXPECT_DOUBLE_EQ(net.out_rate(1), 1.0);
}

TEST(GossipNetwork, OpenGridCounts) {
  const GossipNetwork g = open_grid_network(6);
  EXPECT_EQ(g.out_links(0).size(), 2u);
  EXPECT_EQ(g.out_links(7).size(), 4u);
  EXPECT_DOUBLE_EQ(g.gossip_rate(7, 8), 0.25);
  EXPECT_DOUBLE_EQ(g.gossip_rate(5, 6), 0.0);
}

TEST(ConnectedSubset, Basics) {
  const GossipNetwork net = build_network(torus(4));
  EXPECT_FALSE(is_connected_subset(net, NodeSubset(16)));
  EXPECT_TRUE(is_connected_subset(net, NodeSubset(16, {0, 3})));  // wraps
  EXPECT_FALSE(is_connected_subset(net, NodeSubset(16, {0, 5})));
}
