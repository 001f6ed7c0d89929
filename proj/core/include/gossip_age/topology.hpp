#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gossip_age/node_subset.hpp"

namespace gossip_age {

enum class TopologyKind {
  torus_grid,
  ring,
  line,
  complete,
  /// Non-wrapping 2D grid. Only produced by open_grid_network(); it is not a
  /// TopologySpec kind and cannot be requested from config.
  open_grid,
};

std::string_view to_string(TopologyKind kind);
TopologyKind parse_topology_kind(std::string_view text);

/// User-facing description of a network to build.
///
/// For torus grids `n` is derived from `side` and `dimension` (n = side^d);
/// for the other kinds `n` is authoritative and `side`/`dimension` are
/// ignored.
struct TopologySpec {
  TopologyKind kind = TopologyKind::torus_grid;
  int dimension = 2;
  std::size_t side = 10;
  std::size_t n = 0;
  double lambda = 1.0;
  double lambda_e = 1.0;

  /// Node count implied by the spec (side^d for torus grids).
  std::size_t node_count() const;

  /// Throws ConfigError when the spec violates its invariants.
  void validate() const;

  /// Short human-readable label, e.g. "torus-grid d=2 L=10".
  std::string describe() const;

  /// Flat key=value form with keys kind, d, side, n, lambda, lambda_e.
  std::map<std::string, std::string> to_key_values() const;
  static TopologySpec from_key_values(const std::map<std::string, std::string>& kv);

  friend bool operator==(const TopologySpec&, const TopologySpec&) = default;
};

struct TopologyTag {
  TopologyKind kind = TopologyKind::complete;
  int dimension = 0;
  std::size_t side = 0;
};

/// One directed gossip link i -> target with Poisson rate `rate`.
struct Link {
  NodeId target;
  double rate;
};

/// Immutable gossip network: directed per-pair gossip rates, per-node source
/// rates and the source self-update rate. Safe to share across threads.
class GossipNetwork {
 public:
  /// Internal constructor; validates shape but not the builder invariants
  /// (uniform source split, total out-rate). Prefer build_network().
  GossipNetwork(std::size_t n, std::vector<std::vector<Link>> out_links,
                std::vector<double> source_rates, double lambda, double lambda_e,
                TopologyTag tag);

  std::size_t size() const { return n_; }
  double lambda() const { return lambda_; }
  double lambda_e() const { return lambda_e_; }
  const TopologyTag& tag() const { return tag_; }

  std::span<const Link> out_links(NodeId i) const { return out_[i]; }
  /// Links j -> i, reported as {source j, rate}.
  std::span<const Link> in_links(NodeId i) const { return in_[i]; }

  /// lambda_ij, zero when there is no link.
  double gossip_rate(NodeId i, NodeId j) const;
  /// lambda_0i.
  double source_rate(NodeId i) const { return source_rates_[i]; }
  std::span<const double> source_rates() const { return source_rates_; }
  /// Sum of lambda_ij over j.
  double out_rate(NodeId i) const;

  /// True when every node's outgoing links carry one common rate, which lets
  /// samplers pick a neighbor uniformly.
  bool uniform_out_rates() const { return uniform_out_rates_; }

  /// Node connectivity over the symmetric closure of the link pattern.
  bool is_connected() const;

  /// Order-independent hash of the rate structure (sorted multiset of
  /// per-node rate signatures). Isomorphic networks hash equal.
  std::uint64_t fingerprint() const;

  /// Grid coordinates of a node (row-major, last axis fastest). Only for
  /// torus and open grids.
  std::vector<std::size_t> coordinates(NodeId i) const;
  NodeId node_at(std::span<const std::size_t> coords) const;

 private:
  std::size_t n_;
  std::vector<std::vector<Link>> out_;
  std::vector<std::vector<Link>> in_;
  std::vector<double> source_rates_;
  double lambda_;
  double lambda_e_;
  TopologyTag tag_;
  bool uniform_out_rates_ = true;
};

/// Builds a network from a validated spec using the standard rate split:
/// torus grids give lambda/(2d) to each of the 2d neighbors, rings lambda/2
/// per neighbor, lines lambda/2 per existing neighbor (end nodes idle half
/// their budget), complete graphs lambda/(n-1) per ordered pair. The source
/// pushes to every node at lambda/n.
GossipNetwork build_network(const TopologySpec& spec);

/// L x L grid without wrap-around; interior nodes push lambda/4 to each
/// neighbor, boundary nodes idle the share of their missing neighbors.
GossipNetwork open_grid_network(std::size_t side, double lambda = 1.0, double lambda_e = 1.0);

/// N(S) = { i not in S : lambda_ij > 0 for some j in S }.
NodeSubset neighbors_of_set(const GossipNetwork& net, const NodeSubset& set);

/// lambda_i(S): total rate from i into S, zero if i is in S.
double lambda_into_set(const GossipNetwork& net, NodeId i, const NodeSubset& set);

/// lambda_0(S): total source rate into S.
double source_rate_into_set(const GossipNetwork& net, const NodeSubset& set);

/// Connectivity of the subgraph induced by `set` (symmetric closure).
bool is_connected_subset(const GossipNetwork& net, const NodeSubset& set);

}  // namespace gossip_age
