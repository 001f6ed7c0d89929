#include "gossip_age/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gossip_age/errors.hpp"

namespace gossip_age {
namespace {

// 2^24 doubles = 128 MiB of table
constexpr std::size_t kHardNodeCap = 24;

void check_limits(const GossipNetwork& net, const SolverLimits& limits) {
  if (limits.max_nodes < 1) throw ConfigError("max_nodes must be >= 1");
  const std::size_t cap = std::min(limits.max_nodes, kHardNodeCap);
  if (net.size() > cap) {
    throw CapacityError(fmt::format(
        "exact enumeration is capped at {} nodes; network has {}", cap, net.size()));
  }
}

/// Undirected adjacency masks over the symmetric closure of the link pattern.
std::vector<std::uint64_t> adjacency_masks(const GossipNetwork& net) {
  std::vector<std::uint64_t> adj(net.size(), 0);
  for (NodeId i = 0; i < net.size(); ++i) {
    for (const Link& l : net.out_links(i)) {
      adj[i] |= std::uint64_t{1} << l.target;
      adj[l.target] |= std::uint64_t{1} << i;
    }
  }
  return adj;
}

bool mask_connected(std::uint64_t set, const std::vector<std::uint64_t>& adj) {
  if (set == 0) return false;
  std::uint64_t reached = set & (~set + 1);
  std::uint64_t frontier = reached;
  while (frontier != 0) {
    std::uint64_t grow = 0;
    for (std::uint64_t f = frontier; f != 0; f &= f - 1) grow |= adj[std::countr_zero(f)];
    grow &= set & ~reached;
    reached |= grow;
    frontier = grow;
  }
  return reached == set;
}

struct NeighborRates {
  std::vector<NodeId> nodes;
  std::vector<double> rates;  // lambda_i(S), aligned with nodes
};

NeighborRates neighbor_rates(const GossipNetwork& net, std::uint64_t set) {
  NeighborRates out;
  std::vector<double> into(net.size(), 0.0);
  for (std::uint64_t s = set; s != 0; s &= s - 1) {
    const auto j = static_cast<NodeId>(std::countr_zero(s));
    for (const Link& l : net.in_links(j)) {
      if (((set >> l.target) & 1u) == 0) into[l.target] += l.rate;
    }
  }
  for (NodeId i = 0; i < net.size(); ++i) {
    if (into[i] > 0.0) {
      out.nodes.push_back(i);
      out.rates.push_back(into[i]);
    }
  }
  return out;
}

double source_rate_of(const GossipNetwork& net, std::uint64_t set) {
  double total = 0.0;
  for (std::uint64_t s = set; s != 0; s &= s - 1) {
    total += net.source_rate(static_cast<NodeId>(std::countr_zero(s)));
  }
  return total;
}

enum class BoundSide { upper, lower };

double lemma_bound(const GossipNetwork& net, const NodeSubset& s, const AgeTable& table,
                   BoundSide side) {
  if (s.universe() != net.size() || table.node_count() != net.size()) {
    throw PreconditionError("subset, table and network sizes differ");
  }
  const std::uint64_t mask = s.to_mask();
  if (!table.contains(mask)) {
    throw PreconditionError(fmt::format("subset {} is not a connected subset", s.to_hex()));
  }
  const NeighborRates nb = neighbor_rates(net, mask);
  if (nb.nodes.empty()) {
    throw PreconditionError("the bound needs a subset with at least one neighbor");
  }
  const auto [rmin, rmax] = std::minmax_element(nb.rates.begin(), nb.rates.end());
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -std::numeric_limits<double>::infinity();
  for (NodeId i : nb.nodes) {
    const double v = table.age(mask | (std::uint64_t{1} << i));
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  const double count = static_cast<double>(nb.nodes.size());
  const double rate = side == BoundSide::upper ? *rmin : *rmax;
  const double expanded = side == BoundSide::upper ? vmax : vmin;
  return (net.lambda_e() + count * rate * expanded) / (source_rate_of(net, mask) + count * rate);
}

}  // namespace

std::vector<std::uint64_t> enumerate_connected_masks(const GossipNetwork& net,
                                                     const SolverLimits& limits) {
  check_limits(net, limits);
  const std::size_t n = net.size();
  const auto adj = adjacency_masks(net);
  std::vector<std::vector<std::uint64_t>> by_size(n + 1);
  const std::uint64_t end = std::uint64_t{1} << n;
  for (std::uint64_t m = 1; m < end; ++m) {
    if (mask_connected(m, adj)) by_size[static_cast<std::size_t>(std::popcount(m))].push_back(m);
  }
  std::vector<std::uint64_t> out;
  for (const auto& group : by_size) out.insert(out.end(), group.begin(), group.end());
  return out;
}

std::vector<NodeSubset> enumerate_connected_subsets(const GossipNetwork& net,
                                                    const SolverLimits& limits) {
  const auto masks = enumerate_connected_masks(net, limits);
  std::vector<NodeSubset> out;
  out.reserve(masks.size());
  for (std::uint64_t m : masks) out.push_back(NodeSubset::from_mask(net.size(), m));
  return out;
}

// ---------------------------------------------------------------------------
// AgeTable

AgeTable::AgeTable(std::size_t n, std::uint64_t network_id)
    : n_(n),
      network_id_(network_id),
      ages_(std::size_t{1} << n, std::numeric_limits<double>::quiet_NaN()) {}

bool AgeTable::contains(std::uint64_t mask) const {
  return mask < ages_.size() && !std::isnan(ages_[mask]);
}

double AgeTable::age(std::uint64_t mask) const {
  if (!contains(mask)) {
    throw PreconditionError(fmt::format("no age recorded for subset {:#x}", mask));
  }
  return ages_[mask];
}

void AgeTable::set(std::uint64_t mask, double value) {
  GOSSIP_AGE_ASSERT(mask < ages_.size(), "mask outside table");
  if (std::isnan(ages_[mask])) order_.push_back(mask);
  ages_[mask] = value;
}

double AgeTable::singleton_mean() const {
  double total = 0.0;
  for (std::size_t i = 0; i < n_; ++i) total += age(std::uint64_t{1} << i);
  return total / static_cast<double>(n_);
}

double AgeTable::singleton_min() const {
  double v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_; ++i) v = std::min(v, age(std::uint64_t{1} << i));
  return v;
}

double AgeTable::singleton_max() const {
  double v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_; ++i) v = std::max(v, age(std::uint64_t{1} << i));
  return v;
}

void AgeTable::write_csv(std::ostream& out) const {
  out << "# gossip-age v1\n";
  out << "subset,size,v_S\n";
  for (std::uint64_t m : order_) {
    const std::string hex = NodeSubset::from_mask(n_, m).to_hex();
    fmt::print(out, "{},{},{}\n", hex, std::popcount(m), ages_[m]);
  }
}

// ---------------------------------------------------------------------------
// solver

AgeTable solve_version_ages(const GossipNetwork& net, const SolverLimits& limits) {
  auto masks = enumerate_connected_masks(net, limits);
  std::sort(masks.begin(), masks.end(), [](std::uint64_t a, std::uint64_t b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa > pb : a < b;
  });

  AgeTable table(net.size(), net.fingerprint());
  for (std::uint64_t m : masks) {
    const NeighborRates nb = neighbor_rates(net, m);
    double numer = net.lambda_e();
    double denom = source_rate_of(net, m);
    for (std::size_t k = 0; k < nb.nodes.size(); ++k) {
      const std::uint64_t bigger = m | (std::uint64_t{1} << nb.nodes[k]);
      GOSSIP_AGE_ASSERT(table.contains(bigger),
                        fmt::format("age of expansion {:#x} of {:#x} missing", bigger, m));
      numer += nb.rates[k] * table.age(bigger);
      denom += nb.rates[k];
    }
    GOSSIP_AGE_ASSERT(denom > 0.0, fmt::format("subset {:#x} receives no updates", m));
    table.set(m, numer / denom);
  }
  return table;
}

double lemma1_upper_bound(const GossipNetwork& net, const NodeSubset& s, const AgeTable& table) {
  return lemma_bound(net, s, table, BoundSide::upper);
}

double lemma2_lower_bound(const GossipNetwork& net, const NodeSubset& s, const AgeTable& table) {
  return lemma_bound(net, s, table, BoundSide::lower);
}

std::vector<double> complete_graph_oracle(std::size_t n, double lambda_e, double lambda) {
  if (n < 1) throw PreconditionError("complete_graph_oracle needs n >= 1");
  if (!(lambda > 0.0) || !(lambda_e > 0.0)) throw PreconditionError("rates must be positive");
  std::vector<double> v(n);
  v[n - 1] = lambda_e / lambda;
  const double nd = static_cast<double>(n);
  for (std::size_t j = n - 1; j >= 1; --j) {
    const double jd = static_cast<double>(j);
    const double into = jd * lambda / (nd - 1.0);
    const double neighbors = nd - jd;
    v[j - 1] = (lambda_e + neighbors * into * v[j]) / (jd * lambda / nd + neighbors * into);
  }
  return v;
}

}  // namespace gossip_age
