#include "gossip_age/topology.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <queue>

#include <fmt/format.h>

#include "gossip_age/errors.hpp"
#include "gossip_age/kv_config.hpp"

namespace gossip_age {
namespace {

constexpr std::size_t kMaxNodes = std::size_t{1} << 31;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // splitmix64 finalizer over h ^ v
  std::uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_double(std::uint64_t h, double v) {
  return mix(h, std::bit_cast<std::uint64_t>(v));
}

void require_positive_rate(const char* name, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{} must be a positive finite rate, got {}", name, v));
  }
}

std::size_t checked_power(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int k = 0; k < exp; ++k) {
    if (out > kMaxNodes / base) {
      throw ConfigError(fmt::format("grid {}^{} exceeds the supported node count", base, exp));
    }
    out *= base;
  }
  return out;
}

std::vector<double> uniform_source_rates(std::size_t n, double lambda) {
  return std::vector<double>(n, lambda / static_cast<double>(n));
}

GossipNetwork build_torus(std::size_t side, int dim, double lambda, double lambda_e,
                          TopologyKind kind) {
  const std::size_t n = checked_power(side, dim);
  const double per_edge = lambda / (2.0 * dim);
  std::vector<std::vector<Link>> out(n);
  // stride of axis k in row-major order (last axis fastest)
  std::vector<std::size_t> stride(static_cast<std::size_t>(dim));
  std::size_t s = 1;
  for (int k = dim - 1; k >= 0; --k) {
    stride[static_cast<std::size_t>(k)] = s;
    s *= side;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i].reserve(2 * static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) {
      const std::size_t st = stride[static_cast<std::size_t>(k)];
      const std::size_t c = (i / st) % side;
      const std::size_t base = i - c * st;
      const std::size_t up = base + ((c + 1) % side) * st;
      const std::size_t down = base + ((c + side - 1) % side) * st;
      out[i].push_back({static_cast<NodeId>(down), per_edge});
      out[i].push_back({static_cast<NodeId>(up), per_edge});
    }
  }
  return GossipNetwork(n, std::move(out), uniform_source_rates(n, lambda), lambda, lambda_e,
                       TopologyTag{kind, dim, side});
}

GossipNetwork build_line(std::size_t n, double lambda, double lambda_e) {
  std::vector<std::vector<Link>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) out[i].push_back({static_cast<NodeId>(i - 1), lambda / 2.0});
    if (i + 1 < n) out[i].push_back({static_cast<NodeId>(i + 1), lambda / 2.0});
  }
  return GossipNetwork(n, std::move(out), uniform_source_rates(n, lambda), lambda, lambda_e,
                       TopologyTag{TopologyKind::line, 1, n});
}

GossipNetwork build_complete(std::size_t n, double lambda, double lambda_e) {
  std::vector<std::vector<Link>> out(n);
  if (n > 1) {
    const double per_pair = lambda / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      out[i].reserve(n - 1);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) out[i].push_back({static_cast<NodeId>(j), per_pair});
      }
    }
  }
  return GossipNetwork(n, std::move(out), uniform_source_rates(n, lambda), lambda, lambda_e,
                       TopologyTag{TopologyKind::complete, 0, 0});
}

}  // namespace

std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::torus_grid: return "torus-grid";
    case TopologyKind::ring: return "ring";
    case TopologyKind::line: return "line";
    case TopologyKind::complete: return "complete";
    case TopologyKind::open_grid: return "open-grid";
  }
  return "unknown";
}

TopologyKind parse_topology_kind(std::string_view text) {
  if (text == "torus-grid" || text == "torus" || text == "grid") return TopologyKind::torus_grid;
  if (text == "ring") return TopologyKind::ring;
  if (text == "line") return TopologyKind::line;
  if (text == "complete") return TopologyKind::complete;
  throw ConfigError(fmt::format(
      "unknown topology '{}' (expected torus-grid, ring, line or complete)", text));
}

// ---------------------------------------------------------------------------
// TopologySpec

std::size_t TopologySpec::node_count() const {
  if (kind == TopologyKind::torus_grid) return checked_power(side, dimension);
  return n;
}

void TopologySpec::validate() const {
  require_positive_rate("lambda", lambda);
  require_positive_rate("lambda_e", lambda_e);
  switch (kind) {
    case TopologyKind::torus_grid: {
      if (dimension < 1) {
        throw ConfigError(fmt::format("torus dimension must be >= 1, got {}", dimension));
      }
      if (side < 3) {
        throw ConfigError(fmt::format(
            "torus side must be >= 3 (side {} makes wrap-around neighbors coincide)", side));
      }
      const std::size_t expected = checked_power(side, dimension);
      if (n != 0 && n != expected) {
        throw ConfigError(fmt::format("torus n={} does not match side^d = {}^{} = {}", n, side,
                                      dimension, expected));
      }
      break;
    }
    case TopologyKind::ring:
      if (n < 3) {
        throw ConfigError(fmt::format("ring needs n >= 3 distinct neighbors, got n={}", n));
      }
      break;
    case TopologyKind::line:
    case TopologyKind::complete:
      if (n < 1) throw ConfigError("n must be >= 1");
      break;
    case TopologyKind::open_grid:
      throw ConfigError("open-grid is not a configurable topology");
  }
  if (node_count() > kMaxNodes) throw ConfigError("node count too large");
}

std::string TopologySpec::describe() const {
  switch (kind) {
    case TopologyKind::torus_grid:
      return fmt::format("torus-grid d={} L={}", dimension, side);
    default:
      return fmt::format("{} n={}", to_string(kind), n);
  }
}

std::map<std::string, std::string> TopologySpec::to_key_values() const {
  std::map<std::string, std::string> kv;
  kv["kind"] = std::string(to_string(kind));
  kv["d"] = fmt::format("{}", dimension);
  kv["side"] = fmt::format("{}", side);
  kv["n"] = fmt::format("{}", node_count());
  kv["lambda"] = fmt::format("{}", lambda);
  kv["lambda_e"] = fmt::format("{}", lambda_e);
  return kv;
}

TopologySpec TopologySpec::from_key_values(const std::map<std::string, std::string>& kv) {
  TopologySpec spec;
  bool n_given = false;
  for (const auto& [key, value] : kv) {
    if (key == "kind") {
      spec.kind = parse_topology_kind(value);
    } else if (key == "d") {
      spec.dimension = static_cast<int>(parse_integer(key, value));
    } else if (key == "side") {
      const long long s = parse_integer(key, value);
      if (s < 0) throw ConfigError("side must be nonnegative");
      spec.side = static_cast<std::size_t>(s);
    } else if (key == "n") {
      const long long v = parse_integer(key, value);
      if (v < 0) throw ConfigError("n must be nonnegative");
      spec.n = static_cast<std::size_t>(v);
      n_given = true;
    } else if (key == "lambda") {
      spec.lambda = parse_double(key, value);
    } else if (key == "lambda_e") {
      spec.lambda_e = parse_double(key, value);
    } else {
      throw ConfigError(fmt::format("unknown topology key '{}'", key));
    }
  }
  if (!n_given && spec.kind != TopologyKind::torus_grid) {
    throw ConfigError(fmt::format("topology '{}' requires n", to_string(spec.kind)));
  }
  return spec;
}

// ---------------------------------------------------------------------------
// GossipNetwork

GossipNetwork::GossipNetwork(std::size_t n, std::vector<std::vector<Link>> out_links,
                             std::vector<double> source_rates, double lambda, double lambda_e,
                             TopologyTag tag)
    : n_(n),
      out_(std::move(out_links)),
      in_(n),
      source_rates_(std::move(source_rates)),
      lambda_(lambda),
      lambda_e_(lambda_e),
      tag_(tag) {
  if (n_ == 0) throw ConfigError("network must have at least one node");
  if (out_.size() != n_ || source_rates_.size() != n_) {
    throw ConfigError("link and source-rate tables must have one entry per node");
  }
  require_positive_rate("lambda", lambda_);
  require_positive_rate("lambda_e", lambda_e_);
  for (std::size_t i = 0; i < n_; ++i) {
    auto& links = out_[i];
    std::sort(links.begin(), links.end(),
              [](const Link& a, const Link& b) { return a.target < b.target; });
    for (std::size_t k = 0; k < links.size(); ++k) {
      const Link& l = links[k];
      if (l.target >= n_ || l.target == i) {
        throw ConfigError(fmt::format("invalid link {} -> {}", i, l.target));
      }
      if (k > 0 && links[k - 1].target == l.target) {
        throw ConfigError(fmt::format("duplicate link {} -> {}", i, l.target));
      }
      if (!(l.rate > 0.0) || !std::isfinite(l.rate)) {
        throw ConfigError(fmt::format("link {} -> {} has nonpositive rate", i, l.target));
      }
      in_[l.target].push_back({static_cast<NodeId>(i), l.rate});
      if (l.rate != links.front().rate) uniform_out_rates_ = false;
    }
    if (!(source_rates_[i] >= 0.0) || !std::isfinite(source_rates_[i])) {
      throw ConfigError(fmt::format("node {} has an invalid source rate", i));
    }
  }
}

double GossipNetwork::gossip_rate(NodeId i, NodeId j) const {
  const auto& links = out_[i];
  auto it = std::lower_bound(links.begin(), links.end(), j,
                             [](const Link& l, NodeId t) { return l.target < t; });
  return (it != links.end() && it->target == j) ? it->rate : 0.0;
}

double GossipNetwork::out_rate(NodeId i) const {
  double total = 0.0;
  for (const Link& l : out_[i]) total += l.rate;
  return total;
}

bool GossipNetwork::is_connected() const {
  return is_connected_subset(*this, NodeSubset::full(n_));
}

std::uint64_t GossipNetwork::fingerprint() const {
  std::vector<std::uint64_t> signatures(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    std::vector<double> outs, ins;
    for (const Link& l : out_[i]) outs.push_back(l.rate);
    for (const Link& l : in_[i]) ins.push_back(l.rate);
    std::sort(outs.begin(), outs.end());
    std::sort(ins.begin(), ins.end());
    std::uint64_t h = mix(0, outs.size());
    for (double r : outs) h = mix_double(h, r);
    h = mix(h, ins.size());
    for (double r : ins) h = mix_double(h, r);
    signatures[i] = mix_double(h, source_rates_[i]);
  }
  std::sort(signatures.begin(), signatures.end());
  std::uint64_t h = mix_double(mix(0, n_), lambda_e_);
  for (std::uint64_t s : signatures) h = mix(h, s);
  return h;
}

std::vector<std::size_t> GossipNetwork::coordinates(NodeId i) const {
  if (tag_.kind != TopologyKind::torus_grid && tag_.kind != TopologyKind::ring &&
      tag_.kind != TopologyKind::open_grid) {
    throw PreconditionError("coordinates are only defined for grid topologies");
  }
  std::vector<std::size_t> c(static_cast<std::size_t>(tag_.dimension));
  std::size_t rest = i;
  for (std::size_t k = c.size(); k-- > 0;) {
    c[k] = rest % tag_.side;
    rest /= tag_.side;
  }
  return c;
}

NodeId GossipNetwork::node_at(std::span<const std::size_t> coords) const {
  if (coords.size() != static_cast<std::size_t>(tag_.dimension) || tag_.side == 0) {
    throw PreconditionError("coordinate arity does not match the grid dimension");
  }
  std::size_t idx = 0;
  for (std::size_t c : coords) idx = idx * tag_.side + (c % tag_.side);
  return static_cast<NodeId>(idx);
}

// ---------------------------------------------------------------------------
// builders and set queries

GossipNetwork build_network(const TopologySpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case TopologyKind::torus_grid:
      return build_torus(spec.side, spec.dimension, spec.lambda, spec.lambda_e,
                         TopologyKind::torus_grid);
    case TopologyKind::ring:
      return build_torus(spec.n, 1, spec.lambda, spec.lambda_e, TopologyKind::ring);
    case TopologyKind::line:
      return build_line(spec.n, spec.lambda, spec.lambda_e);
    case TopologyKind::complete:
      return build_complete(spec.n, spec.lambda, spec.lambda_e);
    case TopologyKind::open_grid:
      break;
  }
  throw ConfigError("unsupported topology kind");
}

GossipNetwork open_grid_network(std::size_t side, double lambda, double lambda_e) {
  if (side < 2) throw ConfigError("open grid side must be >= 2");
  require_positive_rate("lambda", lambda);
  const std::size_t n = checked_power(side, 2);
  std::vector<std::vector<Link>> out(n);
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      auto& links = out[r * side + c];
      if (r > 0) links.push_back({static_cast<NodeId>((r - 1) * side + c), lambda / 4.0});
      if (r + 1 < side) links.push_back({static_cast<NodeId>((r + 1) * side + c), lambda / 4.0});
      if (c > 0) links.push_back({static_cast<NodeId>(r * side + c - 1), lambda / 4.0});
      if (c + 1 < side) links.push_back({static_cast<NodeId>(r * side + c + 1), lambda / 4.0});
    }
  }
  return GossipNetwork(n, std::move(out), uniform_source_rates(n, lambda), lambda, lambda_e,
                       TopologyTag{TopologyKind::open_grid, 2, side});
}

namespace {
void check_subset(const GossipNetwork& net, const NodeSubset& set) {
  if (set.universe() != net.size()) {
    throw PreconditionError(fmt::format("subset universe {} does not match network size {}",
                                        set.universe(), net.size()));
  }
}
}  // namespace

NodeSubset neighbors_of_set(const GossipNetwork& net, const NodeSubset& set) {
  check_subset(net, set);
  if (set.empty()) throw PreconditionError("neighbors_of_set requires a nonempty subset");
  NodeSubset out(net.size());
  set.for_each([&](NodeId j) {
    for (const Link& l : net.in_links(j)) {
      if (!set.contains(l.target)) out.insert(l.target);
    }
  });
  return out;
}

double lambda_into_set(const GossipNetwork& net, NodeId i, const NodeSubset& set) {
  check_subset(net, set);
  if (i >= net.size()) throw PreconditionError(fmt::format("node {} out of range", i));
  if (set.contains(i)) return 0.0;
  double total = 0.0;
  for (const Link& l : net.out_links(i)) {
    if (set.contains(l.target)) total += l.rate;
  }
  return total;
}

double source_rate_into_set(const GossipNetwork& net, const NodeSubset& set) {
  check_subset(net, set);
  double total = 0.0;
  set.for_each([&](NodeId j) { total += net.source_rate(j); });
  return total;
}

bool is_connected_subset(const GossipNetwork& net, const NodeSubset& set) {
  check_subset(net, set);
  if (set.empty()) return false;
  const auto members = set.members();
  NodeSubset seen(net.size());
  std::queue<NodeId> frontier;
  frontier.push(members.front());
  seen.insert(members.front());
  auto visit = [&](NodeId v) {
    if (set.contains(v) && !seen.contains(v)) {
      seen.insert(v);
      frontier.push(v);
    }
  };
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (const Link& l : net.out_links(u)) visit(l.target);
    for (const Link& l : net.in_links(u)) visit(l.target);
  }
  return seen.size() == set.size();
}

}  // namespace gossip_age
