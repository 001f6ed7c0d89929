#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "gossip_age/topology.hpp"

namespace gossip_age {

enum class Estimator {
  /// Time average of X_0(t), the age of node 0.
  single_node,
  /// Mean over nodes of each node's time-averaged age.
  symmetry_averaged,
  /// Time average of min_i X_i(t), the age of the whole network.
  network_min,
};

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view text);

struct SimConfig {
  /// Total simulated time. Zero selects default_horizon(net).
  double horizon = 0.0;
  /// Discarded initial time. Negative selects 10% of the horizon.
  double warmup = -1.0;
  std::uint64_t seed = 1;
  std::size_t replications = 1;
  Estimator estimator = Estimator::symmetry_averaged;
  /// Worker threads for replications; 0 uses the hardware concurrency.
  std::size_t threads = 0;
  /// Batches used for the standard error when replications == 1.
  std::size_t batches = 10;
  bool keep_per_node = false;

  /// Resolves defaults against a network and validates. Throws ConfigError.
  SimConfig resolved(const GossipNetwork& net) const;
};

/// Default horizon: 200 * n / lambda time units.
double default_horizon(const GossipNetwork& net);

struct EventCounts {
  std::uint64_t source_self = 0;
  std::uint64_t source_push = 0;
  std::uint64_t gossip_accepted = 0;
  std::uint64_t gossip_rejected = 0;
  /// Gossip clock ticks that land on a node's unused rate budget (line end
  /// nodes, isolated nodes). Not part of the reported categories.
  std::uint64_t gossip_idle = 0;

  std::uint64_t total() const {
    return source_self + source_push + gossip_accepted + gossip_rejected + gossip_idle;
  }
  EventCounts& operator+=(const EventCounts& o);
  friend bool operator==(const EventCounts&, const EventCounts&) = default;
};

struct SimResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::vector<double> per_node;
  /// One estimate per replication, in replication order.
  std::vector<double> replication_estimates;
  EventCounts events;
  /// Time over which averages were taken, summed across replications.
  double observed_time = 0.0;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// Version counters of a running process. Versions start at zero.
struct VersionState {
  std::uint64_t source_version = 0;
  std::vector<std::uint64_t> node_version;
  double clock = 0.0;

  std::uint64_t age(NodeId i) const { return source_version - node_version[i]; }
};

enum class EventKind : std::uint8_t {
  source_self,
  source_push,
  gossip_accepted,
  gossip_rejected,
  gossip_idle,
};

struct Event {
  EventKind kind;
  double time;
  /// Sender for gossip events; unused otherwise.
  NodeId from = 0;
  /// Receiver for pushes and gossip.
  NodeId to = 0;
  /// Receiver's version before the event.
  std::uint64_t previous_version = 0;
};

/// One replication of the version-age process driven by a merged Poisson
/// clock of total rate lambda_e + sum_i lambda_0i + n * lambda. The
/// category of each tick is chosen by thinning; the receiving node of a
/// source push is drawn proportional to lambda_0i and the gossip target
/// proportional to lambda_ij (a node's unused budget becomes an idle tick).
class VersionAgeProcess {
 public:
  VersionAgeProcess(const GossipNetwork& net, std::uint64_t seed);

  /// Samples and applies the next event.
  Event step();

  const VersionState& state() const { return state_; }
  double total_rate() const { return total_rate_; }
  /// Time of the next event without applying it; repeated calls return the
  /// same value.
  double peek_next_time();

 private:
  double uniform01();
  std::uint64_t uniform_index(std::uint64_t bound);
  NodeId pick_source_target();
  NodeId pick_gossip_target(NodeId from, bool& idle);

  const GossipNetwork& net_;
  std::mt19937_64 rng_;
  VersionState state_;
  double total_rate_;
  double p_self_;
  double p_push_;
  bool uniform_source_;
  std::vector<double> source_cdf_;
  std::optional<double> pending_time_;
};

/// Derives the seed of replication `index` from a master seed.
std::uint64_t replication_seed(std::uint64_t master, std::uint64_t index);

/// Runs cfg.replications independent replications and aggregates the chosen
/// estimator's time average over [warmup, horizon]. Deterministic for a
/// given (net, cfg) irrespective of thread count.
SimResult simulate(const GossipNetwork& net, const SimConfig& cfg);

/// simulate() with the estimator fixed to the symmetry-averaged estimator on
/// vertex-transitive networks (torus, ring, complete) and to node 0 otherwise.
SimResult estimate_single_node_age(const GossipNetwork& net, SimConfig cfg);

/// Simulates each spec in order. An empty list is rejected; a failing spec
/// is rethrown as ConfigError/runtime_error naming the spec.
std::vector<SimResult> replicate_sweep(std::span<const TopologySpec> specs, const SimConfig& cfg,
                                       bool single_node = true);

}  // namespace gossip_age
