#include "gossip_age/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "gossip_age/errors.hpp"

namespace gossip_age {

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::single_node: return "single-node";
    case Estimator::symmetry_averaged: return "symmetry-averaged";
    case Estimator::network_min: return "network-min";
  }
  return "unknown";
}

Estimator parse_estimator(std::string_view text) {
  if (text == "single-node") return Estimator::single_node;
  if (text == "symmetry-averaged") return Estimator::symmetry_averaged;
  if (text == "network-min") return Estimator::network_min;
  throw ConfigError(fmt::format(
      "unknown estimator '{}' (expected single-node, symmetry-averaged or network-min)", text));
}

double default_horizon(const GossipNetwork& net) {
  return 200.0 * static_cast<double>(net.size()) / net.lambda();
}

SimConfig SimConfig::resolved(const GossipNetwork& net) const {
  SimConfig out = *this;
  if (out.horizon == 0.0) out.horizon = default_horizon(net);
  if (!(out.horizon > 0.0) || !std::isfinite(out.horizon)) {
    throw ConfigError(fmt::format("horizon must be positive, got {}", out.horizon));
  }
  if (out.warmup < 0.0) out.warmup = 0.1 * out.horizon;
  if (!(out.warmup < out.horizon)) {
    throw ConfigError(
        fmt::format("warmup {} must be smaller than horizon {}", out.warmup, out.horizon));
  }
  if (out.replications < 1) throw ConfigError("replications must be >= 1");
  if (out.replications == 1 && out.batches < 2) {
    throw ConfigError("a single replication needs at least 2 batches for its standard error");
  }
  if (out.threads == 0) out.threads = std::max(1u, std::thread::hardware_concurrency());
  return out;
}

EventCounts& EventCounts::operator+=(const EventCounts& o) {
  source_self += o.source_self;
  source_push += o.source_push;
  gossip_accepted += o.gossip_accepted;
  gossip_rejected += o.gossip_rejected;
  gossip_idle += o.gossip_idle;
  return *this;
}

// ---------------------------------------------------------------------------
// VersionAgeProcess

VersionAgeProcess::VersionAgeProcess(const GossipNetwork& net, std::uint64_t seed)
    : net_(net), rng_(seed) {
  const std::size_t n = net.size();
  state_.node_version.assign(n, 0);
  double source_total = 0.0;
  source_cdf_.resize(n);
  uniform_source_ = true;
  for (std::size_t i = 0; i < n; ++i) {
    source_total += net.source_rate(static_cast<NodeId>(i));
    source_cdf_[i] = source_total;
    if (net.source_rate(static_cast<NodeId>(i)) != net.source_rate(0)) uniform_source_ = false;
  }
  total_rate_ = net.lambda_e() + source_total + static_cast<double>(n) * net.lambda();
  p_self_ = net.lambda_e();
  p_push_ = net.lambda_e() + source_total;
}

double VersionAgeProcess::uniform01() {
  // 53 random bits -> [0, 1)
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

std::uint64_t VersionAgeProcess::uniform_index(std::uint64_t bound) {
  const auto k = static_cast<std::uint64_t>(uniform01() * static_cast<double>(bound));
  return std::min(k, bound - 1);
}

NodeId VersionAgeProcess::pick_source_target() {
  if (uniform_source_) return static_cast<NodeId>(uniform_index(net_.size()));
  const double r = uniform01() * source_cdf_.back();
  const auto it = std::upper_bound(source_cdf_.begin(), source_cdf_.end(), r);
  return static_cast<NodeId>(std::min<std::size_t>(
      static_cast<std::size_t>(it - source_cdf_.begin()), net_.size() - 1));
}

NodeId VersionAgeProcess::pick_gossip_target(NodeId from, bool& idle) {
  const auto links = net_.out_links(from);
  idle = false;
  if (links.empty()) {
    idle = true;
    return from;
  }
  const double r = uniform01() * net_.lambda();
  if (net_.uniform_out_rates()) {
    const auto k = static_cast<std::size_t>(r / links.front().rate);
    if (k >= links.size()) {
      idle = true;
      return from;
    }
    return links[k].target;
  }
  double acc = 0.0;
  for (const Link& l : links) {
    acc += l.rate;
    if (r < acc) return l.target;
  }
  idle = true;
  return from;
}

double VersionAgeProcess::peek_next_time() {
  if (!pending_time_) {
    const double u = uniform01();
    pending_time_ = state_.clock - std::log1p(-u) / total_rate_;
  }
  return *pending_time_;
}

Event VersionAgeProcess::step() {
  const double t = peek_next_time();
  pending_time_.reset();
  state_.clock = t;

  Event ev{EventKind::source_self, t};
  const double r = uniform01() * total_rate_;
  if (r < p_self_) {
    if (state_.source_version == std::numeric_limits<std::uint64_t>::max()) {
      throw std::overflow_error("source version counter overflow");
    }
    ++state_.source_version;
    return ev;
  }
  if (r < p_push_) {
    const NodeId j = pick_source_target();
    ev.kind = EventKind::source_push;
    ev.to = j;
    ev.previous_version = state_.node_version[j];
    state_.node_version[j] = state_.source_version;
    return ev;
  }
  const NodeId i = static_cast<NodeId>(uniform_index(net_.size()));
  bool idle = false;
  const NodeId j = pick_gossip_target(i, idle);
  ev.from = i;
  ev.to = j;
  ev.previous_version = state_.node_version[j];
  if (idle) {
    ev.kind = EventKind::gossip_idle;
  } else if (state_.node_version[i] > state_.node_version[j]) {
    ev.kind = EventKind::gossip_accepted;
    state_.node_version[j] = state_.node_version[i];
  } else {
    ev.kind = EventKind::gossip_rejected;
  }
  return ev;
}

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 over (master, counter)
  std::uint64_t z = master + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// time-averaged estimators

namespace {

struct ReplicationOutput {
  double estimate = 0.0;
  std::vector<double> batch_means;
  std::vector<double> per_node;
  EventCounts events;
  double observed_time = 0.0;
};

/// Integrates the piecewise-constant age processes of one replication.
/// Aggregates (sum of ages, network minimum) are tracked incrementally; per
/// node integrals of N_i are kept lazily and combined with the integral of
/// N_s at read-out, so each event costs O(1).
class AgeIntegrator {
 public:
  AgeIntegrator(std::size_t n, const SimConfig& cfg)
      : n_(n),
        cfg_(cfg),
        node_integral_(n, 0.0),
        node_last_(n, 0.0),
        node_version_(n, 0) {
    accumulating_ = cfg.warmup <= 0.0;
    batch_len_ = (cfg.horizon - cfg.warmup) / static_cast<double>(cfg.batches);
    next_boundary_ = cfg.warmup + batch_len_;
  }

  void advance(double target) {
    while (now_ < target) {
      double seg_end = target;
      if (!accumulating_) seg_end = std::min(seg_end, cfg_.warmup);
      else if (boundary_index_ + 1 < cfg_.batches) seg_end = std::min(seg_end, next_boundary_);
      if (accumulating_) {
        const double dt = seg_end - now_;
        source_integral_ += static_cast<double>(source_version_) * dt;
        age_sum_integral_ += static_cast<double>(age_sum_) * dt;
        min_age_integral_ += static_cast<double>(source_version_ - max_version_) * dt;
      }
      now_ = seg_end;
      if (!accumulating_ && now_ >= cfg_.warmup) {
        accumulating_ = true;
        std::fill(node_last_.begin(), node_last_.end(), now_);
      } else if (accumulating_ && boundary_index_ + 1 < cfg_.batches && now_ >= next_boundary_) {
        snapshots_.push_back(estimator_integral());
        ++boundary_index_;
        next_boundary_ = cfg_.warmup + batch_len_ * static_cast<double>(boundary_index_ + 1);
      }
    }
  }

  void on_source_update() {
    ++source_version_;
    age_sum_ += n_;
  }

  void on_node_version(NodeId j, std::uint64_t old_version, std::uint64_t new_version) {
    if (new_version == old_version) return;
    if (accumulating_) {
      node_integral_[j] += static_cast<double>(old_version) * (now_ - node_last_[j]);
      node_last_[j] = now_;
    }
    node_version_[j] = new_version;
    age_sum_ -= (new_version - old_version);
    max_version_ = std::max(max_version_, new_version);
  }

  ReplicationOutput finish() {
    advance(cfg_.horizon);
    ReplicationOutput out;
    const double span = cfg_.horizon - cfg_.warmup;
    out.observed_time = span;
    out.estimate = estimator_integral() / span;
    snapshots_.push_back(estimator_integral());
    double prev = 0.0;
    for (double s : snapshots_) {
      out.batch_means.push_back((s - prev) / batch_len_);
      prev = s;
    }
    if (cfg_.keep_per_node || cfg_.estimator == Estimator::single_node) {
      out.per_node.resize(n_);
      for (std::size_t i = 0; i < n_; ++i) out.per_node[i] = node_age_integral(i) / span;
    }
    return out;
  }

 private:
  double node_age_integral(std::size_t i) const {
    const double version_integral =
        node_integral_[i] + static_cast<double>(node_version_[i]) * (now_ - node_last_[i]);
    return source_integral_ - version_integral;
  }

  double estimator_integral() const {
    switch (cfg_.estimator) {
      case Estimator::single_node: return node_age_integral(0);
      case Estimator::symmetry_averaged: return age_sum_integral_ / static_cast<double>(n_);
      case Estimator::network_min: return min_age_integral_;
    }
    return 0.0;
  }

  std::size_t n_;
  const SimConfig& cfg_;
  double now_ = 0.0;
  bool accumulating_ = false;

  std::uint64_t source_version_ = 0;
  std::uint64_t max_version_ = 0;
  std::uint64_t age_sum_ = 0;  // sum_i (N_s - N_i)

  double source_integral_ = 0.0;
  double age_sum_integral_ = 0.0;
  double min_age_integral_ = 0.0;
  std::vector<double> node_integral_;
  std::vector<double> node_last_;
  std::vector<std::uint64_t> node_version_;

  double batch_len_;
  double next_boundary_;
  std::size_t boundary_index_ = 0;
  std::vector<double> snapshots_;
};

ReplicationOutput run_replication(const GossipNetwork& net, const SimConfig& cfg,
                                  std::uint64_t seed) {
  VersionAgeProcess process(net, seed);
  AgeIntegrator integrator(net.size(), cfg);
  EventCounts counts;
  while (true) {
    const double t = process.peek_next_time();
    if (t > cfg.horizon) break;
    integrator.advance(t);
    const Event ev = process.step();
    switch (ev.kind) {
      case EventKind::source_self:
        ++counts.source_self;
        integrator.on_source_update();
        break;
      case EventKind::source_push:
        ++counts.source_push;
        integrator.on_node_version(ev.to, ev.previous_version,
                                   process.state().node_version[ev.to]);
        break;
      case EventKind::gossip_accepted:
        ++counts.gossip_accepted;
        integrator.on_node_version(ev.to, ev.previous_version,
                                   process.state().node_version[ev.to]);
        break;
      case EventKind::gossip_rejected: ++counts.gossip_rejected; break;
      case EventKind::gossip_idle: ++counts.gossip_idle; break;
    }
  }
  ReplicationOutput out = integrator.finish();
  out.events = counts;
  return out;
}

double sample_stderr(const std::vector<double>& xs) {
  const std::size_t k = xs.size();
  if (k < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(k);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k));
}

}  // namespace

SimResult simulate(const GossipNetwork& net, const SimConfig& raw_cfg) {
  const SimConfig cfg = raw_cfg.resolved(net);
  const std::size_t reps = cfg.replications;
  std::vector<ReplicationOutput> outputs(reps);
  std::vector<std::exception_ptr> errors(reps);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next.fetch_add(1); r < reps; r = next.fetch_add(1)) {
      try {
        outputs[r] = run_replication(net, cfg, replication_seed(cfg.seed, r));
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(cfg.threads, reps);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SimResult result;
  for (const auto& o : outputs) {
    result.replication_estimates.push_back(o.estimate);
    result.events += o.events;
    result.observed_time += o.observed_time;
  }
  result.estimate = std::accumulate(result.replication_estimates.begin(),
                                    result.replication_estimates.end(), 0.0) /
                    static_cast<double>(reps);
  result.std_error = reps >= 2 ? sample_stderr(result.replication_estimates)
                               : sample_stderr(outputs.front().batch_means);
  if (cfg.keep_per_node) {
    result.per_node.assign(net.size(), 0.0);
    for (const auto& o : outputs) {
      for (std::size_t i = 0; i < net.size(); ++i) result.per_node[i] += o.per_node[i];
    }
    for (double& v : result.per_node) v /= static_cast<double>(reps);
  }
  return result;
}

SimResult estimate_single_node_age(const GossipNetwork& net, SimConfig cfg) {
  switch (net.tag().kind) {
    case TopologyKind::torus_grid:
    case TopologyKind::ring:
    case TopologyKind::complete:
      cfg.estimator = Estimator::symmetry_averaged;
      break;
    default:
      cfg.estimator = Estimator::single_node;
      break;
  }
  return simulate(net, cfg);
}

std::vector<SimResult> replicate_sweep(std::span<const TopologySpec> specs, const SimConfig& cfg,
                                       bool single_node) {
  if (specs.empty()) throw ConfigError("sweep needs at least one topology");
  std::vector<SimResult> out;
  out.reserve(specs.size());
  for (std::size_t k = 0; k < specs.size(); ++k) {
    try {
      const GossipNetwork net = build_network(specs[k]);
      out.push_back(single_node ? estimate_single_node_age(net, cfg) : simulate(net, cfg));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("sweep entry {} ({}): {}", k, specs[k].describe(), e.what()));
    } catch (const std::exception& e) {
      throw std::runtime_error(
          fmt::format("sweep entry {} ({}): {}", k, specs[k].describe(), e.what()));
    }
  }
  return out;
}

}  // namespace gossip_age
