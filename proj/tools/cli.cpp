#include "cli.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "gossip_age/bounds.hpp"
#include "gossip_age/errors.hpp"
#include "gossip_age/exact.hpp"
#include "gossip_age/isoperimetry.hpp"
#include "gossip_age/kv_config.hpp"
#include "gossip_age/report.hpp"
#include "gossip_age/sim.hpp"
#include "gossip_age/topology.hpp"

namespace gossip_age::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kSchema = "gossip-age v1";

// Every key accepted from a config file; flags use the same names with '-'.
const std::set<std::string> kKnownKeys = {
    "topology", "dim",      "side",   "n",         "lambda",    "lambda_e",    "seed",
    "reps",     "horizon",  "warmup", "estimator", "threads",   "out",         "format",
    "full",     "j",        "vmax",   "n_max",     "floor_alpha", "sides",     "max_nodes",
};

/// Signals a failed verification; mapped to kVerificationFailed.
struct VerificationFailure {};

/// Raw settings: config file entries overlaid by explicitly given flags.
class Settings {
 public:
  KeyValues flags;
  std::string config_path;

  void resolve() {
    if (!config_path.empty()) {
      for (const auto& [key, value] : load_key_values(config_path)) {
        if (!kKnownKeys.contains(key)) {
          throw ConfigError(fmt::format("unknown key '{}' in {}", key, config_path));
        }
        merged_[key] = value;
      }
    }
    for (const auto& [key, value] : flags) merged_[key] = value;
  }

  bool has(const std::string& key) const { return merged_.contains(key); }

  std::string str(const std::string& key, const std::string& fallback = "") const {
    auto it = merged_.find(key);
    return it == merged_.end() ? fallback : it->second;
  }

  double real(const std::string& key, double fallback) const {
    return has(key) ? parse_double(key, str(key)) : fallback;
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const long long v = parse_integer(key, str(key));
    if (v < 0) throw ConfigError(fmt::format("{} must be nonnegative, got {}", key, v));
    return static_cast<std::size_t>(v);
  }

  bool flag(const std::string& key) const {
    if (!has(key)) return false;
    const std::string v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(fmt::format("{} must be a boolean, got '{}'", key, v));
  }

  std::vector<std::size_t> count_list(const std::string& key) const {
    std::vector<std::size_t> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) throw ConfigError(fmt::format("empty entry in {}", key));
      const long long v = parse_integer(key, item);
      if (v < 0) throw ConfigError(fmt::format("{} entries must be nonnegative", key));
      out.push_back(static_cast<std::size_t>(v));
    }
    return out;
  }

  TopologySpec topology() const {
    KeyValues kv;
    kv["kind"] = str("topology", "torus-grid");
    if (has("dim")) kv["d"] = str("dim");
    if (has("side")) kv["side"] = str("side");
    if (has("n")) kv["n"] = str("n");
    if (has("lambda")) kv["lambda"] = str("lambda");
    if (has("lambda_e")) kv["lambda_e"] = str("lambda_e");
    TopologySpec spec = TopologySpec::from_key_values(kv);
    spec.validate();
    return spec;
  }

  SimConfig sim() const {
    SimConfig cfg;
    cfg.horizon = real("horizon", 0.0);
    cfg.warmup = real("warmup", -1.0);
    if (has("seed")) {
      const std::string s = str("seed");
      std::uint64_t seed = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError(fmt::format("seed must be an unsigned integer, got '{}'", s));
      }
      cfg.seed = seed;
    }
    cfg.replications = count("reps", 1);
    cfg.threads = count("threads", 0);
    if (has("estimator")) cfg.estimator = parse_estimator(str("estimator"));
    return cfg;
  }

  bool json() const {
    const std::string f = str("format", "csv");
    if (f == "csv") return false;
    if (f == "json") return true;
    throw ConfigError(fmt::format("format must be csv or json, got '{}'", f));
  }

 private:
  KeyValues merged_;
};

// ---------------------------------------------------------------------------
// Output

/// Column-ordered rows rendered either as versioned CSV or as JSON with the
/// same field names.
struct Table {
  Table(std::string cmd, std::vector<std::string> cols)
      : command(std::move(cmd)), columns(std::move(cols)) {}

  std::string command;
  std::vector<std::string> columns;
  std::vector<Json> rows;
  Json summary = Json::object();

  void add(std::initializer_list<Json> values) {
    GOSSIP_AGE_ASSERT(values.size() == columns.size(), "row width differs from header");
    Json row = Json::object();
    std::size_t c = 0;
    for (const Json& v : values) row[columns[c++]] = v;
    rows.push_back(std::move(row));
  }
};

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + "\"";
  }
  return v.dump();
}

std::string render(const Table& t, bool json) {
  if (json) {
    Json doc = Json::object();
    doc["schema"] = kSchema;
    doc["command"] = t.command;
    for (const auto& [key, value] : t.summary.items()) doc[key] = value;
    doc["rows"] = t.rows;
    return doc.dump(2) + "\n";
  }
  std::string out = fmt::format("# {}\n", kSchema);
  for (const auto& [key, value] : t.summary.items()) {
    out += fmt::format("# {}={}\n", key, csv_cell(value));
  }
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    out += (c ? "," : "") + t.columns[c];
  }
  out += '\n';
  for (const Json& row : t.rows) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      out += (c ? "," : "") + csv_cell(row.at(t.columns[c]));
    }
    out += '\n';
  }
  return out;
}

void emit(const Settings& s, const std::string& text, std::ostream& out) {
  const std::string path = s.str("out");
  if (path.empty() || path == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
  file << text;
  if (!file.flush()) throw std::runtime_error(fmt::format("failed writing '{}'", path));
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

// ---------------------------------------------------------------------------
// Subcommands

int cmd_simulate(const Settings& s, std::ostream& out) {
  const TopologySpec spec = s.topology();
  const GossipNetwork net = build_network(spec);
  SimConfig cfg = s.sim();
  SimResult r;
  if (s.has("estimator")) {
    r = simulate(net, cfg);
  } else {
    r = estimate_single_node_age(net, cfg);
    const bool transitive = spec.kind != TopologyKind::line;
    cfg.estimator = transitive ? Estimator::symmetry_averaged : Estimator::single_node;
  }
  const SimConfig resolved = cfg.resolved(net);

  Table t{"simulate",
          {"topology", "n", "lambda", "lambda_e", "estimator", "seed", "reps", "horizon",
           "warmup", "estimate", "stderr", "events", "observed_time"}};
  t.add({spec.describe(), net.size(), spec.lambda, spec.lambda_e,
         std::string(to_string(resolved.estimator)), resolved.seed, resolved.replications,
         resolved.horizon, resolved.warmup, r.estimate, r.std_error, r.events.total(),
         r.observed_time});
  emit(s, render(t, s.json()), out);
  return kOk;
}

int cmd_exact(const Settings& s, std::ostream& out) {
  const TopologySpec spec = s.topology();
  const GossipNetwork net = build_network(spec);
  SolverLimits limits;
  limits.max_nodes = s.count("max_nodes", limits.max_nodes);
  const AgeTable table = solve_version_ages(net, limits);

  Table t{"exact", {"subset", "size", "v_S"}};
  t.summary["topology"] = spec.describe();
  t.summary["n"] = net.size();
  t.summary["singleton_mean"] = table.singleton_mean();
  t.summary["singleton_min"] = table.singleton_min();
  t.summary["singleton_max"] = table.singleton_max();
  for (std::uint64_t m : table.subsets()) {
    t.add({NodeSubset::from_mask(net.size(), m).to_hex(), std::popcount(m), table.age(m)});
  }
  emit(s, render(t, s.json()), out);
  return kOk;
}

int cmd_bounds(const Settings& s, std::ostream& out) {
  const TopologySpec spec = s.topology();
  const std::size_t n = spec.node_count();
  std::optional<std::size_t> j;
  std::optional<double> v_max;
  if (s.has("j")) j = s.count("j", 0);
  if (s.has("vmax")) v_max = s.real("vmax", 0.0);
  if (v_max && !j) throw ConfigError("--vmax requires --j");
  const auto report = bounds::make_bound_report(n, spec.lambda_e, spec.lambda, j, v_max);
  emit(s, s.json() ? bounds::to_json(report) : bounds::to_csv(report), out);
  return kOk;
}

int cmd_isoperimetry(const Settings& s, std::ostream& out) {
  const std::size_t side = s.count("side", 5);
  const std::size_t n = side * side;
  TopologySpec spec;
  spec.side = side;
  spec.validate();
  const GossipNetwork torus = build_network(spec);

  std::vector<std::size_t> sizes;
  std::vector<bounds::BoundaryMinimum> profile;
  if (s.has("j")) {
    sizes.push_back(s.count("j", 0));
  } else if (side <= 5) {
    profile = bounds::min_boundary_profile(side);
    for (std::size_t j = 1; j < n; ++j) sizes.push_back(j);
  } else {
    for (std::size_t j = 1; j < n && j <= 12; ++j) sizes.push_back(j);
  }

  Table t{"isoperimetry",
          {"side", "n", "j", "min_E", "witness", "E_lower", "spiral_E", "bound_holds"}};
  bool all_hold = true;
  for (std::size_t j : sizes) {
    const bounds::BoundaryMinimum m =
        profile.empty() ? bounds::min_boundary_bruteforce(side, j) : profile[j - 1];
    const std::size_t lower = bounds::grid_E_lower_bound(n, j);
    Json spiral = nullptr;
    try {
      spiral = bounds::edge_partition(torus, bounds::spiral_subset(side, j)).e_total;
    } catch (const PreconditionError&) {
      // spiral wraps around the torus at this size
    }
    const bool holds = m.min_edges >= lower;
    all_hold = all_hold && holds;
    t.add({side, n, j, m.min_edges, NodeSubset::from_mask(n, m.witness).to_hex(), lower, spiral,
           holds});
  }
  emit(s, render(t, s.json()), out);
  if (!all_hold) throw VerificationFailure{};
  return kOk;
}

struct Check {
  std::string name;
  bool ok;
  std::string detail;
};

Check check_floor_inequality(std::size_t n_max, double alpha) {
  std::vector<std::size_t> ns;
  for (std::size_t n = 1; n <= n_max; ++n) ns.push_back(n);
  for (std::size_t extra : {std::size_t{100000}, std::size_t{1000000}}) {
    if (extra > n_max) ns.push_back(extra);
  }
  for (std::size_t n : ns) {
    const auto r = bounds::floor_inequality_check(n, alpha);
    if (!r.holds) {
      return {"floor_inequality", false,
              fmt::format("fails at n={}: lhs={} > rhs={} (alpha={})", n, r.lhs, r.rhs, alpha)};
    }
  }
  return {"floor_inequality", true,
          fmt::format("holds for n=1..{} and {} larger n (alpha={})", n_max,
                      ns.size() - n_max, alpha)};
}

Check check_proof_functions() {
  const auto r = bounds::proof_function_checks();
  if (!r.ok()) {
    return {"proof_functions", false,
            fmt::format("{} violations, first: {}", r.failures.size(), r.failures.front())};
  }
  return {"proof_functions", true,
          fmt::format("f decreasing and >= 0 over {} samples (f(2)={}); g decreasing over {} "
                      "samples (max slope {})",
                      r.f_samples, r.f_at_2, r.g_samples, r.g_max_slope)};
}

Check check_sandwich(const std::string& label, const GossipNetwork& net) {
  constexpr double kTol = 1e-9;
  const AgeTable table = solve_version_ages(net);
  const std::uint64_t full = net.size() == 64 ? ~std::uint64_t{0}
                                               : (std::uint64_t{1} << net.size()) - 1;
  std::size_t checked = 0;
  for (std::uint64_t m : table.subsets()) {
    if (m == full) continue;
    const NodeSubset sub = NodeSubset::from_mask(net.size(), m);
    const double v = table.age(m);
    const double lo = lemma2_lower_bound(net, sub, table);
    const double hi = lemma1_upper_bound(net, sub, table);
    if (lo > v + kTol || v > hi + kTol) {
      return {"sandwich " + label, false,
              fmt::format("violated at S={}: {} <= {} <= {}", sub.to_hex(), lo, v, hi)};
    }
    ++checked;
  }
  return {"sandwich " + label, true, fmt::format("{} connected proper subsets", checked)};
}

Check check_beta() {
  const auto b = bounds::beta_constant();
  const double gap = std::abs(b.quadrature - b.closed_form);
  return {"beta_identity", gap < 1e-8,
          fmt::format("quadrature={} closed_form={} gap={}", b.quadrature, b.closed_form, gap)};
}

Check check_coefficient() {
  const double bp = bounds::beta_prime();
  const double gap = std::abs(2.0 * bp - bounds::kClosedFormCoefficient);
  return {"closed_form_coefficient", gap <= 1e-3,
          fmt::format("2*beta_prime={} coefficient={} gap={}", 2.0 * bp,
                      bounds::kClosedFormCoefficient, gap)};
}

int cmd_verify(const Settings& s, std::ostream& out) {
  const std::size_t n_max = s.count("n_max", 10000);
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  const double alpha = s.real("floor_alpha", std::numbers::sqrt3);

  auto spec_of = [](TopologyKind kind, std::size_t n, std::size_t side) {
    TopologySpec spec;
    spec.kind = kind;
    spec.n = n;
    spec.side = side;
    return build_network(spec);
  };

  std::vector<Check> checks;
  checks.push_back(check_floor_inequality(n_max, alpha));
  checks.push_back(check_proof_functions());
  checks.push_back(check_sandwich("torus L=4", spec_of(TopologyKind::torus_grid, 0, 4)));
  checks.push_back(check_sandwich("ring n=8", spec_of(TopologyKind::ring, 8, 0)));
  checks.push_back(check_sandwich("line n=8", spec_of(TopologyKind::line, 8, 0)));
  checks.push_back(check_sandwich("complete n=8", spec_of(TopologyKind::complete, 8, 0)));
  checks.push_back(check_beta());
  checks.push_back(check_coefficient());

  Table t{"verify", {"check", "status", "detail"}};
  bool all_ok = true;
  for (const Check& c : checks) {
    all_ok = all_ok && c.ok;
    t.add({c.name, c.ok ? "pass" : "fail", c.detail});
  }
  emit(s, render(t, s.json()), out);
  if (!all_ok) throw VerificationFailure{};
  return kOk;
}

int cmd_sweep(const Settings& s, std::ostream& out, std::ostream& err) {
  TopologySpec base = s.topology();
  if (base.kind != TopologyKind::torus_grid && base.kind != TopologyKind::ring) {
    throw ConfigError("sweep supports torus-grid and ring topologies");
  }
  std::vector<std::size_t> sides;
  if (s.has("sides")) {
    sides = s.count_list("sides");
  } else if (s.flag("full")) {
    for (std::size_t L = 10; L <= 100; L += 10) sides.push_back(L);
  } else {
    sides = {10, 20, 30, 40};
  }
  if (sides.empty()) throw ConfigError("sweep needs at least one side length");

  struct Row {
    TopologySpec spec;
    std::size_t n = 0;
  };
  std::vector<Row> plan;
  for (std::size_t L : sides) {
    TopologySpec spec = base;
    if (spec.kind == TopologyKind::ring) {
      spec.n = L;
    } else {
      spec.side = L;
      spec.n = 0;
    }
    std::size_t n = spec.kind == TopologyKind::ring ? L : 1;
    if (spec.kind == TopologyKind::torus_grid) {
      for (int d = 0; d < spec.dimension; ++d) n *= L;
    }
    plan.push_back({spec, n});
  }
  std::stable_sort(plan.begin(), plan.end(),
                   [](const Row& a, const Row& b) { return a.n < b.n; });

  const SimConfig cfg = s.sim();
  Table t{"sweep",
          {"n", "topology", "dim", "side", "estimate", "stderr", "bound_n13", "bound_18",
           "bound_145", "bound_closed", "status"}};
  bool any_failed = false;
  for (const Row& row : plan) {
    const double cbrt_n = std::cbrt(static_cast<double>(row.n));
    const int dim = row.spec.kind == TopologyKind::ring ? 1 : row.spec.dimension;
    const std::size_t side = row.spec.kind == TopologyKind::ring ? row.n : row.spec.side;
    Json estimate = nullptr, stderr_value = nullptr, closed = nullptr;
    std::string status = "ok";
    try {
      row.spec.validate();
      const GossipNetwork net = build_network(row.spec);
      const SimResult r = estimate_single_node_age(net, cfg);
      estimate = finite_or_null(r.estimate);
      stderr_value = finite_or_null(r.std_error);
      closed = bounds::closed_form_bound(row.n, row.spec.lambda_e, row.spec.lambda);
    } catch (const std::exception& e) {
      any_failed = true;
      status = fmt::format("error: {}", e.what());
      err << fmt::format("sweep: {} failed: {}\n", row.spec.describe(), e.what());
    }
    t.add({row.n, std::string(to_string(row.spec.kind)), dim, side, estimate, stderr_value,
           cbrt_n, 1.8 * cbrt_n, 1.45 * cbrt_n, closed, status});
  }
  emit(s, render(t, s.json()), out);
  return any_failed ? kRuntime : kOk;
}

// ---------------------------------------------------------------------------
// Wiring

void add_value(CLI::App* app, Settings& s, const std::string& name, const std::string& help) {
  std::string key = name;
  std::replace(key.begin(), key.end(), '-', '_');
  app->add_option_function<std::string>(
      "--" + name, [&s, key](const std::string& v) { s.flags[key] = v; }, help);
}

void add_common(CLI::App* app, Settings& s) {
  app->add_option("--config", s.config_path, "key=value file; flags override its entries");
  add_value(app, s, "topology", "torus-grid | ring | line | complete");
  add_value(app, s, "dim", "torus dimension");
  add_value(app, s, "side", "torus side length L");
  add_value(app, s, "n", "node count for ring, line and complete");
  add_value(app, s, "lambda", "total gossip rate per node");
  add_value(app, s, "lambda-e", "source self-update rate");
  add_value(app, s, "seed", "master seed");
  add_value(app, s, "out", "output file (default: standard output)");
  add_value(app, s, "format", "csv | json");
}

void add_sim(CLI::App* app, Settings& s) {
  add_value(app, s, "reps", "independent replications");
  add_value(app, s, "horizon", "simulated time per replication (default 200 n / lambda)");
  add_value(app, s, "warmup", "discarded initial time (default 10% of the horizon)");
  add_value(app, s, "estimator", "single-node | symmetry-averaged | network-min");
  add_value(app, s, "threads", "worker threads (default: hardware concurrency)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Version-age analysis of gossip networks", "gossip-age"};
  app.require_subcommand(1);
  Settings s;

  using Handler = std::function<int()>;
  std::map<CLI::App*, Handler> handlers;
  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* c = app.add_subcommand(name, help);
    add_common(c, s);
    return c;
  };

  CLI::App* simulate_cmd = sub("simulate", "Monte Carlo estimate of the version age");
  add_sim(simulate_cmd, s);
  handlers[simulate_cmd] = [&] { return cmd_simulate(s, out); };

  CLI::App* exact_cmd = sub("exact", "exact ages of every connected subset");
  add_value(exact_cmd, s, "max-nodes", "solver node cap (at most 24)");
  handlers[exact_cmd] = [&] { return cmd_exact(s, out); };

  CLI::App* bounds_cmd = sub("bounds", "analytic bounds for a 2D torus");
  add_value(bounds_cmd, s, "j", "subset size for the per-size bounds");
  add_value(bounds_cmd, s, "vmax", "largest expansion age for the per-size bound");
  handlers[bounds_cmd] = [&] { return cmd_bounds(s, out); };

  CLI::App* iso_cmd = sub("isoperimetry", "minimum incoming-edge counts on small tori");
  add_value(iso_cmd, s, "j", "single subset size");
  handlers[iso_cmd] = [&] { return cmd_isoperimetry(s, out); };

  CLI::App* verify_cmd = sub("verify", "numeric checks of the analytic inequalities");
  add_value(verify_cmd, s, "n-max", "floor inequality checked for n = 1..n-max");
  add_value(verify_cmd, s, "floor-alpha", "constant on the right side of the floor inequality");
  handlers[verify_cmd] = [&] { return cmd_verify(s, out); };

  CLI::App* sweep_cmd = sub("sweep", "simulated single-node age against reference curves");
  add_sim(sweep_cmd, s);
  add_value(sweep_cmd, s, "sides", "comma-separated side lengths (ring: node counts)");
  sweep_cmd->add_flag_callback("--full", [&s] { s.flags["full"] = "true"; },
                               "side lengths 10..100 instead of 10..40");
  handlers[sweep_cmd] = [&] { return cmd_sweep(s, out, err); };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // prints help for --help and the error otherwise
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    for (CLI::App* c : app.get_subcommands()) {
      s.resolve();
      return handlers.at(c)();
    }
    return kUsage;
  } catch (const VerificationFailure&) {
    return kVerificationFailed;
  } catch (const ConfigError& e) {
    err << "gossip-age: " << e.what() << "\n";
    return kUsage;
  } catch (const CapacityError& e) {
    err << "gossip-age: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    err << "gossip-age: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "gossip-age: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace gossip_age::cli
