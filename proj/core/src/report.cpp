#include "gossip_age/report.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "gossip_age/bounds.hpp"
#include "gossip_age/errors.hpp"
#include "gossip_age/isoperimetry.hpp"

namespace gossip_age::bounds {

BoundReport make_bound_report(std::size_t n, double lambda_e, double lambda,
                              std::optional<std::size_t> j, std::optional<double> v_max) {
  if (n < 8) throw PreconditionError("bound reports need n >= 8");
  BoundReport r;
  r.n = n;
  r.j = j;
  r.lambda_e = lambda_e;
  r.lambda = lambda;
  if (j) {
    r.e_lower = grid_E_lower_bound(n, *j);
    if (v_max && 4 * *j <= 3 * n) r.lemma3 = lemma3_bound(*v_max, *j, n, lambda_e, lambda);
  }
  const XBound x = theorem_X_bound(n, lambda_e, lambda);
  const YBound y = theorem_Y_bound(n, lambda_e, lambda);
  r.x_sum = x.exact;
  r.x_sum_relaxed = x.relaxed;
  r.y_sum = y.value;
  r.limits_floored = x.limits_floored || y.limits_floored;
  r.closed_form = closed_form_bound(n, lambda_e, lambda);
  r.beta = beta_constant().quadrature;
  r.beta_prime = beta_prime();
  return r;
}

namespace {

nlohmann::ordered_json as_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  if (r.j) j["j"] = *r.j;
  j["lambda_e"] = r.lambda_e;
  j["lambda"] = r.lambda;
  if (r.lemma3) j["lemma3"] = *r.lemma3;
  if (r.e_lower) j["E_lower"] = *r.e_lower;
  j["X_sum"] = r.x_sum;
  j["X_sum_relaxed"] = r.x_sum_relaxed;
  j["Y_sum"] = r.y_sum;
  j["limits_floored"] = r.limits_floored;
  j["closed_form"] = r.closed_form;
  j["beta"] = r.beta;
  j["beta_prime"] = r.beta_prime;
  return j;
}

}  // namespace

std::string to_json(const BoundReport& report, int indent) {
  return as_json(report).dump(indent) + "\n";
}

std::string to_csv(const BoundReport& report) {
  const auto j = as_json(report);
  std::string header, row;
  for (const auto& [key, value] : j.items()) {
    if (!header.empty()) {
      header += ',';
      row += ',';
    }
    header += key;
    row += value.is_boolean() ? (value.get<bool>() ? "true" : "false") : value.dump();
  }
  return "# gossip-age v1\n" + header + "\n" + row + "\n";
}

}  // namespace gossip_age::bounds
