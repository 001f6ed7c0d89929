#pragma once

#include <cstddef>
#include <optional>
#include <string>

namespace gossip_age::bounds {

/// Evaluated analytic bounds for one (n, lambda_e, lambda), plus the
/// subset-size specific values when j is given.
struct BoundReport {
  std::size_t n = 0;
  std::optional<std::size_t> j;
  double lambda_e = 1.0;
  double lambda = 1.0;

  std::optional<double> lemma3;
  std::optional<std::size_t> e_lower;
  double x_sum = 0.0;
  double x_sum_relaxed = 0.0;
  double y_sum = 0.0;
  bool limits_floored = false;
  double closed_form = 0.0;
  double beta = 0.0;
  double beta_prime = 0.0;
};

/// Requires n >= 8. lemma3 is filled when j <= 3n/4 and v_max is given;
/// e_lower whenever j is given.
BoundReport make_bound_report(std::size_t n, double lambda_e, double lambda,
                              std::optional<std::size_t> j = std::nullopt,
                              std::optional<double> v_max = std::nullopt);

/// JSON object with keys n, j?, lambda_e, lambda, lemma3?, E_lower?, X_sum,
/// X_sum_relaxed, Y_sum, limits_floored, closed_form, beta, beta_prime.
std::string to_json(const BoundReport& report, int indent = 2);

/// CSV header comment, a column header row and one data row mirroring the JSON.
std::string to_csv(const BoundReport& report);

}  // namespace gossip_age::bounds
