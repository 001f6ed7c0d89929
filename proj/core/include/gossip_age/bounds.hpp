#pragma once

#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

namespace gossip_age::bounds {

/// Coefficient of the asymptotic single-node bound c * (lambda_e/lambda) * n^(1/3).
inline constexpr double kClosedFormCoefficient = 6.5188;

/// Upper bound on v_S for a connected size-j subset of an n-node 2D torus,
/// given the largest age among its one-node expansions:
///   (2 lambda_e/lambda + floor(sqrt j) v_max) / (j/n + floor(sqrt j)).
/// Valid for j <= 3n/4; larger j throws PreconditionError.
double lemma3_bound(double v_max, std::size_t j, std::size_t n, double lambda_e, double lambda);

struct FloorInequality {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Compares
///   sum_{i<=n} prod_{j<=i} floor(sqrt j) / (floor(sqrt(j+1)) + j/n)
/// against alpha times the same sums with the floors removed. The product
/// terms are accumulated as running products, O(n).
FloorInequality floor_inequality_check(std::size_t n, double alpha = std::numbers::sqrt3);

/// f(x) = 1 - (1 + 1/x^2)^x sqrt((x-1)/(x+1)), evaluated without cancellation.
double proof_function_f(double x);

/// g(x) = (sqrt(1 + 1/x) + sqrt(x)/n) / (1 + x/(k n)).
double proof_function_g(double x, double k, double n);

struct ProofFunctionReport {
  std::size_t f_samples = 0;
  std::size_t g_samples = 0;
  double f_at_2 = 0.0;
  double f_at_max = 0.0;
  double f_min = 0.0;
  bool f_nonnegative = true;
  bool f_decreasing = true;
  bool g_decreasing = true;
  /// Largest forward-difference slope seen for g; negative when all checks pass.
  double g_max_slope = 0.0;
  std::vector<std::string> failures;

  bool ok() const { return f_nonnegative && f_decreasing && g_decreasing; }
};

/// Samples f on a log-spaced grid over [2, x_max] and g on every interval
/// [k^2, (k+1)^2 - 1) for the given k and n values.
ProofFunctionReport proof_function_checks(double x_max = 1e4,
                                          const std::vector<std::size_t>& ks = {},
                                          const std::vector<double>& ns = {100.0, 10000.0});

struct ASequenceTerm {
  double a = 0.0;
  /// -(1/2 (log i + gamma) - delta_i + 2 i^{3/2} / (3n))
  double log_approx = 0.0;
  /// delta_i = sum_{j<=i} 1/(8 j^2); bounded by pi^2/48.
  double delta = 0.0;
};

/// a_i = prod_{j<=i} 1 / (1 + 1/(2j) - 1/(8j^2) + sqrt(j)/n) and its
/// logarithmic approximation. Requires 1 <= i <= n.
ASequenceTerm a_sequence(std::size_t n, std::size_t i);

struct BetaConstant {
  /// Adaptive quadrature of int_0^inf t^{-1/2} exp(-(2/3) t^{3/2}) dt.
  double quadrature = 0.0;
  /// (2/3)^{2/3} Gamma(1/3).
  double closed_form = 0.0;
};

BetaConstant beta_constant();

/// sqrt(3) e^{-gamma/2} e^{pi^2/48} beta, with beta in closed form.
double beta_prime();

struct XBound {
  /// Finite sum with floors, prefactor (2 lambda_e/lambda) / (1 + 1/n).
  double exact = 0.0;
  /// Same with floors removed and the sqrt(3) factor applied.
  double relaxed = 0.0;
  /// Summation limit floor(3n/4) - 1 differs from 3n/4 - 1.
  bool limits_floored = false;
};

/// Bound on the sum of terms for subset sizes below 3n/4. Requires n >= 4.
XBound theorem_X_bound(std::size_t n, double lambda_e, double lambda);

struct YBound {
  double value = 0.0;
  bool limits_floored = false;
};

/// lambda_e/lambda + lambda_e/lambda (1 + H_{n/4 - 1}), the harmonic form of
/// the bound on terms for subset sizes above 3n/4. Requires n >= 8.
YBound theorem_Y_bound(std::size_t n, double lambda_e, double lambda);

/// kClosedFormCoefficient * (lambda_e/lambda) * n^{1/3}.
double closed_form_bound(std::size_t n, double lambda_e, double lambda);

}  // namespace gossip_age::bounds
