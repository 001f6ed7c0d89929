#include "gossip_age/bounds.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "gossip_age/errors.hpp"
#include "gossip_age/isoperimetry.hpp"

namespace gossip_age::bounds {
namespace {

void require_rates(double lambda_e, double lambda) {
  if (!(lambda_e > 0.0) || !(lambda > 0.0)) {
    throw PreconditionError("lambda_e and lambda must be positive");
  }
}

double floor_sqrt(std::size_t x) { return static_cast<double>(isqrt(x)); }

}  // namespace

double lemma3_bound(double v_max, std::size_t j, std::size_t n, double lambda_e, double lambda) {
  require_rates(lambda_e, lambda);
  if (j < 1 || n < 1) throw PreconditionError("lemma3_bound needs j, n >= 1");
  if (4 * j > 3 * n) {
    throw PreconditionError(fmt::format(
        "lemma3_bound holds for j <= 3n/4 (j={}, n={}); use the complement-spiral regime", j, n));
  }
  const double fs = floor_sqrt(j);
  return (2.0 * lambda_e / lambda + fs * v_max) /
         (static_cast<double>(j) / static_cast<double>(n) + fs);
}

FloorInequality floor_inequality_check(std::size_t n, double alpha) {
  if (n < 1) throw PreconditionError("floor_inequality_check needs n >= 1");
  const double nd = static_cast<double>(n);
  double prod_floor = 1.0, prod_plain = 1.0;
  double sum_floor = 0.0, sum_plain = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double jd = static_cast<double>(j);
    prod_floor *= floor_sqrt(j) / (floor_sqrt(j + 1) + jd / nd);
    prod_plain *= std::sqrt(jd) / (std::sqrt(jd + 1.0) + jd / nd);
    sum_floor += prod_floor;
    sum_plain += prod_plain;
  }
  FloorInequality out;
  out.lhs = sum_floor;
  out.rhs = alpha * sum_plain;
  out.holds = out.lhs <= out.rhs;
  return out;
}

double proof_function_f(double x) {
  // 1 - exp(x log(1 + 1/x^2) + 1/2 log((x-1)/(x+1)))
  const double log_term = x * std::log1p(1.0 / (x * x)) + 0.5 * std::log1p(-2.0 / (x + 1.0));
  return -std::expm1(log_term);
}

double proof_function_g(double x, double k, double n) {
  return (std::sqrt(1.0 + 1.0 / x) + std::sqrt(x) / n) / (1.0 + x / (k * n));
}

ProofFunctionReport proof_function_checks(double x_max, const std::vector<std::size_t>& ks,
                                          const std::vector<double>& ns) {
  if (!(x_max > 2.0)) throw PreconditionError("x_max must exceed 2");
  ProofFunctionReport rep;

  constexpr std::size_t kFSamples = 4000;
  const double log_lo = std::log(2.0), log_hi = std::log(x_max);
  double prev = proof_function_f(2.0);
  rep.f_at_2 = prev;
  rep.f_min = prev;
  for (std::size_t s = 0; s <= kFSamples; ++s) {
    const double x = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(s) / kFSamples);
    const double fx = proof_function_f(x);
    ++rep.f_samples;
    rep.f_min = std::min(rep.f_min, fx);
    if (fx < 0.0) {
      rep.f_nonnegative = false;
      rep.failures.push_back(fmt::format("f({}) = {} < 0", x, fx));
    }
    if (s > 0 && !(fx < prev)) {
      rep.f_decreasing = false;
      rep.failures.push_back(fmt::format("f not decreasing at x = {}", x));
    }
    prev = fx;
    rep.f_at_max = fx;
  }

  std::vector<std::size_t> k_values = ks;
  if (k_values.empty()) {
    for (std::size_t k = 2; k <= 20; ++k) k_values.push_back(k);
  }
  constexpr std::size_t kGSamples = 200;
  rep.g_max_slope = -std::numeric_limits<double>::infinity();
  for (double n : ns) {
    for (std::size_t k : k_values) {
      const double kd = static_cast<double>(k);
      const double lo = kd * kd;
      const double hi = (kd + 1.0) * (kd + 1.0) - 1.0;
      const double h = (hi - lo) / kGSamples;
      double gprev = proof_function_g(lo, kd, n);
      for (std::size_t s = 1; s < kGSamples; ++s) {
        const double x = lo + h * static_cast<double>(s);
        const double gx = proof_function_g(x, kd, n);
        const double slope = (gx - gprev) / h;
        ++rep.g_samples;
        rep.g_max_slope = std::max(rep.g_max_slope, slope);
        if (!(slope < 0.0)) {
          rep.g_decreasing = false;
          rep.failures.push_back(fmt::format("g slope {} >= 0 at x={}, k={}, n={}", slope, x, k, n));
        }
        gprev = gx;
      }
    }
  }
  return rep;
}

ASequenceTerm a_sequence(std::size_t n, std::size_t i) {
  if (i < 1 || i > n) throw PreconditionError(fmt::format("a_sequence needs 1 <= i={} <= n={}", i, n));
  const double nd = static_cast<double>(n);
  ASequenceTerm out;
  double log_a = 0.0;
  for (std::size_t j = 1; j <= i; ++j) {
    const double jd = static_cast<double>(j);
    log_a -= std::log1p(0.5 / jd - 0.125 / (jd * jd) + std::sqrt(jd) / nd);
    out.delta += 0.125 / (jd * jd);
  }
  out.a = std::exp(log_a);
  const double id = static_cast<double>(i);
  out.log_approx = -(0.5 * (std::log(id) + std::numbers::egamma) - out.delta +
                     2.0 * std::pow(id, 1.5) / (3.0 * nd));
  return out;
}

BetaConstant beta_constant() {
  // t = u^2 turns t^{-1/2} e^{-(2/3) t^{3/2}} dt into 2 e^{-(2/3) u^3} du.
  auto integrand = [](double u) { return 2.0 * std::exp(-(2.0 / 3.0) * u * u * u); };
  // tail beyond U is below e^{-(2/3)U^3} / U^2
  double upper = 1.0;
  while (std::exp(-(2.0 / 3.0) * upper * upper * upper) / (upper * upper) >= 1e-12) upper += 0.25;
  BetaConstant out;
  out.quadrature = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, upper, 20, 1e-15);
  out.closed_form = std::pow(2.0 / 3.0, 2.0 / 3.0) * std::tgamma(1.0 / 3.0);
  return out;
}

double beta_prime() {
  constexpr double pi = std::numbers::pi;
  return std::numbers::sqrt3 * std::exp(-std::numbers::egamma / 2.0) * std::exp(pi * pi / 48.0) *
         beta_constant().closed_form;
}

XBound theorem_X_bound(std::size_t n, double lambda_e, double lambda) {
  require_rates(lambda_e, lambda);
  if (n < 4) throw PreconditionError("theorem_X_bound needs n >= 4");
  const double nd = static_cast<double>(n);
  const std::size_t last = (3 * n) / 4 - 1;
  double prod_floor = 1.0, prod_plain = 1.0;
  double sum_floor = 0.0, sum_plain = 0.0;
  for (std::size_t j = 1; j <= last; ++j) {
    const double jd = static_cast<double>(j);
    prod_floor *= floor_sqrt(j) / (floor_sqrt(j + 1) + (jd + 1.0) / nd);
    prod_plain *= std::sqrt(jd) / (std::sqrt(jd + 1.0) + jd / nd);
    sum_floor += prod_floor;
    sum_plain += prod_plain;
  }
  const double prefactor = (2.0 * lambda_e / lambda) / (1.0 + 1.0 / nd);
  XBound out;
  out.exact = prefactor * (1.0 + sum_floor);
  out.relaxed = prefactor * (1.0 + std::numbers::sqrt3 * sum_plain);
  out.limits_floored = n % 4 != 0;
  return out;
}

YBound theorem_Y_bound(std::size_t n, double lambda_e, double lambda) {
  require_rates(lambda_e, lambda);
  if (n < 8) throw PreconditionError("theorem_Y_bound needs n >= 8");
  const std::size_t last = n / 4 - 1;
  double harmonic = 0.0;
  for (std::size_t l = 1; l <= last; ++l) harmonic += 1.0 / static_cast<double>(l);
  const double ratio = lambda_e / lambda;
  return YBound{ratio + ratio * (1.0 + harmonic), n % 4 != 0};
}

double closed_form_bound(std::size_t n, double lambda_e, double lambda) {
  require_rates(lambda_e, lambda);
  if (n < 1) throw PreconditionError("closed_form_bound needs n >= 1");
  return kClosedFormCoefficient * (lambda_e / lambda) * std::cbrt(static_cast<double>(n));
}

}  // namespace gossip_age::bounds
