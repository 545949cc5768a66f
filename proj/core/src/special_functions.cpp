#include "mixbound/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mixbound {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min() / kEps;

// Lanczos g=7, n=9 coefficients.
const double kLanczos[9] = {
    0.99999999999980993,    676.5203681218851,     -1259.1392167224028,
    771.32342877765313,     -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};

double lgamma_lanczos(double k) {
  // k > 0 only; reflection not needed for positive shapes.
  double a = kLanczos[0];
  double t = k + 6.5;
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (k + i - 1.0);
  return 0.5 * std::log(2.0 * M_PI) + (k - 0.5) * std::log(t) - t + std::log(a);
}

// Series for P(k,x), converges fast for x < k + 1.
double gamma_p_series(double k, double x) {
  double ap = k;
  double del = 1.0 / k;
  double sum = del;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + k * std::log(x) - lgamma_lanczos(k));
}

// Continued fraction for Q(k,x) = 1 - P(k,x), for x >= k + 1 (modified Lentz).
double gamma_q_contfrac(double k, double x) {
  double b = x + 1.0 - k;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - k);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) break;
  }
  return std::exp(-x + k * std::log(x) - lgamma_lanczos(k)) * h;
}

} // namespace

double log_gamma(double k) {
  if (!(k > 0.0)) throw std::domain_error("log_gamma: k must be positive");
  return lgamma_lanczos(k);
}

double regularized_gamma_p(double k, double x) {
  if (!(k > 0.0)) throw std::domain_error("regularized_gamma_p: k must be positive");
  if (x < 0.0) throw std::domain_error("regularized_gamma_p: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < k + 1.0) return gamma_p_series(k, x);
  return 1.0 - gamma_q_contfrac(k, x);
}

double lower_incomplete_gamma(double k, double x) {
  return regularized_gamma_p(k, x) * std::exp(lgamma_lanczos(k));
}

double erf(double x) {
  // erf(x) = sign(x) * P(1/2, x^2); shares the series/continued-fraction split.
  if (x == 0.0) return 0.0;
  if (std::isnan(x)) return x;
  const double p = regularized_gamma_p(0.5, x * x);
  return x > 0.0 ? p : -p;
}

double digamma(double k) {
  if (!(k > 0.0)) throw std::domain_error("digamma: k must be positive");
  // Shift into the asymptotic region, then the standard expansion.
  double result = 0.0;
  while (k < 8.0) {
    result -= 1.0 / k;
    k += 1.0;
  }
  const double inv = 1.0 / k;
  const double inv2 = inv * inv;
  result += std::log(k) - 0.5 * inv
          - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
  return result;
}

} // namespace mixbound
