#ifndef MIXBOUND_SPECIAL_FUNCTIONS_HPP
#define MIXBOUND_SPECIAL_FUNCTIONS_HPP

namespace mixbound {

/// Gauss error function, relative error below 1e-12 over the real line.
/// Odd by construction: erf(-x) == -erf(x) exactly.
double erf(double x);

/// Regularized lower incomplete gamma P(k, x) = gamma(k, x) / Gamma(k),
/// k > 0, x >= 0. Series for x < k + 1, continued fraction otherwise.
double regularized_gamma_p(double k, double x);

/// Lower incomplete gamma gamma(k, x); gamma(k, inf) = Gamma(k).
double lower_incomplete_gamma(double k, double x);

/// log Gamma(k), k > 0.
double log_gamma(double k);

/// digamma(k), k > 0. Used only for Gamma-family entropy reference values.
double digamma(double k);

} // namespace mixbound

#endif
