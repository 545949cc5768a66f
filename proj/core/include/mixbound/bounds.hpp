#ifndef MIXBOUND_BOUNDS_HPP
#define MIXBOUND_BOUNDS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "mixbound/envelope.hpp"
#include "mixbound/families.hpp"
#include "mixbound/integrals.hpp"

namespace mixbound {

/// Certified interval: the true quantity lies in [lower, upper]. Quadrature
/// error is folded outward (lower -= e, upper += e) and its total recorded.
struct BoundInterval {
  double lower = 0.0;
  double upper = 0.0;
  double quadrature_slack = 0.0;

  double width() const { return upper - lower; }
  double midpoint() const { return 0.5 * (lower + upper); }
  bool contains(double v) const { return lower <= v && v <= upper; }
};

/// Intersection of two certified intervals for the same quantity.
BoundInterval intersect(const BoundInterval& a, const BoundInterval& b);

/// Bounds on the residual t = log(1 + sum_{i != d} r_{i,d}) over one slab of
/// an upper-envelope partition dominated by component d. Entry d of the
/// per-component extrema holds the ratio of d to itself, exactly 1.
struct SlabResidual {
  std::size_t slab;
  double lo;
  double hi;
  double t_lower;
  double t_upper;
  std::vector<double> per_component_max;
  std::vector<double> per_component_min;
};

/// lower = max(max x_i, log l + min x_i), upper = log l + max x_i.
BoundInterval lse_bounds(std::span<const double> xs);

/// A(m:m') = -int m(x) log max_j w'_j p'_j(x) dx, assembled slab by slab from
/// the C_{s,delta(r)} integrals over the chosen envelope of m'. Lower mode
/// integrates against the min envelope instead.
QuadratureValue a_term(const Mixture& m, const Mixture& m_prime, double quad_tol = 1e-10,
                       EnvelopeMode mode = EnvelopeMode::Upper);

/// [A - log k' - slack, A + slack]; contains the cross-entropy H_x(m:m').
BoundInterval cross_entropy_bounds(const Mixture& m, const Mixture& m_prime,
                                   double quad_tol = 1e-10);

/// KL(m:m') in [Lx(m:m') - Ux(m:m), Ux(m:m') - Lx(m:m)]; width is exactly
/// log k + log k' plus twice the folded slack.
BoundInterval kl_bounds_ce(const Mixture& m, const Mixture& m_prime, double quad_tol = 1e-10);

/// Ratio-form bounds over the overlay of all four envelopes (upper/lower of
/// both mixtures), evaluated with three-density truncated integrals.
BoundInterval kl_bounds_ratio(const Mixture& m, const Mixture& m_prime, double quad_tol = 1e-10);

/// max of lowers / min of uppers of the two combinatorial routes; this is
/// what the CLI reports as CELB/CEUB.
BoundInterval kl_bounds_combined(const Mixture& m, const Mixture& m_prime,
                                 double quad_tol = 1e-10);

struct AdaptiveOptions {
  double quad_tol = 1e-10;
  /// Extra slab splits (mass-median, worst residual-gap first) shared by each
  /// residual analysis. 0 reproduces the raw combinatorial-slab residuals.
  int max_refinements = 200;
};

struct AdaptiveDetail {
  std::vector<SlabResidual> residuals_target; // slabs of m''s envelope, weighted by m
  std::vector<SlabResidual> residuals_self;   // slabs of m's envelope, weighted by m
  BoundInterval cross_entropy_target;         // H_x(m:m')
  BoundInterval cross_entropy_self;           // H_x(m:m)
};

/// CEALB/CEAUB: per-slab residual extrema tighten both cross-entropy sides.
/// Always nested inside kl_bounds_ce (up to shared slack).
BoundInterval adaptive_kl_bounds(const Mixture& m, const Mixture& m_prime,
                                 const AdaptiveOptions& options = {},
                                 AdaptiveDetail* detail = nullptr);

/// Adaptive sandwich for H_x(m:m') alone.
BoundInterval adaptive_cross_entropy_bounds(const Mixture& m, const Mixture& m_prime,
                                            const AdaptiveOptions& options = {},
                                            std::vector<SlabResidual>* residuals = nullptr);

/// Differential entropy sandwich from the envelope decomposition: adaptive
/// residuals on the upper envelope plus the k-min-envelope upper route.
BoundInterval entropy_bounds(const Mixture& m, const AdaptiveOptions& options = {});

/// Maximum Entropy Upper Bound: Gaussian entropy at the mixture variance.
double meub(const Mixture& m);

/// Jeffreys divergence KL(m:m') + KL(m':m), best certified interval per
/// direction (combinatorial, ratio and adaptive routes intersected).
BoundInterval jeffreys_bounds(const Mixture& m, const Mixture& m_prime,
                              const AdaptiveOptions& options = {});

/// Jensen-Shannon divergence via the (k+k')-component average mixture; upper
/// end clamped to log 2. Exactly symmetric in its arguments.
BoundInterval js_bounds(const Mixture& m, const Mixture& m_prime,
                        const AdaptiveOptions& options = {});

} // namespace mixbound

#endif
