#ifndef MIXBOUND_INTEGRALS_HPP
#define MIXBOUND_INTEGRALS_HPP

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixbound/families.hpp"

namespace mixbound {

/// Definite-integral estimate with a certified error radius: the true value
/// lies in [value - error_bound, value + error_bound].
struct QuadratureValue {
  double value = 0.0;
  double error_bound = 0.0;
};

/// Thrown when subdivision is exhausted before the tolerance is met; carries
/// the best estimate so callers can flag rather than lose the run.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadratureValue best)
      : std::runtime_error(what), best_(best) {}
  const QuadratureValue& best() const { return best_; }

 private:
  QuadratureValue best_;
};

/// Globally adaptive Gauss(7)/Kronrod(15) on a finite interval. The worst
/// segment is bisected until the summed error estimate drops below tol.
QuadratureValue adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                                    double tol, int max_segments = 2000);

/// Same engine with infinite endpoints allowed; semi-infinite pieces use the
/// rational map x = c +- t/(1-t).
QuadratureValue integrate_interval(const std::function<double(double)>& f, double a, double b,
                                   double tol, int max_segments = 2000);

/// M_i(a,b) = -int_a^b w p(x) dx = -w (cdf(b) - cdf(a)). Sign as in the
/// envelope bound formulas; always in [-w, 0].
double mass_M(const WeightedComponent& c, double a, double b);

/// Unnormalized truncated sufficient-statistic moments int_a^b t(x) p(x) dx,
/// in closed form for all four families (one entry per coordinate of t).
std::vector<double> truncated_stat_moment(const ComponentParams& params, double a, double b);

/// grad m_D(theta) = int_a^b (t(x) - grad F(theta)) p(x; theta) dx.
std::vector<double> grad_truncated_mass(const ComponentParams& params, double a, double b);

/// C_{i,j}(a,b) = -int_a^b w_i p_i(x) log(w_j p_j(x)) dx.
/// Exponential/Gaussian are pure closed form (error_bound 0); Rayleigh and
/// Gamma carry one quadrature term int p_i log x. ci and cj must share the
/// family; Gamma shapes may differ.
QuadratureValue partial_cross_entropy_C(const WeightedComponent& ci, const WeightedComponent& cj,
                                        double a, double b, double tol = 1e-10);

/// int_a^b w1 p1 log(w2 p2 / w3 p3) dx for three members of one family.
/// Exact: the carrier cancels between p2 and p3 (equal Gamma shapes required
/// for n2, n3; n1's shape is free since only its mass and moments appear).
double kl3_truncated(double w1, const NaturalForm& n1, double w2, const NaturalForm& n2,
                     double w3, const NaturalForm& n3, double a, double b);

/// Generalization used by the ratio-form KL bounds: n2 and n3 may have
/// different Gamma shapes, in which case the leftover (k2-k3) int p1 log x
/// term is integrated numerically and reported in the error bound.
QuadratureValue kl3_truncated_general(double w1, const ComponentParams& p1, double w2,
                                      const NaturalForm& n2, double w3, const NaturalForm& n3,
                                      double a, double b, double tol = 1e-10);

/// KL over a sub-interval between scaled members of one family:
/// int_a^b w p(x;theta) log(w p(x;theta) / (w' p(x;theta'))) dx
///   = w m_D(theta) (log(w/w') + B_F(theta':theta)) + w (theta-theta').grad m_D(theta).
double truncated_kl_scaled(double w, const NaturalForm& n, double w_prime,
                           const NaturalForm& n_prime, double a, double b);

struct BregmanGenerator {
  std::function<double(std::span<const double>)> F;
  std::function<std::vector<double>(std::span<const double>)> gradF;
  std::function<bool(std::span<const double>)> in_domain;
};

BregmanGenerator bregman_generator(FamilyTag family, double gamma_shape = 1.0);

/// B_F(theta':theta) = F(theta') - F(theta) - (theta'-theta).gradF(theta) >= 0.
double bregman(const BregmanGenerator& gen, std::span<const double> theta_prime,
               std::span<const double> theta);

} // namespace mixbound

#endif
