#ifndef MIXBOUND_FAMILIES_HPP
#define MIXBOUND_FAMILIES_HPP

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mixbound/rng.hpp"

namespace mixbound {

enum class FamilyTag { Exponential, Rayleigh, Gaussian, Gamma };

std::string to_string(FamilyTag tag);

// p(x) = rate * exp(-rate x) on [0, inf)
struct ExponentialParams {
  double rate;
};

// p(x) = x / scale^2 * exp(-x^2 / (2 scale^2)) on [0, inf)
struct RayleighParams {
  double scale;
};

struct GaussianParams {
  double mean;
  double stddev;
};

// p(x) = x^{shape-1} exp(-x/scale) / (scale^shape Gamma(shape)) on (0, inf)
struct GammaParams {
  double shape;
  double scale;
};

using ComponentParams =
    std::variant<ExponentialParams, RayleighParams, GaussianParams, GammaParams>;

FamilyTag family_of(const ComponentParams& params);
bool params_equal(const ComponentParams& a, const ComponentParams& b);
std::string to_string(const ComponentParams& params);

struct SupportInterval {
  double lo;
  double hi;
  bool open_lo = false; // Gamma's support excludes 0

  bool contains(double x) const {
    if (open_lo ? !(x > lo) : !(x >= lo)) return false;
    return x <= hi;
  }
};

SupportInterval support_of(FamilyTag tag);

/// Throws std::domain_error outside the family support. May return -inf at a
/// support boundary where the density vanishes (Rayleigh at 0).
double log_density(const ComponentParams& params, double x);

/// exp(log_density); plain densities are never computed any other way.
double density(const ComponentParams& params, double x);

/// Clamped CDF: 0 below the support, 1 at +inf. Monotone non-decreasing.
double cdf(const ComponentParams& params, double x);

double component_mean(const ComponentParams& params);
double component_variance(const ComponentParams& params);

/// One draw from the component's law; mutates only the caller's generator.
double sample(const ComponentParams& params, Xoshiro256pp& rng);

/// Exponential-family form: log p(x) = theta . t(x) - F(theta) + k(x).
/// `shape` pins the Gamma carrier; ignored for the other families.
struct NaturalForm {
  FamilyTag family;
  double shape;
  std::vector<double> theta;

  double log_normalizer(std::span<const double> th) const;
  std::vector<double> grad_log_normalizer(std::span<const double> th) const;
  std::vector<double> sufficient_stat(double x) const;
  double carrier(double x) const;
  bool in_domain(std::span<const double> th) const;

  double log_normalizer() const { return log_normalizer(theta); }
  std::vector<double> grad_log_normalizer() const { return grad_log_normalizer(theta); }

  /// theta . t(x) - F(theta) + k(x); must agree with log_density.
  double reconstructed_log_density(double x) const;
};

NaturalForm to_natural(const ComponentParams& params);
ComponentParams from_natural(const NaturalForm& form);

/// log(w p(x)) written in the basis {1, x, x^2, log x}; every supported
/// family fits, which is what makes intersections and ratio extrema
/// closed-form. clog is 0 whenever log x is absent (so x may be negative).
struct LogLinForm {
  double c0 = 0;
  double c1 = 0;
  double c2 = 0;
  double clog = 0;

  double operator()(double x) const;
};

LogLinForm log_weighted_density_form(double weight, const ComponentParams& params);

struct WeightedComponent {
  double weight;
  ComponentParams params;
};

class Mixture {
 public:
  /// Validates: non-empty, uniform family, strictly positive finite
  /// parameters and weights, weights summing to 1 within 1e-12.
  static Mixture make(FamilyTag family, std::vector<WeightedComponent> components);

  /// Merges components with identical parameters (weights added); order of
  /// first occurrence is kept. Envelope and bound code assumes this ran.
  Mixture canonicalized() const;

  FamilyTag family() const { return family_; }
  const std::vector<WeightedComponent>& components() const { return components_; }
  const SupportInterval& support() const { return support_; }
  std::size_t size() const { return components_.size(); }

  double log_density(double x) const;
  double density(double x) const;
  double cdf(double x) const;

 private:
  Mixture(FamilyTag family, std::vector<WeightedComponent> components, SupportInterval support)
      : family_(family), components_(std::move(components)), support_(support) {}

  FamilyTag family_;
  std::vector<WeightedComponent> components_;
  SupportInterval support_;
};

double mixture_mean(const Mixture& m);
double mixture_variance(const Mixture& m);

} // namespace mixbound

#endif
