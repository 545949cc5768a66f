#include "mixbound/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mixbound/special_functions.hpp"

namespace mixbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfLog2Pi = 0.91893853320467274178; // log(2 pi) / 2

void require_positive_finite(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << what << " must be positive and finite, got " << v;
    throw std::invalid_argument(os.str());
  }
}

[[noreturn]] void outside_support(double x) {
  std::ostringstream os;
  os << "x = " << x << " is outside the component support";
  throw std::domain_error(os.str());
}

double sample_gaussian_std(Xoshiro256pp& rng) {
  // Marsaglia polar; the second variate of the pair is discarded so the
  // sampler carries no state besides the generator.
  for (;;) {
    const double u = 2.0 * rng.next_unit_open() - 1.0;
    const double v = 2.0 * rng.next_unit_open() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

// Marsaglia-Tsang squeeze, shape >= 1.
double sample_gamma_std(double shape, Xoshiro256pp& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_gaussian_std(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_unit_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

} // namespace

std::string to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::Exponential: return "exponential";
    case FamilyTag::Rayleigh: return "rayleigh";
    case FamilyTag::Gaussian: return "gaussian";
    case FamilyTag::Gamma: return "gamma";
  }
  return "unknown";
}

FamilyTag family_of(const ComponentParams& params) {
  switch (params.index()) {
    case 0: return FamilyTag::Exponential;
    case 1: return FamilyTag::Rayleigh;
    case 2: return FamilyTag::Gaussian;
    default: return FamilyTag::Gamma;
  }
}

bool params_equal(const ComponentParams& a, const ComponentParams& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& pa) {
        const auto& pb = std::get<std::decay_t<decltype(pa)>>(b);
        using T = std::decay_t<decltype(pa)>;
        if constexpr (std::is_same_v<T, ExponentialParams>) {
          return pa.rate == pb.rate;
        } else if constexpr (std::is_same_v<T, RayleighParams>) {
          return pa.scale == pb.scale;
        } else if constexpr (std::is_same_v<T, GaussianParams>) {
          return pa.mean == pb.mean && pa.stddev == pb.stddev;
        } else {
          return pa.shape == pb.shape && pa.scale == pb.scale;
        }
      },
      a);
}

std::string to_string(const ComponentParams& params) {
  std::ostringstream os;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialParams>) {
          os << "exponential(rate=" << p.rate << ")";
        } else if constexpr (std::is_same_v<T, RayleighParams>) {
          os << "rayleigh(scale=" << p.scale << ")";
        } else if constexpr (std::is_same_v<T, GaussianParams>) {
          os << "gaussian(mean=" << p.mean << ", stddev=" << p.stddev << ")";
        } else {
          os << "gamma(shape=" << p.shape << ", scale=" << p.scale << ")";
        }
      },
      params);
  return os.str();
}

SupportInterval support_of(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::Exponential:
    case FamilyTag::Rayleigh: return {0.0, kInf, false};
    case FamilyTag::Gaussian: return {-kInf, kInf, false};
    case FamilyTag::Gamma: return {0.0, kInf, true};
  }
  return {-kInf, kInf, false};
}

double log_density(const ComponentParams& params, double x) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialParams>) {
          if (x < 0.0) outside_support(x);
          return std::log(p.rate) - p.rate * x;
        } else if constexpr (std::is_same_v<T, RayleighParams>) {
          if (x < 0.0) outside_support(x);
          if (x == 0.0) return -kInf;
          return std::log(x) - 2.0 * std::log(p.scale) - x * x / (2.0 * p.scale * p.scale);
        } else if constexpr (std::is_same_v<T, GaussianParams>) {
          const double z = (x - p.mean) / p.stddev;
          return -0.5 * z * z - std::log(p.stddev) - kHalfLog2Pi;
        } else {
          if (!(x > 0.0)) outside_support(x);
          return (p.shape - 1.0) * std::log(x) - x / p.scale - p.shape * std::log(p.scale) -
                 log_gamma(p.shape);
        }
      },
      params);
}

double density(const ComponentParams& params, double x) {
  return std::exp(log_density(params, x));
}

double cdf(const ComponentParams& params, double x) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialParams>) {
          if (x <= 0.0) return 0.0;
          return -std::expm1(-p.rate * x);
        } else if constexpr (std::is_same_v<T, RayleighParams>) {
          if (x <= 0.0) return 0.0;
          return -std::expm1(-x * x / (2.0 * p.scale * p.scale));
        } else if constexpr (std::is_same_v<T, GaussianParams>) {
          if (x == kInf) return 1.0;
          if (x == -kInf) return 0.0;
          return 0.5 * (1.0 + mixbound::erf((x - p.mean) / (p.stddev * std::sqrt(2.0))));
        } else {
          if (x <= 0.0) return 0.0;
          return regularized_gamma_p(p.shape, x / p.scale);
        }
      },
      params);
}

double component_mean(const ComponentParams& params) {
  return std::visit(
      [](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialParams>) {
          return 1.0 / p.rate;
        } else if constexpr (std::is_same_v<T, RayleighParams>) {
          return p.scale * std::sqrt(M_PI / 2.0);
        } else if constexpr (std::is_same_v<T, GaussianParams>) {
          return p.mean;
        } else {
          return p.shape * p.scale;
        }
      },
      params);
}

double component_variance(const ComponentParams& params) {
  return std::visit(
      [](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialParams>) {
          return 1.0 / (p.rate * p.rate);
        } else if constexpr (std::is_same_v<T, RayleighParams>) {
          return (2.0 - M_PI / 2.0) * p.scale * p.scale;
        } else if constexpr (std::is_same_v<T, GaussianParams>) {
          return p.stddev * p.stddev;
        } else {
          return p.shape * p.scale * p.scale;
        }
      },
      params);
}

double sample(const ComponentParams& params, Xoshiro256pp& rng) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialParams>) {
          return -std::log(rng.next_unit_open()) / p.rate;
        } else if constexpr (std::is_same_v<T, RayleighParams>) {
          return p.scale * std::sqrt(-2.0 * std::log(rng.next_unit_open()));
        } else if constexpr (std::is_same_v<T, GaussianParams>) {
          return p.mean + p.stddev * sample_gaussian_std(rng);
        } else {
          if (p.shape >= 1.0) return p.scale * sample_gamma_std(p.shape, rng);
          // Boost: X_{k} = X_{k+1} * U^{1/k}.
          const double g = sample_gamma_std(p.shape + 1.0, rng);
          return p.scale * g * std::pow(rng.next_unit_open(), 1.0 / p.shape);
        }
      },
      params);
}

double NaturalForm::log_normalizer(std::span<const double> th) const {
  switch (family) {
    case FamilyTag::Exponential: return -std::log(-th[0]);
    case FamilyTag::Rayleigh: return -std::log(-2.0 * th[0]);
    case FamilyTag::Gaussian:
      return -th[0] * th[0] / (4.0 * th[1]) + 0.5 * std::log(-M_PI / th[1]);
    case FamilyTag::Gamma: return -shape * std::log(-th[0]);
  }
  return 0.0;
}

std::vector<double> NaturalForm::grad_log_normalizer(std::span<const double> th) const {
  switch (family) {
    case FamilyTag::Exponential: return {-1.0 / th[0]};
    case FamilyTag::Rayleigh: return {-1.0 / th[0]};
    case FamilyTag::Gaussian:
      return {-th[0] / (2.0 * th[1]),
              th[0] * th[0] / (4.0 * th[1] * th[1]) - 1.0 / (2.0 * th[1])};
    case FamilyTag::Gamma: return {-shape / th[0]};
  }
  return {};
}

std::vector<double> NaturalForm::sufficient_stat(double x) const {
  switch (family) {
    case FamilyTag::Exponential: return {x};
    case FamilyTag::Rayleigh: return {x * x};
    case FamilyTag::Gaussian: return {x, x * x};
    case FamilyTag::Gamma: return {x};
  }
  return {};
}

double NaturalForm::carrier(double x) const {
  switch (family) {
    case FamilyTag::Exponential: return 0.0;
    case FamilyTag::Rayleigh: return std::log(x);
    case FamilyTag::Gaussian: return 0.0;
    case FamilyTag::Gamma: return (shape - 1.0) * std::log(x) - log_gamma(shape);
  }
  return 0.0;
}

bool NaturalForm::in_domain(std::span<const double> th) const {
  switch (family) {
    case FamilyTag::Exponential:
    case FamilyTag::Rayleigh:
    case FamilyTag::Gamma: return th.size() == 1 && th[0] < 0.0;
    case FamilyTag::Gaussian: return th.size() == 2 && th[1] < 0.0;
  }
  return false;
}

double NaturalForm::reconstructed_log_density(double x) const {
  const auto t = sufficient_stat(x);
  double dot = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) dot += theta[i] * t[i];
  return dot - log_normalizer() + carrier(x);
}

NaturalForm to_natural(const ComponentParams& params) {
  return std::visit(
      [](const auto& p) -> NaturalForm {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialParams>) {
          return {FamilyTag::Exponential, 0.0, {-p.rate}};
        } else if constexpr (std::is_same_v<T, RayleighParams>) {
          return {FamilyTag::Rayleigh, 0.0, {-1.0 / (2.0 * p.scale * p.scale)}};
        } else if constexpr (std::is_same_v<T, GaussianParams>) {
          const double var = p.stddev * p.stddev;
          return {FamilyTag::Gaussian, 0.0, {p.mean / var, -1.0 / (2.0 * var)}};
        } else {
          return {FamilyTag::Gamma, p.shape, {-1.0 / p.scale}};
        }
      },
      params);
}

ComponentParams from_natural(const NaturalForm& form) {
  switch (form.family) {
    case FamilyTag::Exponential: return ExponentialParams{-form.theta[0]};
    case FamilyTag::Rayleigh: return RayleighParams{std::sqrt(-1.0 / (2.0 * form.theta[0]))};
    case FamilyTag::Gaussian: {
      const double var = -1.0 / (2.0 * form.theta[1]);
      return GaussianParams{form.theta[0] * var, std::sqrt(var)};
    }
    case FamilyTag::Gamma: return GammaParams{form.shape, -1.0 / form.theta[0]};
  }
  throw std::logic_error("from_natural: bad family");
}

double LogLinForm::operator()(double x) const {
  double v = c0 + c1 * x + c2 * x * x;
  if (clog != 0.0) v += clog * std::log(x);
  return v;
}

LogLinForm log_weighted_density_form(double weight, const ComponentParams& params) {
  const double lw = std::log(weight);
  return std::visit(
      [&](const auto& p) -> LogLinForm {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialParams>) {
          return {lw + std::log(p.rate), -p.rate, 0.0, 0.0};
        } else if constexpr (std::is_same_v<T, RayleighParams>) {
          return {lw - 2.0 * std::log(p.scale), 0.0, -1.0 / (2.0 * p.scale * p.scale), 1.0};
        } else if constexpr (std::is_same_v<T, GaussianParams>) {
          const double var = p.stddev * p.stddev;
          return {lw - p.mean * p.mean / (2.0 * var) - std::log(p.stddev) - kHalfLog2Pi,
                  p.mean / var, -1.0 / (2.0 * var), 0.0};
        } else {
          return {lw - p.shape * std::log(p.scale) - log_gamma(p.shape), -1.0 / p.scale, 0.0,
                  p.shape - 1.0};
        }
      },
      params);
}

Mixture Mixture::make(FamilyTag family, std::vector<WeightedComponent> components) {
  if (components.empty()) throw std::invalid_argument("mixture needs at least one component");
  double wsum = 0.0;
  for (const auto& c : components) {
    if (family_of(c.params) != family) {
      throw std::invalid_argument("mixture mixes families: expected " + to_string(family) +
                                  ", got component " + to_string(c.params));
    }
    require_positive_finite(c.weight, "component weight");
    std::visit(
        [](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ExponentialParams>) {
            require_positive_finite(p.rate, "exponential rate");
          } else if constexpr (std::is_same_v<T, RayleighParams>) {
            require_positive_finite(p.scale, "rayleigh scale");
          } else if constexpr (std::is_same_v<T, GaussianParams>) {
            require_positive_finite(p.stddev, "gaussian stddev");
            if (!std::isfinite(p.mean)) throw std::invalid_argument("gaussian mean must be finite");
          } else {
            require_positive_finite(p.shape, "gamma shape");
            require_positive_finite(p.scale, "gamma scale");
          }
        },
        c.params);
    wsum += c.weight;
  }
  if (std::fabs(wsum - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "mixture weights sum to " << wsum << ", expected 1";
    throw std::invalid_argument(os.str());
  }
  return Mixture(family, std::move(components), support_of(family));
}

Mixture Mixture::canonicalized() const {
  std::vector<WeightedComponent> merged;
  merged.reserve(components_.size());
  for (const auto& c : components_) {
    bool found = false;
    for (auto& m : merged) {
      if (params_equal(m.params, c.params)) {
        m.weight += c.weight;
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(c);
  }
  return Mixture(family_, std::move(merged), support_);
}

double Mixture::log_density(double x) const {
  double best = -kInf;
  for (const auto& c : components_) {
    const double l = std::log(c.weight) + mixbound::log_density(c.params, x);
    if (l > best) best = l;
  }
  if (best == -kInf) return best;
  double sum = 0.0;
  for (const auto& c : components_) {
    sum += std::exp(std::log(c.weight) + mixbound::log_density(c.params, x) - best);
  }
  return best + std::log(sum);
}

double Mixture::density(double x) const { return std::exp(log_density(x)); }

double Mixture::cdf(double x) const {
  double v = 0.0;
  for (const auto& c : components_) v += c.weight * mixbound::cdf(c.params, x);
  return v;
}

double mixture_mean(const Mixture& m) {
  double v = 0.0;
  for (const auto& c : m.components()) v += c.weight * component_mean(c.params);
  return v;
}

double mixture_variance(const Mixture& m) {
  const double mu = mixture_mean(m);
  double v = 0.0;
  for (const auto& c : m.components()) {
    const double d = component_mean(c.params) - mu;
    v += c.weight * (d * d + component_variance(c.params));
  }
  return v;
}

} // namespace mixbound
