#include "mixbound/integrals.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mixbound/special_functions.hpp"

namespace mixbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_interval(double a, double b, const char* who) {
  if (!(a < b)) {
    std::ostringstream os;
    os << who << ": need a < b, got [" << a << ", " << b << "]";
    throw std::invalid_argument(os.str());
  }
}

double unweighted_mass(const ComponentParams& p, double a, double b) {
  return cdf(p, b) - cdf(p, a);
}

// int_a^b p_i(x) log x dx, numerically; b may be infinite.
QuadratureValue log_x_integral(const ComponentParams& p, double a, double b, double tol) {
  auto f = [&p](double x) {
    if (!(x > 0.0)) return 0.0;
    const double d = density(p, x);
    return d == 0.0 ? 0.0 : d * std::log(x);
  };
  return integrate_interval(f, a, b, tol);
}

} // namespace

double mass_M(const WeightedComponent& c, double a, double b) {
  require_interval(a, b, "mass_M");
  return -c.weight * unweighted_mass(c.params, a, b);
}

std::vector<double> truncated_stat_moment(const ComponentParams& params, double a, double b) {
  require_interval(a, b, "truncated_stat_moment");
  return std::visit(
      [&](const auto& p) -> std::vector<double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExponentialParams>) {
          auto term = [&](double x) {
            return std::isfinite(x) ? (x + 1.0 / p.rate) * std::exp(-p.rate * x) : 0.0;
          };
          return {term(a) - term(b)};
        } else if constexpr (std::is_same_v<T, RayleighParams>) {
          const double two_var = 2.0 * p.scale * p.scale;
          auto term = [&](double x) {
            return std::isfinite(x) ? (x * x + two_var) * std::exp(-x * x / two_var) : 0.0;
          };
          return {term(a) - term(b)};
        } else if constexpr (std::is_same_v<T, GaussianParams>) {
          const double var = p.stddev * p.stddev;
          const double mass = unweighted_mass(params, a, b);
          auto dens = [&](double x) { return std::isfinite(x) ? density(params, x) : 0.0; };
          auto xdens = [&](double x) { return std::isfinite(x) ? x * density(params, x) : 0.0; };
          const double m1 = p.mean * mass + var * (dens(a) - dens(b));
          const double m2 = (p.mean * p.mean + var) * mass +
                            var * ((xdens(a) + p.mean * dens(a)) - (xdens(b) + p.mean * dens(b)));
          return {m1, m2};
        } else {
          // int x p(x;k,L) = L k [P(k+1, b/L) - P(k+1, a/L)]
          const double pa = std::isfinite(a) ? regularized_gamma_p(p.shape + 1.0, a / p.scale) : 1.0;
          const double pb = std::isfinite(b) ? regularized_gamma_p(p.shape + 1.0, b / p.scale) : 1.0;
          return {p.scale * p.shape * (pb - pa)};
        }
      },
      params);
}

std::vector<double> grad_truncated_mass(const ComponentParams& params, double a, double b) {
  const NaturalForm n = to_natural(params);
  const std::vector<double> grad_f = n.grad_log_normalizer();
  const double mass = unweighted_mass(params, a, b);
  std::vector<double> moment = truncated_stat_moment(params, a, b);
  for (std::size_t i = 0; i < moment.size(); ++i) moment[i] -= mass * grad_f[i];
  return moment;
}

QuadratureValue partial_cross_entropy_C(const WeightedComponent& ci, const WeightedComponent& cj,
                                        double a, double b, double tol) {
  require_interval(a, b, "partial_cross_entropy_C");
  if (family_of(ci.params) != family_of(cj.params)) {
    throw std::invalid_argument("partial_cross_entropy_C: components from different families");
  }

  // log(w_j p_j(x)) = log w_j + theta_j . t(x) - F(theta_j) + carrier_j(x), so
  //   C = (log w_j - F(theta_j)) M_i - w_i theta_j . moment_i - w_i int p_i carrier_j.
  const NaturalForm nj = to_natural(cj.params);
  const double mass_i = unweighted_mass(ci.params, a, b);
  const double Mi = -ci.weight * mass_i;
  const std::vector<double> moment_i = truncated_stat_moment(ci.params, a, b);

  double value = (std::log(cj.weight) - nj.log_normalizer()) * Mi;
  for (std::size_t c = 0; c < nj.theta.size(); ++c) value -= ci.weight * nj.theta[c] * moment_i[c];

  QuadratureValue out{value, 0.0};
  const FamilyTag fam = family_of(ci.params);
  if (fam == FamilyTag::Rayleigh || fam == FamilyTag::Gamma) {
    double log_x_coef = 1.0; // Rayleigh carrier is log x
    double const_carrier = 0.0;
    if (fam == FamilyTag::Gamma) {
      const auto& gj = std::get<GammaParams>(cj.params);
      log_x_coef = gj.shape - 1.0;
      const_carrier = -log_gamma(gj.shape);
    }
    out.value -= ci.weight * const_carrier * mass_i;
    if (log_x_coef != 0.0) {
      const double scale = std::fabs(ci.weight * log_x_coef);
      const QuadratureValue lx =
          log_x_integral(ci.params, a, b, tol / std::max(1.0, scale));
      out.value -= ci.weight * log_x_coef * lx.value;
      out.error_bound += scale * lx.error_bound;
    }
  }
  return out;
}

QuadratureValue kl3_truncated_general(double w1, const ComponentParams& p1, double w2,
                                      const NaturalForm& n2, double w3, const NaturalForm& n3,
                                      double a, double b, double tol) {
  require_interval(a, b, "kl3_truncated");
  const FamilyTag fam = family_of(p1);
  if (n2.family != fam || n3.family != fam) {
    throw std::invalid_argument("kl3_truncated: natural forms from different families");
  }

  // log(w2 p2 / (w3 p3)) = log(w2/w3) + (th2-th3).t(x) - F2 + F3 + carrier2(x) - carrier3(x)
  const double mass1 = unweighted_mass(p1, a, b);
  const std::vector<double> moment1 = truncated_stat_moment(p1, a, b);

  double constant = std::log(w2 / w3) - n2.log_normalizer() + n3.log_normalizer();
  double log_x_coef = 0.0;
  if (fam == FamilyTag::Gamma) {
    constant += -log_gamma(n2.shape) + log_gamma(n3.shape);
    log_x_coef = n2.shape - n3.shape;
  }

  double value = constant * mass1;
  for (std::size_t c = 0; c < n2.theta.size(); ++c) {
    value += (n2.theta[c] - n3.theta[c]) * moment1[c];
  }

  QuadratureValue out{0.0, 0.0};
  if (log_x_coef != 0.0) {
    const double scale = std::fabs(w1 * log_x_coef);
    const QuadratureValue lx = log_x_integral(p1, a, b, tol / std::max(1.0, scale));
    value += log_x_coef * lx.value;
    out.error_bound = scale * lx.error_bound;
  }
  out.value = w1 * value;
  return out;
}

double kl3_truncated(double w1, const NaturalForm& n1, double w2, const NaturalForm& n2,
                     double w3, const NaturalForm& n3, double a, double b) {
  if (n1.family != n2.family || n2.family != n3.family) {
    throw std::invalid_argument("kl3_truncated: natural forms from different families");
  }
  if (n1.family == FamilyTag::Gamma && n2.shape != n3.shape) {
    throw std::invalid_argument(
        "kl3_truncated: ratio densities need equal Gamma shapes (carrier must cancel)");
  }
  return kl3_truncated_general(w1, from_natural(n1), w2, n2, w3, n3, a, b).value;
}

double truncated_kl_scaled(double w, const NaturalForm& n, double w_prime,
                           const NaturalForm& n_prime, double a, double b) {
  require_interval(a, b, "truncated_kl_scaled");
  if (n.family != n_prime.family ||
      (n.family == FamilyTag::Gamma && n.shape != n_prime.shape)) {
    throw std::invalid_argument("truncated_kl_scaled: mismatched families");
  }
  const ComponentParams params = from_natural(n);
  const double mass = unweighted_mass(params, a, b);
  const std::vector<double> grad_mass = grad_truncated_mass(params, a, b);

  // B_F(theta':theta)
  const double bf = n.log_normalizer(n_prime.theta) - n.log_normalizer();
  const std::vector<double> grad_f = n.grad_log_normalizer();
  double corr = bf;
  for (std::size_t c = 0; c < n.theta.size(); ++c) {
    corr -= (n_prime.theta[c] - n.theta[c]) * grad_f[c];
  }

  double value = w * mass * (std::log(w / w_prime) + corr);
  for (std::size_t c = 0; c < n.theta.size(); ++c) {
    value += w * (n.theta[c] - n_prime.theta[c]) * grad_mass[c];
  }
  return value;
}

BregmanGenerator bregman_generator(FamilyTag family, double gamma_shape) {
  NaturalForm form{family, gamma_shape, {}};
  return BregmanGenerator{
      [form](std::span<const double> th) { return form.log_normalizer(th); },
      [form](std::span<const double> th) { return form.grad_log_normalizer(th); },
      [form](std::span<const double> th) { return form.in_domain(th); },
  };
}

double bregman(const BregmanGenerator& gen, std::span<const double> theta_prime,
               std::span<const double> theta) {
  if (gen.in_domain && (!gen.in_domain(theta_prime) || !gen.in_domain(theta))) {
    throw std::domain_error("bregman: parameter outside the generator domain");
  }
  const double fp = gen.F(theta_prime);
  const double f = gen.F(theta);
  const std::vector<double> g = gen.gradF(theta);
  double v = fp - f;
  double dot_scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = (theta_prime[i] - theta[i]) * g[i];
    v -= d;
    dot_scale += std::fabs(d);
  }
  // Forgive roundoff-level negatives from the F difference; convexity
  // guarantees the true value is nonnegative.
  if (v < 0.0 && v > -1e-13 * (std::fabs(fp) + std::fabs(f) + dot_scale + 1.0)) v = 0.0;
  return v;
}

} // namespace mixbound
