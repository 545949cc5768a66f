#include "mixbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mixbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_family(const Mixture& m, const Mixture& m_prime, const char* who) {
  if (m.family() != m_prime.family()) {
    throw std::invalid_argument(std::string(who) + ": mixtures from different families");
  }
}

double slab_mass(const Mixture& m, double lo, double hi) {
  double v = 0.0;
  for (const auto& c : m.components()) v += c.weight * (cdf(c.params, hi) - cdf(c.params, lo));
  return std::max(v, 0.0);
}

// Point splitting the slab into two halves of equal m-mass, by bisection on
// the mixture CDF. Returns NaN when no interior split point is resolvable.
double mass_median(const Mixture& m, double a, double b) {
  const double target = 0.5 * (m.cdf(a) + m.cdf(b));
  double lo = a, hi = b;
  if (!std::isfinite(lo)) {
    const double anchor = std::isfinite(hi) ? hi : 0.0;
    double step = std::max(1.0, std::fabs(anchor));
    lo = anchor - step;
    while (m.cdf(lo) > target && step < 1e18) {
      step *= 2.0;
      lo -= step;
    }
  }
  if (!std::isfinite(hi)) {
    const double anchor = std::isfinite(a) ? a : 0.0;
    double step = std::max(1.0, std::fabs(anchor));
    hi = anchor + step;
    while (m.cdf(hi) < target && step < 1e18) {
      step *= 2.0;
      hi += step;
    }
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (m.cdf(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x = 0.5 * (lo + hi);
  if (!(x > a && x < b)) return std::numeric_limits<double>::quiet_NaN();
  return x;
}

LogLinForm form_diff(const LogLinForm& x, const LogLinForm& y) {
  return {x.c0 - y.c0, x.c1 - y.c1, x.c2 - y.c2, x.clog - y.clog};
}

double limit_log_ratio(const LogLinForm& d, bool at_plus_inf) {
  if (at_plus_inf) {
    if (d.c2 != 0.0) return d.c2 > 0.0 ? kInf : -kInf;
    if (d.c1 != 0.0) return d.c1 > 0.0 ? kInf : -kInf;
    if (d.clog != 0.0) return d.clog > 0.0 ? kInf : -kInf;
    return d.c0;
  }
  // x -> -inf arises only on the Gaussian support, where clog == 0.
  if (d.c2 != 0.0) return d.c2 > 0.0 ? kInf : -kInf;
  if (d.c1 != 0.0) return d.c1 > 0.0 ? -kInf : kInf;
  return d.c0;
}

// Stationary points of c0 + c1 x + c2 x^2 + clog log x inside (lo, hi).
void ratio_critical_points(const LogLinForm& d, double lo, double hi, std::vector<double>& out) {
  if (d.clog == 0.0) {
    if (d.c2 != 0.0) {
      const double x = -d.c1 / (2.0 * d.c2);
      if (x > lo && x < hi) out.push_back(x);
    }
    return;
  }
  // derivative zero <=> 2 c2 x^2 + c1 x + clog = 0 on x > 0
  if (d.c2 == 0.0) {
    if (d.c1 != 0.0) {
      const double x = -d.clog / d.c1;
      if (x > 0.0 && x > lo && x < hi) out.push_back(x);
    }
    return;
  }
  const double qa = 2.0 * d.c2, qb = d.c1, qc = d.clog;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
  const double r1 = q / qa;
  if (r1 > 0.0 && r1 > lo && r1 < hi) out.push_back(r1);
  if (q != 0.0) {
    const double r2 = qc / q;
    if (r2 > 0.0 && r2 > lo && r2 < hi) out.push_back(r2);
  }
}

// Extrema of r_{i,d}(x) = exp(form_i - form_d) over a slab where d dominates.
// The true supremum is at most 1 there, so the max is clamped to 1.
void ratio_extrema(const LogLinForm& fi, const LogLinForm& fd, double lo, double hi,
                   double& r_min, double& r_max) {
  const LogLinForm d = form_diff(fi, fd);
  double log_lo = std::isfinite(lo) ? d(lo) : limit_log_ratio(d, false);
  double log_hi = std::isfinite(hi) ? d(hi) : limit_log_ratio(d, true);
  double lmin = std::min(log_lo, log_hi);
  double lmax = std::max(log_lo, log_hi);
  std::vector<double> crit;
  ratio_critical_points(d, lo, hi, crit);
  for (double x : crit) {
    const double v = d(x);
    lmin = std::min(lmin, v);
    lmax = std::max(lmax, v);
  }
  r_min = std::exp(lmin);
  r_max = std::min(std::exp(lmax), 1.0);
  if (r_min > r_max) r_min = r_max;
}

struct Slab {
  double lo, hi;
  int dom;
  double mass;
  double t_lo, t_hi;
  std::vector<double> r_min, r_max;
  bool splittable = true;
};

void compute_slab_residual(Slab& s, const std::vector<LogLinForm>& forms) {
  const std::size_t k = forms.size();
  s.r_min.assign(k, 1.0);
  s.r_max.assign(k, 1.0);
  double sum_min = 0.0, sum_max = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (static_cast<int>(i) == s.dom) continue;
    double rmin, rmax;
    ratio_extrema(forms[i], forms[static_cast<std::size_t>(s.dom)], s.lo, s.hi, rmin, rmax);
    s.r_min[i] = rmin;
    s.r_max[i] = rmax;
    sum_min += rmin;
    sum_max += rmax;
  }
  s.t_lo = std::log1p(sum_min);
  s.t_hi = std::log1p(sum_max);
}

struct ResidualAnalysis {
  std::vector<Slab> slabs;

  double weighted_t_lo() const {
    double v = 0.0;
    for (const auto& s : slabs) v += s.t_lo * s.mass;
    return v;
  }
  double weighted_t_hi() const {
    double v = 0.0;
    for (const auto& s : slabs) v += s.t_hi * s.mass;
    return v;
  }
};

// Residual analysis of `target`'s own upper envelope, mass-weighted by the
// integrating mixture. Refinement splits the worst (t_hi - t_lo) * mass slab
// at its integrator-mass median; residual bounds stay valid on any sub-slab.
ResidualAnalysis analyze_residuals(const Mixture& target, const Mixture& integrator,
                                   int max_refinements) {
  const EnvelopePartition part =
      build_partition(target.components(), target.support(), EnvelopeMode::Upper);

  std::vector<LogLinForm> forms;
  forms.reserve(target.size());
  for (const auto& c : target.components()) {
    forms.push_back(log_weighted_density_form(c.weight, c.params));
  }

  ResidualAnalysis ra;
  for (std::size_t r = 0; r < part.size(); ++r) {
    Slab s;
    s.lo = part.breakpoints[r];
    s.hi = part.breakpoints[r + 1];
    s.dom = part.piece_index[r];
    s.mass = slab_mass(integrator, s.lo, s.hi);
    compute_slab_residual(s, forms);
    ra.slabs.push_back(std::move(s));
  }

  for (int split = 0; split < max_refinements; ++split) {
    std::size_t worst = ra.slabs.size();
    double worst_gap = 1e-15;
    for (std::size_t i = 0; i < ra.slabs.size(); ++i) {
      const Slab& s = ra.slabs[i];
      if (!s.splittable) continue;
      const double gap = (s.t_hi - s.t_lo) * s.mass;
      if (gap > worst_gap) {
        worst_gap = gap;
        worst = i;
      }
    }
    if (worst == ra.slabs.size()) break;

    Slab& s = ra.slabs[worst];
    const double x = mass_median(integrator, s.lo, s.hi);
    if (!std::isfinite(x)) {
      s.splittable = false;
      continue;
    }
    Slab right;
    right.lo = x;
    right.hi = s.hi;
    right.dom = s.dom;
    right.mass = slab_mass(integrator, right.lo, right.hi);
    compute_slab_residual(right, forms);

    s.hi = x;
    s.mass = slab_mass(integrator, s.lo, s.hi);
    compute_slab_residual(s, forms);

    ra.slabs.insert(ra.slabs.begin() + static_cast<std::ptrdiff_t>(worst) + 1, std::move(right));
  }

  std::sort(ra.slabs.begin(), ra.slabs.end(),
            [](const Slab& a, const Slab& b) { return a.lo < b.lo; });
  return ra;
}

std::vector<SlabResidual> to_slab_residuals(const ResidualAnalysis& ra) {
  std::vector<SlabResidual> out;
  out.reserve(ra.slabs.size());
  for (std::size_t i = 0; i < ra.slabs.size(); ++i) {
    const Slab& s = ra.slabs[i];
    out.push_back({i, s.lo, s.hi, s.t_lo, s.t_hi, s.r_max, s.r_min});
  }
  return out;
}

bool params_less(const ComponentParams& x, const ComponentParams& y) {
  if (x.index() != y.index()) return x.index() < y.index();
  return std::visit(
      [&](const auto& px) {
        const auto& py = std::get<std::decay_t<decltype(px)>>(y);
        using T = std::decay_t<decltype(px)>;
        if constexpr (std::is_same_v<T, ExponentialParams>) {
          return px.rate < py.rate;
        } else if constexpr (std::is_same_v<T, RayleighParams>) {
          return px.scale < py.scale;
        } else if constexpr (std::is_same_v<T, GaussianParams>) {
          if (px.mean != py.mean) return px.mean < py.mean;
          return px.stddev < py.stddev;
        } else {
          if (px.shape != py.shape) return px.shape < py.shape;
          return px.scale < py.scale;
        }
      },
      x);
}

BoundInterval best_directed_kl(const Mixture& m, const Mixture& m_prime,
                               const AdaptiveOptions& options) {
  const BoundInterval comb = kl_bounds_combined(m, m_prime, options.quad_tol);
  const BoundInterval adap = adaptive_kl_bounds(m, m_prime, options);
  return intersect(comb, adap);
}

} // namespace

BoundInterval intersect(const BoundInterval& a, const BoundInterval& b) {
  return {std::max(a.lower, b.lower), std::min(a.upper, b.upper),
          std::max(a.quadrature_slack, b.quadrature_slack)};
}

BoundInterval lse_bounds(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("lse_bounds: empty list");
  const double mx = *std::max_element(xs.begin(), xs.end());
  const double mn = *std::min_element(xs.begin(), xs.end());
  const double logl = std::log(static_cast<double>(xs.size()));
  return {std::max(mx, logl + mn), logl + mx, 0.0};
}

QuadratureValue a_term(const Mixture& m, const Mixture& m_prime, double quad_tol,
                       EnvelopeMode mode) {
  require_same_family(m, m_prime, "a_term");
  const Mixture mc = m.canonicalized();
  const Mixture mpc = m_prime.canonicalized();
  const EnvelopePartition part = build_partition(mpc.components(), mpc.support(), mode);

  QuadratureValue total;
  for (std::size_t r = 0; r < part.size(); ++r) {
    const auto& dom = mpc.components()[static_cast<std::size_t>(part.piece_index[r])];
    for (const auto& cs : mc.components()) {
      const QuadratureValue c =
          partial_cross_entropy_C(cs, dom, part.breakpoints[r], part.breakpoints[r + 1], quad_tol);
      total.value += c.value;
      total.error_bound += c.error_bound;
    }
  }
  return total;
}

BoundInterval cross_entropy_bounds(const Mixture& m, const Mixture& m_prime, double quad_tol) {
  const Mixture mpc = m_prime.canonicalized();
  const QuadratureValue a = a_term(m, mpc, quad_tol);
  const double logk = std::log(static_cast<double>(mpc.size()));
  return {a.value - logk - a.error_bound, a.value + a.error_bound, a.error_bound};
}

BoundInterval kl_bounds_ce(const Mixture& m, const Mixture& m_prime, double quad_tol) {
  const Mixture mc = m.canonicalized();
  const Mixture mpc = m_prime.canonicalized();
  const QuadratureValue across = a_term(mc, mpc, quad_tol);
  const QuadratureValue aself = a_term(mc, mc, quad_tol);
  const double logk = std::log(static_cast<double>(mc.size()));
  const double logkp = std::log(static_cast<double>(mpc.size()));
  const double slack = across.error_bound + aself.error_bound;
  return {(across.value - logkp) - aself.value - slack,
          across.value - (aself.value - logk) + slack, slack};
}

BoundInterval kl_bounds_ratio(const Mixture& m, const Mixture& m_prime, double quad_tol) {
  require_same_family(m, m_prime, "kl_bounds_ratio");
  const Mixture mc = m.canonicalized();
  const Mixture mpc = m_prime.canonicalized();
  const double k = static_cast<double>(mc.size());
  const double kp = static_cast<double>(mpc.size());
  const double logk = std::log(k);
  const double logkp = std::log(kp);

  const EnvelopePartition um = build_partition(mc.components(), mc.support(), EnvelopeMode::Upper);
  const EnvelopePartition lm = build_partition(mc.components(), mc.support(), EnvelopeMode::Lower);
  const EnvelopePartition ump =
      build_partition(mpc.components(), mpc.support(), EnvelopeMode::Upper);
  const EnvelopePartition lmp =
      build_partition(mpc.components(), mpc.support(), EnvelopeMode::Lower);
  const EnvelopePartition* parts[] = {&um, &lm, &ump, &lmp};
  const auto cells = overlay(std::span<const EnvelopePartition* const>(parts, 4));

  std::vector<NaturalForm> nm, nmp;
  std::vector<LogLinForm> fm, fmp;
  for (const auto& c : mc.components()) {
    nm.push_back(to_natural(c.params));
    fm.push_back(log_weighted_density_form(c.weight, c.params));
  }
  for (const auto& c : mpc.components()) {
    nmp.push_back(to_natural(c.params));
    fmp.push_back(log_weighted_density_form(c.weight, c.params));
  }

  // On a cell, integrates sum_s w_s p_s log((wn pn)/(wd pd)) between splits of
  // max-branch crossings; `pick` chooses the branch at a probe point.
  double up_sum = 0.0, up_err = 0.0, lo_sum = 0.0, lo_err = 0.0;

  auto probe_of = [](double lo, double hi) {
    if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
    if (!std::isfinite(lo) && !std::isfinite(hi)) return 0.0;
    if (!std::isfinite(lo)) return hi - std::max(1.0, 0.5 * std::fabs(hi));
    return lo + std::max(1.0, 0.5 * std::fabs(lo));
  };

  for (const auto& cell : cells) {
    const int iu = cell.piece[0], il = cell.piece[1], iup = cell.piece[2], ilp = cell.piece[3];
    const auto& cu = mc.components()[static_cast<std::size_t>(iu)];
    const auto& cl = mc.components()[static_cast<std::size_t>(il)];
    const auto& cup = mpc.components()[static_cast<std::size_t>(iup)];
    const auto& clp = mpc.components()[static_cast<std::size_t>(ilp)];

    // Upper: m <= k max-env(m), m' >= max(k' min-env(m'), max-env(m')).
    {
      std::vector<double> cuts;
      LogLinForm scaled_min = fmp[static_cast<std::size_t>(ilp)];
      scaled_min.c0 += logkp;
      if (ilp != iup) {
        cuts = log_linform_crossings(scaled_min, fmp[static_cast<std::size_t>(iup)], cell.lo,
                                     cell.hi);
      }
      cuts.insert(cuts.begin(), cell.lo);
      cuts.push_back(cell.hi);
      for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
        const double a = cuts[piece], b = cuts[piece + 1];
        const double probe = probe_of(a, b);
        const bool min_branch =
            ilp == iup || scaled_min(probe) >= fmp[static_cast<std::size_t>(iup)](probe);
        const double wd = min_branch ? kp * clp.weight : cup.weight;
        const NaturalForm& nd = min_branch ? nmp[static_cast<std::size_t>(ilp)]
                                           : nmp[static_cast<std::size_t>(iup)];
        for (std::size_t s = 0; s < mc.size(); ++s) {
          const auto& cs = mc.components()[s];
          const QuadratureValue q =
              kl3_truncated_general(cs.weight, cs.params, k * cu.weight,
                                    nm[static_cast<std::size_t>(iu)], wd, nd, a, b, quad_tol);
          up_sum += q.value;
          up_err += q.error_bound;
        }
      }
    }

    // Lower: m >= max(k min-env(m), max-env(m)), m' <= k' max-env(m').
    {
      std::vector<double> cuts;
      LogLinForm scaled_min = fm[static_cast<std::size_t>(il)];
      scaled_min.c0 += logk;
      if (il != iu) {
        cuts = log_linform_crossings(scaled_min, fm[static_cast<std::size_t>(iu)], cell.lo,
                                     cell.hi);
      }
      cuts.insert(cuts.begin(), cell.lo);
      cuts.push_back(cell.hi);
      for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
        const double a = cuts[piece], b = cuts[piece + 1];
        const double probe = probe_of(a, b);
        const bool min_branch =
            il == iu || scaled_min(probe) >= fm[static_cast<std::size_t>(iu)](probe);
        const double wn = min_branch ? k * cl.weight : cu.weight;
        const NaturalForm& nn =
            min_branch ? nm[static_cast<std::size_t>(il)] : nm[static_cast<std::size_t>(iu)];
        for (std::size_t s = 0; s < mc.size(); ++s) {
          const auto& cs = mc.components()[s];
          const QuadratureValue q =
              kl3_truncated_general(cs.weight, cs.params, wn, nn, kp * cup.weight,
                                    nmp[static_cast<std::size_t>(iup)], a, b, quad_tol);
          lo_sum += q.value;
          lo_err += q.error_bound;
        }
      }
    }
  }

  return {lo_sum - lo_err, up_sum + up_err, lo_err + up_err};
}

BoundInterval kl_bounds_combined(const Mixture& m, const Mixture& m_prime, double quad_tol) {
  return intersect(kl_bounds_ce(m, m_prime, quad_tol), kl_bounds_ratio(m, m_prime, quad_tol));
}

BoundInterval adaptive_cross_entropy_bounds(const Mixture& m, const Mixture& m_prime,
                                            const AdaptiveOptions& options,
                                            std::vector<SlabResidual>* residuals) {
  require_same_family(m, m_prime, "adaptive_cross_entropy_bounds");
  const Mixture mc = m.canonicalized();
  const Mixture mpc = m_prime.canonicalized();
  const QuadratureValue a = a_term(mc, mpc, options.quad_tol);
  const ResidualAnalysis ra = analyze_residuals(mpc, mc, options.max_refinements);
  if (residuals != nullptr) *residuals = to_slab_residuals(ra);
  return {a.value - ra.weighted_t_hi() - a.error_bound,
          a.value - ra.weighted_t_lo() + a.error_bound, a.error_bound};
}

BoundInterval adaptive_kl_bounds(const Mixture& m, const Mixture& m_prime,
                                 const AdaptiveOptions& options, AdaptiveDetail* detail) {
  std::vector<SlabResidual> res_target, res_self;
  const BoundInterval hx_target =
      adaptive_cross_entropy_bounds(m, m_prime, options, detail ? &res_target : nullptr);
  const BoundInterval hx_self =
      adaptive_cross_entropy_bounds(m, m, options, detail ? &res_self : nullptr);
  if (detail != nullptr) {
    detail->residuals_target = std::move(res_target);
    detail->residuals_self = std::move(res_self);
    detail->cross_entropy_target = hx_target;
    detail->cross_entropy_self = hx_self;
  }
  return {hx_target.lower - hx_self.upper, hx_target.upper - hx_self.lower,
          hx_target.quadrature_slack + hx_self.quadrature_slack};
}

BoundInterval entropy_bounds(const Mixture& m, const AdaptiveOptions& options) {
  const Mixture mc = m.canonicalized();
  const QuadratureValue a_up = a_term(mc, mc, options.quad_tol, EnvelopeMode::Upper);
  const QuadratureValue a_low = a_term(mc, mc, options.quad_tol, EnvelopeMode::Lower);
  const ResidualAnalysis ra = analyze_residuals(mc, mc, options.max_refinements);
  const double logk = std::log(static_cast<double>(mc.size()));

  const double lower = a_up.value - ra.weighted_t_hi() - a_up.error_bound;
  const double upper_residual = a_up.value - ra.weighted_t_lo() + a_up.error_bound;
  const double upper_min_env = a_low.value - logk + a_low.error_bound;
  return {lower, std::min(upper_residual, upper_min_env),
          a_up.error_bound + a_low.error_bound};
}

double meub(const Mixture& m) {
  return 0.5 * std::log(2.0 * M_PI * M_E * mixture_variance(m));
}

BoundInterval jeffreys_bounds(const Mixture& m, const Mixture& m_prime,
                              const AdaptiveOptions& options) {
  const BoundInterval fwd = best_directed_kl(m, m_prime, options);
  const BoundInterval rev = best_directed_kl(m_prime, m, options);
  return {fwd.lower + rev.lower, fwd.upper + rev.upper,
          fwd.quadrature_slack + rev.quadrature_slack};
}

BoundInterval js_bounds(const Mixture& m, const Mixture& m_prime,
                        const AdaptiveOptions& options) {
  require_same_family(m, m_prime, "js_bounds");
  std::vector<WeightedComponent> avg_comps;
  avg_comps.reserve(m.size() + m_prime.size());
  for (const auto& c : m.components()) avg_comps.push_back({0.5 * c.weight, c.params});
  for (const auto& c : m_prime.components()) avg_comps.push_back({0.5 * c.weight, c.params});
  // Canonical component order makes js_bounds(m, m') and js_bounds(m', m)
  // bit-identical.
  const Mixture avg = Mixture::make(m.family(), std::move(avg_comps)).canonicalized();
  Mixture sorted_avg = [&] {
    auto comps = avg.components();
    std::sort(comps.begin(), comps.end(), [](const WeightedComponent& x,
                                             const WeightedComponent& y) {
      if (params_less(x.params, y.params)) return true;
      if (params_less(y.params, x.params)) return false;
      return x.weight < y.weight;
    });
    return Mixture::make(avg.family(), std::move(comps));
  }();

  const BoundInterval dm = best_directed_kl(m, sorted_avg, options);
  const BoundInterval dmp = best_directed_kl(m_prime, sorted_avg, options);
  const double lower = 0.5 * (dm.lower + dmp.lower);
  const double upper = std::min(0.5 * (dm.upper + dmp.upper), std::log(2.0));
  return {lower, upper, 0.5 * (dm.quadrature_slack + dmp.quadrature_slack)};
}

} // namespace mixbound
