#include "mixbound/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mixbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDedupTol = 1e-12;

struct LogRatio {
  // f(x) = c0 + c1 x + c2 x^2 + clog log x  (difference of two LogLinForms)
  double c0, c1, c2, clog;

  double value(double x) const {
    double v = c0 + c1 * x + c2 * x * x;
    if (clog != 0.0) v += clog * std::log(x);
    return v;
  }
  double deriv(double x) const {
    double v = c1 + 2.0 * c2 * x;
    if (clog != 0.0) v += clog / x;
    return v;
  }
};

// One safeguarded Newton/bisection polish pass; the closed forms are already
// near machine accuracy, this guards against cancellation in the coefficients.
double polish_root(const LogRatio& f, double x, double lo, double hi) {
  double a = lo, b = hi;
  double fa = 0.0, fb = 0.0;
  bool bracketed = false;
  if (std::isfinite(a) && std::isfinite(b)) {
    fa = f.value(a);
    fb = f.value(b);
    bracketed = (fa < 0.0) != (fb < 0.0);
  }
  for (int it = 0; it < 8; ++it) {
    const double fx = f.value(x);
    if (std::fabs(fx) <= 1e-12) break;
    const double dfx = f.deriv(x);
    double step = dfx != 0.0 ? fx / dfx : 0.0;
    double next = x - step;
    if (!(next > lo && next < hi) || step == 0.0) {
      if (!bracketed) break;
      next = 0.5 * (a + b);
    }
    if (bracketed) {
      if ((f.value(next) < 0.0) == (fa < 0.0)) {
        a = next;
        fa = f.value(next);
      } else {
        b = next;
        fb = f.value(next);
      }
    }
    if (next == x) break;
    x = next;
  }
  return x;
}

void push_if_inside(std::vector<double>& roots, double x, const SupportInterval& support) {
  if (std::isfinite(x) && x > support.lo && x < support.hi) roots.push_back(x);
}

// Bracketed bisection fallback for the linear-plus-log case (Gamma mixtures
// with unequal shapes) and for any degenerate closed form.
void roots_linear_log(const LogRatio& f, const SupportInterval& support,
                      std::vector<double>& roots) {
  // f = c0 + c1 x + clog log x on x > 0; f' = c1 + clog / x has at most one
  // zero, so f has at most two roots, one on each side of the extremum.
  const double lo = std::max(support.lo, 0.0);
  double xc = kInf;
  if (f.c1 != 0.0 && f.clog != 0.0) {
    const double cand = -f.clog / f.c1;
    if (cand > lo) xc = cand;
  }
  auto bisect = [&](double a, double b) {
    double fa = f.value(a), fb = f.value(b);
    if ((fa < 0.0) == (fb < 0.0)) return;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (a + b);
      const double fm = f.value(mid);
      if ((fm < 0.0) == (fa < 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
        fb = fm;
      }
      if (b - a <= 1e-15 * (1.0 + std::fabs(a))) break;
    }
    push_if_inside(roots, 0.5 * (a + b), support);
  };
  // Expand geometrically from the extremum (or from 1) to find sign changes.
  const double pivot = std::isfinite(xc) ? xc : std::max(1.0, 2.0 * lo);
  double left = pivot;
  for (int i = 0; i < 80 && left > lo + 1e-300; ++i) {
    const double next = std::max(lo + (left - lo) * 1e-3, left * 0.25);
    if ((f.value(next) < 0.0) != (f.value(left) < 0.0)) {
      bisect(next, left);
      break;
    }
    if (next >= left) break;
    left = next;
  }
  double right = pivot;
  for (int i = 0; i < 80; ++i) {
    const double next = right * 4.0 + 1.0;
    if ((f.value(next) < 0.0) != (f.value(right) < 0.0)) {
      bisect(right, next);
      break;
    }
    right = next;
    if (right > 1e300) break;
  }
}

double probe_point(double lo, double hi) {
  const bool lo_inf = !std::isfinite(lo);
  const bool hi_inf = !std::isfinite(hi);
  if (!lo_inf && !hi_inf) return 0.5 * (lo + hi);
  if (lo_inf && hi_inf) return 0.0;
  if (lo_inf) return hi - std::max(1.0, 0.5 * std::fabs(hi));
  return lo + std::max(1.0, 0.5 * std::fabs(lo));
}

} // namespace

std::size_t EnvelopePartition::piece_at(double x) const {
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  if (it == breakpoints.begin()) return 0;
  std::size_t idx = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  if (idx >= piece_index.size()) idx = piece_index.size() - 1;
  return idx;
}

namespace {

std::vector<double> roots_of_log_ratio(const LogRatio& d, const SupportInterval& support) {
  std::vector<double> roots;
  if (d.clog == 0.0) {
    if (d.c2 == 0.0) {
      if (d.c1 != 0.0) push_if_inside(roots, -d.c0 / d.c1, support);
      // c1 == 0: coincident or vertically offset densities; no crossings.
    } else {
      const double disc = d.c1 * d.c1 - 4.0 * d.c2 * d.c0;
      if (disc == 0.0) {
        push_if_inside(roots, -d.c1 / (2.0 * d.c2), support);
      } else if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (d.c1 + (d.c1 >= 0.0 ? sq : -sq));
        if (q != 0.0) push_if_inside(roots, d.c0 / q, support);
        push_if_inside(roots, q / d.c2, support);
      }
    }
  } else if (d.c2 == 0.0) {
    if (d.c1 == 0.0) {
      // clog log x + c0 = 0
      push_if_inside(roots, std::exp(-d.c0 / d.clog), support);
    } else {
      roots_linear_log(d, support, roots);
    }
  } else {
    // Not produced by any same-family pair; keep the partition total anyway.
    roots_linear_log(d, support, roots);
  }

  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) {
                            return std::fabs(a - b) <= kDedupTol * (1.0 + std::fabs(a));
                          }),
              roots.end());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double lo = i == 0 ? support.lo : roots[i - 1];
    const double hi = i + 1 == roots.size() ? support.hi : roots[i + 1];
    roots[i] = polish_root(d, roots[i], lo, hi);
  }
  return roots;
}

} // namespace

std::vector<double> pairwise_intersections(const WeightedComponent& c1,
                                           const WeightedComponent& c2,
                                           const SupportInterval& support) {
  if (family_of(c1.params) != family_of(c2.params)) {
    throw std::invalid_argument("pairwise_intersections: components from different families");
  }
  const LogLinForm f1 = log_weighted_density_form(c1.weight, c1.params);
  const LogLinForm f2 = log_weighted_density_form(c2.weight, c2.params);
  const LogRatio d{f1.c0 - f2.c0, f1.c1 - f2.c1, f1.c2 - f2.c2, f1.clog - f2.clog};
  return roots_of_log_ratio(d, support);
}

std::vector<double> log_linform_crossings(const LogLinForm& f1, const LogLinForm& f2,
                                          double lo, double hi) {
  const LogRatio d{f1.c0 - f2.c0, f1.c1 - f2.c1, f1.c2 - f2.c2, f1.clog - f2.clog};
  return roots_of_log_ratio(d, SupportInterval{lo, hi, false});
}

EnvelopePartition build_partition(std::span<const WeightedComponent> components,
                                  const SupportInterval& support, EnvelopeMode mode) {
  if (components.empty()) throw std::invalid_argument("build_partition: empty component list");

  std::vector<double> candidates;
  for (std::size_t i = 0; i < components.size(); ++i) {
    for (std::size_t j = i + 1; j < components.size(); ++j) {
      const auto roots = pairwise_intersections(components[i], components[j], support);
      candidates.insert(candidates.end(), roots.begin(), roots.end());
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end(),
                               [](double a, double b) {
                                 return std::fabs(a - b) <= kDedupTol * (1.0 + std::fabs(a));
                               }),
                   candidates.end());

  std::vector<LogLinForm> forms;
  forms.reserve(components.size());
  for (const auto& c : components) forms.push_back(log_weighted_density_form(c.weight, c.params));

  std::vector<double> bps;
  bps.reserve(candidates.size() + 2);
  bps.push_back(support.lo);
  for (double x : candidates) {
    if (x > support.lo && x < support.hi) bps.push_back(x);
  }
  bps.push_back(support.hi);

  EnvelopePartition part;
  part.mode = mode;
  part.support = support;
  part.breakpoints.push_back(support.lo);
  int prev = -1;
  for (std::size_t r = 0; r + 1 < bps.size(); ++r) {
    const double probe = probe_point(bps[r], bps[r + 1]);
    int best = 0;
    double best_val = forms[0](probe);
    for (std::size_t j = 1; j < forms.size(); ++j) {
      const double v = forms[j](probe);
      const bool better = mode == EnvelopeMode::Upper ? v > best_val : v < best_val;
      if (better) {
        best = static_cast<int>(j);
        best_val = v;
      }
    }
    if (best == prev) continue; // merge with previous interval
    if (prev != -1) part.breakpoints.push_back(bps[r]);
    part.piece_index.push_back(best);
    prev = best;
  }
  part.breakpoints.push_back(support.hi);
  return part;
}

std::vector<OverlayInterval> overlay(std::span<const EnvelopePartition* const> partitions) {
  if (partitions.empty()) throw std::invalid_argument("overlay: no partitions");
  const SupportInterval support = partitions.front()->support;
  for (const auto* p : partitions) {
    if (p->support.lo != support.lo || p->support.hi != support.hi) {
      throw std::invalid_argument("overlay: partitions over different supports");
    }
  }

  std::vector<double> bps;
  for (const auto* p : partitions) {
    bps.insert(bps.end(), p->breakpoints.begin(), p->breakpoints.end());
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end(),
                        [](double a, double b) {
                          if (a == b) return true; // covers matched infinities
                          return std::fabs(a - b) <= kDedupTol * (1.0 + std::fabs(a));
                        }),
            bps.end());

  std::vector<OverlayInterval> result;
  result.reserve(bps.size() - 1);
  for (std::size_t r = 0; r + 1 < bps.size(); ++r) {
    OverlayInterval iv{bps[r], bps[r + 1], {}};
    const double probe = probe_point(iv.lo, iv.hi);
    iv.piece.reserve(partitions.size());
    for (const auto* p : partitions) {
      iv.piece.push_back(p->piece_index[p->piece_at(probe)]);
    }
    result.push_back(std::move(iv));
  }
  return result;
}

std::vector<OverlayInterval> overlay(const EnvelopePartition& p1, const EnvelopePartition& p2) {
  const EnvelopePartition* parts[] = {&p1, &p2};
  return overlay(std::span<const EnvelopePartition* const>(parts, 2));
}

} // namespace mixbound
