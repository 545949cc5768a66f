#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mixbound/integrals.hpp"

namespace mixbound {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kUflow = std::numeric_limits<double>::min();

// Gauss 7 / Kronrod 15 abscissae and weights (positive half), QUADPACK dqk15.
const double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
const double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
const double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

struct Segment {
  double a, b;
  double value;
  double error;
};

Segment evaluate_g7k15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::fabs(fc) * kWgk[7];

  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    fv1[j] = f(center - dx);
    fv2[j] = f(center + dx);
    const double sum = fv1[j] + fv2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::fabs(fv1[j]) + std::fabs(fv2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum; // Kronrod nodes 1,3,5 are the Gauss nodes
  }

  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
  }

  Segment s;
  s.a = a;
  s.b = b;
  s.value = resk * h;
  resabs *= std::fabs(h);
  resasc *= std::fabs(h);
  double err = std::fabs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > kUflow / (50.0 * kEps)) {
    err = std::max(err, 50.0 * kEps * resabs);
  }
  s.error = err;
  return s;
}

} // namespace

QuadratureValue adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                                    double tol, int max_segments) {
  if (!(tol > 0.0)) throw std::invalid_argument("adaptive_quadrature: tol must be positive");
  if (!(a <= b)) throw std::invalid_argument("adaptive_quadrature: need a <= b");
  if (a == b) return {0.0, 0.0};
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("adaptive_quadrature: endpoints must be finite");
  }

  auto by_error = [](const Segment& l, const Segment& r) { return l.error < r.error; };

  std::vector<Segment> segs;
  segs.push_back(evaluate_g7k15(f, a, b));

  auto total = [&]() {
    // Deterministic summation: fixed left-to-right order over sorted segments.
    std::vector<const Segment*> order(segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) order[i] = &segs[i];
    std::sort(order.begin(), order.end(),
              [](const Segment* l, const Segment* r) { return l->a < r->a; });
    QuadratureValue q;
    for (const Segment* s : order) {
      q.value += s->value;
      q.error_bound += s->error;
    }
    return q;
  };

  std::make_heap(segs.begin(), segs.end(), by_error);
  double err_sum = segs.front().error;
  while (err_sum > tol) {
    if (static_cast<int>(segs.size()) >= max_segments) {
      throw QuadratureError("adaptive_quadrature: subdivision limit reached", total());
    }
    std::pop_heap(segs.begin(), segs.end(), by_error);
    Segment worst = segs.back();
    segs.pop_back();

    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval no longer splittable; its error stays in the budget.
      segs.push_back(worst);
      std::push_heap(segs.begin(), segs.end(), by_error);
      const QuadratureValue q = total();
      if (q.error_bound > tol) {
        throw QuadratureError("adaptive_quadrature: interval exhausted at machine precision", q);
      }
      return q;
    }

    const Segment left = evaluate_g7k15(f, worst.a, mid);
    const Segment right = evaluate_g7k15(f, mid, worst.b);
    err_sum += left.error + right.error - worst.error;
    segs.push_back(left);
    std::push_heap(segs.begin(), segs.end(), by_error);
    segs.push_back(right);
    std::push_heap(segs.begin(), segs.end(), by_error);
  }
  return total();
}

QuadratureValue integrate_interval(const std::function<double(double)>& f, double a, double b,
                                   double tol, int max_segments) {
  const bool lo_inf = !std::isfinite(a);
  const bool hi_inf = !std::isfinite(b);
  if (!lo_inf && !hi_inf) return adaptive_quadrature(f, a, b, tol, max_segments);
  if (lo_inf && hi_inf) {
    const QuadratureValue l = integrate_interval(f, a, 0.0, 0.5 * tol, max_segments);
    const QuadratureValue r = integrate_interval(f, 0.0, b, 0.5 * tol, max_segments);
    return {l.value + r.value, l.error_bound + r.error_bound};
  }
  if (hi_inf) {
    auto g = [&f, a](double t) {
      const double om = 1.0 - t;
      const double x = a + t / om;
      const double v = f(x);
      return v == 0.0 ? 0.0 : v / (om * om);
    };
    return adaptive_quadrature(g, 0.0, 1.0, tol, max_segments);
  }
  auto g = [&f, b](double t) {
    const double om = 1.0 - t;
    const double x = b - t / om;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v / (om * om);
  };
  return adaptive_quadrature(g, 0.0, 1.0, tol, max_segments);
}

} // namespace mixbound
