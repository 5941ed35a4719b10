#include "ehpc/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace ehpc {

namespace {

// Kronrod nodes on [0, 1]; odd indices are the embedded Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gauss_kronrod(const Integrand& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(mid);
  double kronrod = kKronrod[7] * fc;
  double gauss = kGauss[3] * fc;
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double pair = f(mid - dx) + f(mid + dx);
    kronrod += kKronrod[i] * pair;
    if (i % 2 == 1) gauss += kGauss[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

QuadratureResult adaptive(const Integrand& f, const std::vector<double>& breaks,
                          const QuadratureOptions& opts) {
  std::priority_queue<Segment> queue;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const Segment s = gauss_kronrod(f, breaks[i], breaks[i + 1]);
    total += s.value;
    error += s.error;
    queue.push(s);
  }
  while (!queue.empty() && queue.size() < opts.max_intervals) {
    const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    if (error <= target) break;
    const Segment worst = queue.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval at machine resolution
    queue.pop();
    const Segment left = gauss_kronrod(f, worst.a, mid);
    const Segment right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  // Re-sum to shed the drift of the incremental updates.
  QuadratureResult out;
  out.intervals = queue.size();
  while (!queue.empty()) {
    out.value += queue.top().value;
    out.error += queue.top().error;
    queue.pop();
  }
  return out;
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& opts) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("integrate: limits must be finite");
  if (a == b) return {};
  if (b < a) {
    QuadratureResult r = integrate(f, b, a, opts);
    r.value = -r.value;
    return r;
  }
  return adaptive(f, {a, b}, opts);
}

QuadratureResult integrate_to_infinity(const Integrand& f, double a,
                                       const QuadratureOptions& opts) {
  if (!std::isfinite(a)) throw std::invalid_argument("integrate_to_infinity: bad lower limit");
  std::vector<double> breaks{a};
  double peak = std::abs(f(a));
  double step = std::max(1.0, 0.5 * std::abs(a));
  double x = a;
  for (int k = 0; k < 200; ++k) {
    x += step;
    breaks.push_back(x);
    const double fx = std::abs(f(x));
    peak = std::max(peak, fx);
    if (peak > 0.0 && fx < opts.tail_cutoff * peak && k >= 2) break;
    step *= 2.0;
  }
  if (peak == 0.0) return {};
  return adaptive(f, breaks, opts);
}

}  // namespace ehpc
