#include "ehpc/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ehpc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxTerms = 10000;

// E1 by its power series, accurate for small arguments.
double e1_series(double y) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < kMaxTerms; ++k) {
    term *= -y / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) < kEps * std::abs(sum)) break;
  }
  return -std::numbers::egamma - std::log(y) - sum;
}

// Modified Lentz evaluation of the continued fraction for e^y E1(y), y > 1.
double scaled_e1_continued_fraction(double y) {
  double b = y + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

void check_e1_argument(double y) {
  if (!(y > 0.0) || std::isnan(y)) {
    if (y == 0.0) throw std::domain_error("E1 diverges at 0");
    throw std::invalid_argument("E1 requires a positive argument");
  }
}

bool is_small_integer(double n) { return n == std::floor(n) && n >= 1.0 && n <= 170.0; }

// (n-1)! e^-y sum_{k<n} y^k / k!
double integer_order(int n, double y) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < n; ++k) {
    term *= y / k;
    sum += term;
  }
  return std::tgamma(static_cast<double>(n)) * std::exp(-y) * sum;
}

// Lower incomplete Gamma by series, y < n + 1.
double lower_series(double n, double y) {
  if (y == 0.0) return 0.0;
  double ap = n;
  double term = 1.0 / n;
  double sum = term;
  for (int k = 0; k < kMaxTerms; ++k) {
    ap += 1.0;
    term *= y / ap;
    sum += term;
    if (std::abs(term) < kEps * std::abs(sum)) break;
  }
  return sum * std::exp(-y + n * std::log(y));
}

// Upper incomplete Gamma by continued fraction, y >= n + 1.
double upper_continued_fraction(double n, double y) {
  double b = y + 1.0 - n;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - n);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-y + n * std::log(y)) * h;
}

}  // namespace

double exponential_integral_e1(double y) {
  check_e1_argument(y);
  if (std::isinf(y)) return 0.0;
  return y <= 1.0 ? e1_series(y) : scaled_e1_continued_fraction(y) * std::exp(-y);
}

double scaled_exponential_integral_e1(double y) {
  check_e1_argument(y);
  if (std::isinf(y)) return 0.0;
  return y <= 1.0 ? std::exp(y) * e1_series(y) : scaled_e1_continued_fraction(y);
}

double upper_incomplete_gamma(double n, double y) {
  if (std::isnan(n) || std::isnan(y) || n < 0.0 || y < 0.0 || std::isinf(n))
    throw std::invalid_argument("upper_incomplete_gamma: requires n >= 0, y >= 0");
  if (n == 0.0) {
    if (y == 0.0) throw std::domain_error("upper_incomplete_gamma(0, 0) diverges");
    return exponential_integral_e1(y);
  }
  if (std::isinf(y)) return 0.0;
  if (is_small_integer(n)) return integer_order(static_cast<int>(n), y);
  if (y < n + 1.0) return std::tgamma(n) - lower_series(n, y);
  return upper_continued_fraction(n, y);
}

double regularized_upper_gamma(double n, double y) {
  if (!(n > 0.0)) throw std::invalid_argument("regularized_upper_gamma: requires n > 0");
  if (std::isinf(y)) return 0.0;
  if (!is_small_integer(n) && y < n + 1.0) {
    if (y < 0.0) throw std::invalid_argument("regularized_upper_gamma: requires y >= 0");
    return 1.0 - lower_series(n, y) / std::tgamma(n);
  }
  if (is_small_integer(n)) {
    // e^-y sum_{k<n} y^k / k!, without the factorial round trip.
    if (y < 0.0) throw std::invalid_argument("regularized_upper_gamma: requires y >= 0");
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < static_cast<int>(n); ++k) {
      term *= y / k;
      sum += term;
    }
    return std::exp(-y) * sum;
  }
  return upper_incomplete_gamma(n, y) / std::tgamma(n);
}

}  // namespace ehpc
