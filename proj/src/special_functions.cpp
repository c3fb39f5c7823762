#include "popdens/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "popdens/errors.hpp"

namespace popdens {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;

void require_positive(double t, const char* fn) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw DomainError(std::string(fn) + ": argument must be finite and > 0, got " +
                      std::to_string(t));
  }
}

bool is_odd(int k) { return (k % 2) != 0; }

// Spherical Bessel pair (j_k, y_k) for k >= 0 by upward recurrence from the
// elementary k = -1, 0 members.
detail::BesselPair spherical_jy(int k, double t) {
  const double s = std::sin(t);
  const double c = std::cos(t);
  double j_prev = c / t;  // j_{-1}
  double j_cur = s / t;   // j_0
  double y_prev = s / t;  // y_{-1}
  double y_cur = -c / t;  // y_0
  for (int m = 0; m < k; ++m) {
    const double factor = (2.0 * m + 1.0) / t;
    const double j_next = factor * j_cur - j_prev;
    const double y_next = factor * y_cur - y_prev;
    j_prev = j_cur;
    j_cur = j_next;
    y_prev = y_cur;
    y_cur = y_next;
  }
  return {j_cur, y_cur};
}

// J_{k+1/2}, Y_{k+1/2} for k >= 0.
detail::BesselPair half_odd_jy(int k, double t) {
  const double scale = std::sqrt(2.0 * t / kPi);
  const detail::BesselPair sph = spherical_jy(k, t);
  double j = scale * sph.j;
  // Upward recurrence for j_k cancels like t^{-2k} near the origin.
  if (k >= 1 && t < 1.0) j = detail::j_power_series(k + 0.5, t);
  return {j, scale * sph.y};
}

double k_half_odd(int k, double t) {
  double prev = std::sqrt(kPi / (2.0 * t)) * std::exp(-t);  // K_{1/2}
  if (k == 0) return prev;
  double cur = prev * (1.0 + 1.0 / t);  // K_{3/2}
  for (int m = 1; m < k; ++m) {
    const double nu = m + 0.5;
    const double next = prev + (2.0 * nu / t) * cur;
    prev = cur;
    cur = next;
  }
  return cur;
}

double k_integer(int n, double t) {
  double k0 = detail::k_integral(0.0, t);
  if (n == 0) return k0;
  double k1 = detail::k_integral(1.0, t);
  for (int m = 1; m < n; ++m) {
    const double next = k0 + (2.0 * m / t) * k1;
    k0 = k1;
    k1 = next;
  }
  return k1;
}

detail::BesselPair integer_jy(int n, double t) {
  if (t >= detail::kHankelSeam) return detail::hankel_asymptotic(n, t);
  return detail::recurrence_jy(n, t);
}

}  // namespace

namespace detail {

BesselPair hankel_asymptotic(double nu, double t) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last_magnitude = 1.0;
  // For half-odd orders the series ends after nu + 1/2 terms and is exact.
  const double twice = std::round(2.0 * nu);
  const bool terminates = std::abs(2.0 * nu - twice) < 1e-12 && is_odd(static_cast<int>(twice));
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (8.0 * k * t);
    const double magnitude = std::abs(term);
    if (magnitude == 0.0) break;
    // Asymptotic series: stop at the smallest term.
    if (!terminates && magnitude > last_magnitude) break;
    last_magnitude = magnitude;
    // Signs follow (-1)^{floor(k/2)}.
    const double signed_term = ((k / 2) % 2 == 0) ? term : -term;
    if (is_odd(k)) {
      q += signed_term;
    } else {
      p += signed_term;
    }
    if (magnitude < 1e-17 * (std::abs(p) + std::abs(q))) break;
  }
  const double omega = t - (0.5 * nu + 0.25) * kPi;
  const double amp = std::sqrt(2.0 / (kPi * t));
  const double c = std::cos(omega);
  const double s = std::sin(omega);
  return {amp * (p * c - q * s), amp * (p * s + q * c)};
}

BesselPair recurrence_jy(int n, double t) {
  const int top = 2 * (static_cast<int>(std::max<double>(n, t)) / 2) + 40;
  std::vector<double> f(static_cast<std::size_t>(top) + 2, 0.0);
  f[top] = 1e-30;
  for (int k = top; k >= 1; --k) {
    f[k - 1] = (2.0 * k / t) * f[k] - f[k + 1];
    if (std::abs(f[k - 1]) > 1e250) {
      for (int m = k - 1; m <= top; ++m) f[m] *= 1e-250;
    }
  }
  double norm = f[0];
  for (int k = 2; k <= top; k += 2) norm += 2.0 * f[k];
  for (double& v : f) v /= norm;

  const double log_term = std::log(0.5 * t) + kEulerGamma;
  double y0_sum = 0.0;
  double y1_sum = 0.0;
  for (int k = 1; 2 * k + 1 <= top + 1; ++k) {
    const double sign = is_odd(k) ? -1.0 : 1.0;
    y0_sum += sign * f[2 * k] / k;
    y1_sum += sign * (f[2 * k - 1] - f[2 * k + 1]) / k;
  }
  const double y0 = (2.0 / kPi) * log_term * f[0] - (4.0 / kPi) * y0_sum;
  const double y1 = -(2.0 / kPi) * (f[0] / t - log_term * f[1]) + (2.0 / kPi) * y1_sum;
  if (n == 0) return {f[0], y0};
  double y_prev = y0;
  double y_cur = y1;
  for (int m = 1; m < n; ++m) {
    const double next = (2.0 * m / t) * y_cur - y_prev;
    y_prev = y_cur;
    y_cur = next;
  }
  return {f[n], y_cur};
}

double j_power_series(double nu, double t) {
  const double x2 = 0.25 * t * t;
  double term = std::pow(0.5 * t, nu) / std::tgamma(nu + 1.0);
  double sum = term;
  for (int m = 0; m < 500; ++m) {
    term *= -x2 / ((m + 1.0) * (m + 1.0 + nu));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double k_integral(double nu, double t) {
  const double step = std::min(0.1, 0.5 / std::sqrt(t));
  const double anu = std::abs(nu);
  double sum = 0.5;  // g(0) / 2
  for (int k = 1;; ++k) {
    const double s = k * step;
    const double sh = std::sinh(0.5 * s);
    const double decay = 2.0 * t * sh * sh;  // t (cosh s - 1)
    sum += std::exp(-decay) * std::cosh(anu * s);
    if (decay > anu * s + 50.0) break;
  }
  return std::exp(-t) * step * sum;
}

double i_power_series(double nu, double t) {
  const double x2 = 0.25 * t * t;
  double term = std::pow(0.5 * t, nu) / std::tgamma(nu + 1.0);
  double sum = term;
  for (int m = 0; m < 2000; ++m) {
    term *= x2 / ((m + 1.0) * (m + 1.0 + nu));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace detail

double bessel_j(Order nu, double t) {
  require_positive(t, "bessel_j");
  const int twice = nu.twice();
  if (nu.is_integer()) {
    const int n = twice / 2;
    const double v = integer_jy(std::abs(n), t).j;
    return (n < 0 && is_odd(n)) ? -v : v;
  }
  if (twice > 0) return half_odd_jy((twice - 1) / 2, t).j;
  // J_{-(k+1/2)} = (-1)^{k+1} Y_{k+1/2}
  const int k = (-twice - 1) / 2;
  const double y = half_odd_jy(k, t).y;
  return is_odd(k + 1) ? -y : y;
}

double bessel_y(Order nu, double t) {
  require_positive(t, "bessel_y");
  const int twice = nu.twice();
  if (nu.is_integer()) {
    const int n = twice / 2;
    const double v = integer_jy(std::abs(n), t).y;
    return (n < 0 && is_odd(n)) ? -v : v;
  }
  if (twice > 0) return half_odd_jy((twice - 1) / 2, t).y;
  // Y_{-(k+1/2)} = (-1)^k J_{k+1/2}
  const int k = (-twice - 1) / 2;
  const double j = half_odd_jy(k, t).j;
  return is_odd(k) ? -j : j;
}

double bessel_k(Order nu, double t) {
  require_positive(t, "bessel_k");
  const int twice = std::abs(nu.twice());
  if (twice % 2 == 0) return k_integer(twice / 2, t);
  return k_half_odd((twice - 1) / 2, t);
}

double bessel_i(Order nu, double t) {
  require_positive(t, "bessel_i");
  const int twice = nu.twice();
  if (twice == 1) return std::sqrt(2.0 / (kPi * t)) * std::sinh(t);
  if (twice == -1) return std::sqrt(2.0 / (kPi * t)) * std::cosh(t);
  if (nu.is_integer()) return detail::i_power_series(std::abs(twice / 2), t);
  return detail::i_power_series(nu.value(), t);
}

double wronskian_residual(Order nu, double t) {
  require_positive(t, "wronskian_residual");
  return bessel_j(nu, t) * bessel_y(nu + 1, t) - bessel_j(nu + 1, t) * bessel_y(nu, t) +
         2.0 / (kPi * t);
}

double first_zero_j(Order nu) {
  const int twice = nu.twice();
  if (twice < 0 || twice > 3) {
    throw DomainError("first_zero_j: supported orders are 0, 1/2, 1, 3/2");
  }
  constexpr double kScanStep = 0.1;
  double lo = kScanStep;
  double f_lo = bessel_j(nu, lo);
  for (int i = 2; i <= 100; ++i) {
    const double hi = i * kScanStep;
    const double f_hi = bessel_j(nu, hi);
    if (f_hi == 0.0) return hi;
    if (std::signbit(f_lo) != std::signbit(f_hi)) {
      double a = lo;
      double b = hi;
      double fa = f_lo;
      while (b - a > 1e-13) {
        const double mid = 0.5 * (a + b);
        const double fm = bessel_j(nu, mid);
        if (fm == 0.0) return mid;
        if (std::signbit(fm) == std::signbit(fa)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    lo = hi;
    f_lo = f_hi;
  }
  throw NoRootError("first_zero_j: no sign change on (0, 10]");
}

}  // namespace popdens
