#pragma once

// Real Bessel functions J, Y, K, I of integer and half-odd-integer order.
//
// Integer orders: J via Miller backward recurrence, Y via the Neumann series
// built on the same sequence, both switching to the Hankel asymptotic
// expansion for t >= kHankelSeam. K via trapezoidal quadrature of
// K_nu(t) = int_0^inf exp(-t cosh s) cosh(nu s) ds. I via its power series.
// Half-odd orders use the elementary spherical-Bessel closed forms.

#include <compare>
#include <cstdlib>

namespace popdens {

/// Bessel order nu, stored exactly as 2*nu so half-odd orders are exact.
class Order {
 public:
  constexpr Order() = default;

  static constexpr Order integer(int n) { return Order(2 * n); }
  /// Order (2k+1)/2.
  static constexpr Order half_odd(int k) { return Order(2 * k + 1); }
  static constexpr Order from_twice(int twice_nu) { return Order(twice_nu); }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  constexpr Order operator+(int k) const { return Order(twice_ + 2 * k); }
  constexpr Order operator-(int k) const { return Order(twice_ - 2 * k); }
  constexpr Order operator-() const { return Order(-twice_); }
  constexpr auto operator<=>(const Order&) const = default;

 private:
  constexpr explicit Order(int twice_nu) : twice_(twice_nu) {}
  int twice_ = 0;
};

/// Order (d-2)/2 and d/2 used by the radial constructions in dimension d.
constexpr Order inner_order(int d) { return Order::from_twice(d - 2); }
constexpr Order outer_order(int d) { return Order::from_twice(d); }

double bessel_j(Order nu, double t);
double bessel_y(Order nu, double t);
double bessel_k(Order nu, double t);
double bessel_i(Order nu, double t);

/// J_nu Y_{nu+1} - J_{nu+1} Y_nu + 2/(pi t); zero up to rounding.
double wronskian_residual(Order nu, double t);

/// Smallest positive zero j_{nu,1} of J_nu for nu in {0, 1/2, 1, 3/2}.
double first_zero_j(Order nu);

namespace detail {

inline constexpr double kHankelSeam = 25.0;

struct BesselPair {
  double j;
  double y;
};

/// Hankel asymptotic expansion of (J_nu, Y_nu); exact for half-odd nu.
BesselPair hankel_asymptotic(double nu, double t);

/// Integer-order J_n, Y_n through backward recurrence and Neumann series.
BesselPair recurrence_jy(int n, double t);

/// Ascending power series of J_nu for real nu > -1 (or nu a negative half-odd).
double j_power_series(double nu, double t);

/// K_nu(t) by trapezoidal quadrature of the cosh integral, any real nu.
double k_integral(double nu, double t);

/// Power series of I_nu for nu >= 0 or nu a negative half-odd.
double i_power_series(double nu, double t);

}  // namespace detail

}  // namespace popdens
