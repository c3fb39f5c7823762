#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "popdens/errors.hpp"
#include "popdens/special_functions.hpp"

using namespace popdens;
using std::numbers::pi;

namespace {

std::vector<double> log_spaced(double a, double b, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
  return t;
}

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

const Order kOrders[] = {Order::integer(0), Order::half_odd(0), Order::integer(1), Order::half_odd(1),
                         Order::integer(2)};

// Five-point stencil, step scaled with t below 1.
double central(const std::function<double(double)>& f, double t) {
  const double s = 1e-3 * std::min(t, 1.0);
  return (f(t - 2 * s) - 8 * f(t - s) + 8 * f(t + s) - f(t + 2 * s)) / (12 * s);
}

}  // namespace

TEST_CASE("J, Y, K, I agree with the standard library on [1e-3, 50]") {
  for (Order nu : kOrders) {
    CAPTURE(nu.value());
    for (double t : log_spaced(1e-3, 50.0, 400)) {
      CAPTURE(t);
      const double j = std::cyl_bessel_j(nu.value(), t);
      // Near a zero only absolute accuracy is meaningful.
      CHECK(std::abs(bessel_j(nu, t) - j) <= 1e-12 * std::max(std::abs(j), 1e-2));
      const double y = std::cyl_neumann(nu.value(), t);
      CHECK(std::abs(bessel_y(nu, t) - y) <= 1e-12 * std::max(std::abs(y), 1e-2));
      CHECK(rel(bessel_k(nu, t), std::cyl_bessel_k(nu.value(), t)) <= 1e-12);
      CHECK(rel(bessel_i(nu, t), std::cyl_bessel_i(nu.value(), t)) <= 1e-12);
    }
  }
}

TEST_CASE("elementary values") {
  CHECK(std::abs(bessel_j(Order::half_odd(0), pi)) < 1e-15);
  CHECK(std::abs(bessel_y(Order::half_odd(0), pi / 2)) < 1e-15);
  CHECK(bessel_k(Order::half_odd(0), 1.0) == doctest::Approx(std::sqrt(pi / 2) * std::exp(-1.0)).epsilon(1e-14));
  CHECK(bessel_i(Order::half_odd(0), 1.0) == doctest::Approx(std::sqrt(2 / pi) * std::sinh(1.0)).epsilon(1e-14));
  CHECK(bessel_j(Order::half_odd(1), 2.0) ==
        doctest::Approx(std::sqrt(2 / (pi * 2.0)) * (std::sin(2.0) / 2.0 - std::cos(2.0))).epsilon(1e-14));
}

TEST_CASE("small-argument limits") {
  CHECK(bessel_j(Order::integer(0), 1e-8) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bessel_i(Order::integer(0), 1e-8) == doctest::Approx(1.0).epsilon(1e-15));
  // t^{-nu} J_nu -> 1 / (2^nu Gamma(nu + 1))
  CHECK(bessel_j(Order::integer(1), 1e-6) / 1e-6 == doctest::Approx(0.5).epsilon(1e-10));
  const double t = 1e-10;
  CHECK(bessel_y(Order::integer(0), t) / std::log(t) == doctest::Approx(2 / pi).epsilon(0.02));
  CHECK(t * bessel_y(Order::integer(1), t) == doctest::Approx(-2 / pi).epsilon(1e-9));
  CHECK(bessel_k(Order::integer(1), 1e-6) / bessel_k(Order::integer(0), 1e-6) > 1e4);
}

TEST_CASE("K_0 follows its large-argument asymptote") {
  const double ratio = bessel_k(Order::integer(0), 20.0) / (std::pow(20.0, -0.5) * std::exp(-20.0));
  CHECK(std::abs(ratio / std::sqrt(pi / 2) - 1.0) < 0.02);
}

TEST_CASE("K is positive and decreasing, I positive and increasing, |J_0| <= 1") {
  for (Order nu : kOrders) {
    double prev_k = INFINITY, prev_i = 0.0;
    for (double t : log_spaced(1e-3, 50.0, 300)) {
      const double k = bessel_k(nu, t);
      const double i = bessel_i(nu, t);
      CHECK(k > 0.0);
      CHECK(k < prev_k);
      CHECK(i > 0.0);
      CHECK(i > prev_i);
      prev_k = k;
      prev_i = i;
    }
  }
  for (double t : log_spaced(1e-3, 50.0, 300)) CHECK(std::abs(bessel_j(Order::integer(0), t)) <= 1.0);
}

TEST_CASE("Wronskian vanishes") {
  CHECK(std::abs(wronskian_residual(Order::integer(0), 1.0)) <= 1e-10);
  CHECK(std::abs(wronskian_residual(Order::half_odd(0), 2.0)) <= 1e-10);
  CHECK(std::abs(wronskian_residual(Order::integer(1), 10.0)) <= 1e-10);
  for (Order nu : {Order::integer(0), Order::half_odd(0), Order::integer(1)}) {
    for (double t : log_spaced(0.05, 50.0, 200)) CHECK(std::abs(wronskian_residual(nu, t)) <= 1e-10);
  }
}

TEST_CASE("derivative recurrences by central differences") {
  using F = double (*)(Order, double);
  for (Order nu : {Order::integer(0), Order::half_odd(0), Order::integer(1), Order::half_odd(1)}) {
    const double v = nu.value();
    for (double t : log_spaced(0.1, 20.0, 120)) {
      CAPTURE(v);
      CAPTURE(t);
      for (F f : {F(bessel_j), F(bessel_y)}) {
        const double down = central([&](double s) { return std::pow(s, -v) * f(nu, s); }, t);
        CHECK(std::abs(down + std::pow(t, -v) * f(nu + 1, t)) <= 1e-6);
        const double up = central([&](double s) { return std::pow(s, v) * f(nu, s); }, t);
        CHECK(std::abs(up - std::pow(t, v) * f(nu - 1, t)) <= 1e-6);
      }
      // K grows like t^{-2 nu - 1} at the left end; compare relative to the slope there.
      const double kd = central([&](double s) { return std::pow(s, -v) * bessel_k(nu, s); }, t);
      const double k_slope = std::pow(t, -v) * bessel_k(nu + 1, t);
      CHECK(std::abs(kd + k_slope) <= 1e-6 * std::max(1.0, std::abs(k_slope)));
      const double ku = central([&](double s) { return std::pow(s, v) * bessel_k(nu, s); }, t);
      CHECK(std::abs(ku + std::pow(t, v) * bessel_k(nu - 1, t)) <= 1e-6);
    }
  }
  const double id = central([](double s) { return bessel_i(Order::integer(0), s); }, 1.0);
  CHECK(std::abs(id - bessel_i(Order::integer(1), 1.0)) <= 1e-6);
}

TEST_CASE("half-odd closed forms match the general evaluators") {
  for (int k : {0, 1}) {
    const Order nu = Order::half_odd(k);
    for (double t : log_spaced(0.01, 8.0, 60)) {
      CHECK(rel(bessel_j(nu, t), detail::j_power_series(nu.value(), t)) <= 1e-12);
      CHECK(rel(bessel_i(nu, t), detail::i_power_series(nu.value(), t)) <= 1e-12);
    }
    for (double t : log_spaced(0.01, 50.0, 60)) {
      CHECK(rel(bessel_k(nu, t), detail::k_integral(nu.value(), t)) <= 1e-12);
      const auto p = detail::hankel_asymptotic(nu.value(), t);
      CHECK(std::abs(bessel_j(nu, t) - p.j) <= 1e-12 * std::max(1.0, std::abs(p.j)));
      CHECK(std::abs(bessel_y(nu, t) - p.y) <= 1e-12 * std::max(1.0, std::abs(p.y)));
    }
  }
}

TEST_CASE("series and asymptotic branches meet at the seam") {
  const double s = detail::kHankelSeam;
  for (int n : {0, 1, 2}) {
    const auto lo = detail::recurrence_jy(n, s);
    const auto hi = detail::hankel_asymptotic(n, s);
    CHECK(std::abs(lo.j - hi.j) <= 1e-12);
    CHECK(std::abs(lo.y - hi.y) <= 1e-12);
  }
}

TEST_CASE("first zeros") {
  CHECK(first_zero_j(Order::half_odd(0)) == doctest::Approx(pi).epsilon(1e-13));
  const double j0 = first_zero_j(Order::integer(0));
  CHECK(j0 > 2.40);
  CHECK(j0 < 2.41);
  CHECK(std::abs(bessel_j(Order::integer(0), j0)) < 1e-12);
  CHECK(first_zero_j(Order::integer(0)) < first_zero_j(Order::integer(1)));
  CHECK(first_zero_j(Order::integer(1)) == doctest::Approx(3.831705970207512).epsilon(1e-12));
  CHECK(first_zero_j(Order::half_odd(1)) == doctest::Approx(4.493409457909064).epsilon(1e-12));
  CHECK_THROWS_AS(first_zero_j(Order::integer(2)), DomainError);
}

TEST_CASE("nonpositive arguments are rejected") {
  for (double t : {0.0, -1.0, double(NAN)}) {
    CHECK_THROWS_AS(bessel_j(Order::integer(0), t), DomainError);
    CHECK_THROWS_AS(bessel_y(Order::integer(1), t), DomainError);
    CHECK_THROWS_AS(bessel_k(Order::half_odd(0), t), DomainError);
    CHECK_THROWS_AS(bessel_i(Order::integer(0), t), DomainError);
    CHECK_THROWS_AS(wronskian_residual(Order::integer(0), t), DomainError);
  }
}
