#include "popdens/radial_solutions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "popdens/errors.hpp"
#include "popdens/special_functions.hpp"

namespace popdens {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kScanPoints = 10000;

double nu_of(int d) { return 0.5 * (d - 2); }

void check_dimension(int d) {
  if (d != 2 && d != 3) {
    throw DomainError("unsupported dimension d = " + std::to_string(d) + " (expected 2 or 3)");
  }
}

// Coefficients of the matching residual that do not depend on rho:
//   residual(rho) = -Y_{d/2}(k rho) * first - J_{d/2}(k rho) * second
struct ResidualFactors {
  double first;
  double second;
};

ResidualFactors residual_factors(const RadialParams& p) {
  const Order inner = inner_order(p.d);
  const Order outer = outer_order(p.d);
  const double kr = p.kappa * p.R;
  const double ar = p.alpha * p.R;
  const double k_inner = bessel_k(inner, ar);
  const double k_outer = bessel_k(outer, ar);
  const double ratio = p.kappa / p.alpha;
  return {bessel_j(inner, kr) / k_inner - ratio * bessel_j(outer, kr) / k_outer,
          ratio * bessel_y(outer, kr) / k_outer - bessel_y(inner, kr) / k_inner};
}

double residual_with(const RadialParams& p, const ResidualFactors& f, double rho) {
  const Order outer = outer_order(p.d);
  const double s = p.kappa * rho;
  return -bessel_y(outer, s) * f.first - bessel_j(outer, s) * f.second;
}

void check_positive_params(const RadialParams& p) {
  if (!(p.kappa > 0.0) || !(p.alpha > 0.0) || !(p.R > 0.0)) {
    throw DomainError("radial parameters kappa, alpha, R must be positive");
  }
}

}  // namespace

double unit_ball_volume(int d) { return std::pow(kPi, 0.5 * d) / std::tgamma(1.0 + 0.5 * d); }

double fundamental_tone(int d, double r) {
  check_dimension(d);
  if (!(r > 0.0)) throw DomainError("fundamental_tone: radius must be positive");
  const double j = first_zero_j(inner_order(d));
  return (j / r) * (j / r);
}

void check_admissible(const RadialParams& p) {
  check_dimension(p.d);
  check_positive_params(p);
  const double tone = fundamental_tone(p.d, p.R);
  if (!(p.kappa * p.kappa > tone)) {
    std::ostringstream msg;
    msg << "inadmissible parameters: kappa^2 = " << p.kappa * p.kappa
        << " must exceed lambda*(B_R) = " << tone << " (d = " << p.d << ", R = " << p.R << ")";
    throw AdmissibilityError(msg.str());
  }
}

double rstar_residual(const RadialParams& params, double rho) {
  check_dimension(params.d);
  check_positive_params(params);
  if (!(rho > 0.0 && rho < params.R)) {
    throw DomainError("rstar_residual: rho must lie in (0, R)");
  }
  return residual_with(params, residual_factors(params), rho);
}

RstarSearch find_rstar(const RadialParams& params) {
  check_admissible(params);
  const ResidualFactors factors = residual_factors(params);
  auto f = [&](double rho) { return residual_with(params, factors, rho); };

  const double step = params.R / (kScanPoints + 1);
  std::vector<double> roots;
  double lo = step;
  double f_lo = f(lo);
  if (f_lo == 0.0) roots.push_back(lo);
  for (int i = 2; i <= kScanPoints; ++i) {
    const double hi = i * step;
    const double f_hi = f(hi);
    if (f_hi == 0.0) {
      roots.push_back(hi);
    } else if (f_lo != 0.0 && std::signbit(f_lo) != std::signbit(f_hi)) {
      // Bisect down to adjacent doubles and keep the end with the smaller residual.
      double a = lo;
      double b = hi;
      double fa = f_lo;
      double fb = f_hi;
      for (;;) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double fm = f(mid);
        if (fm == 0.0) {
          a = b = mid;
          fa = fb = 0.0;
          break;
        }
        if (std::signbit(fm) == std::signbit(fa)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
          fb = fm;
        }
      }
      roots.push_back(std::abs(fa) < std::abs(fb) ? a : b);
    }
    lo = hi;
    f_lo = f_hi;
  }
  if (roots.empty()) {
    throw NoRootError("solve_rstar: no sign change of the matching residual on (0, R)");
  }
  return {roots.back(), static_cast<int>(roots.size())};
}

double solve_rstar(const RadialParams& params) { return find_rstar(params).r_star; }

RadialSolution radial_minimizer(const RadialParams& params) {
  const RstarSearch search = find_rstar(params);
  RadialSolution sol;
  sol.params = params;
  sol.r_star = search.r_star;
  sol.bracket_count = search.bracket_count;

  const Order outer = outer_order(params.d);
  const double s = params.kappa * search.r_star;
  const double scale = 0.5 * kPi * std::pow(s, 0.5 * params.d);
  sol.a = -scale * bessel_y(outer, s);
  sol.b = scale * bessel_j(outer, s);

  const double nu = nu_of(params.d);
  const double ar = params.alpha * params.R;
  const double exterior_unit = std::pow(ar, -nu) * bessel_k(inner_order(params.d), ar);
  sol.c = eval_middle_branch(sol, params.R) / exterior_unit;
  return sol;
}

double eval_middle_branch(const RadialSolution& sol, double r) {
  const RadialParams& p = sol.params;
  const Order inner = inner_order(p.d);
  const double kr = p.kappa * r;
  return std::pow(kr, -nu_of(p.d)) * (sol.a * bessel_j(inner, kr) + sol.b * bessel_y(inner, kr));
}

double eval_middle_branch_derivative(const RadialSolution& sol, double r) {
  const RadialParams& p = sol.params;
  const Order outer = outer_order(p.d);
  const double kr = p.kappa * r;
  return -p.kappa * std::pow(kr, -nu_of(p.d)) *
         (sol.a * bessel_j(outer, kr) + sol.b * bessel_y(outer, kr));
}

double eval_outer_branch(const RadialSolution& sol, double r) {
  const RadialParams& p = sol.params;
  const double ar = p.alpha * r;
  return sol.c * std::pow(ar, -nu_of(p.d)) * bessel_k(inner_order(p.d), ar);
}

double eval_outer_branch_derivative(const RadialSolution& sol, double r) {
  const RadialParams& p = sol.params;
  const double ar = p.alpha * r;
  return -p.alpha * sol.c * std::pow(ar, -nu_of(p.d)) * bessel_k(outer_order(p.d), ar);
}

double eval_radial(const RadialSolution& sol, double r) {
  if (!(r >= 0.0)) throw DomainError("eval_radial: r must be >= 0");
  if (r <= sol.r_star) return 1.0;
  if (r < sol.params.R) return eval_middle_branch(sol, r);
  return eval_outer_branch(sol, r);
}

double eval_radial_derivative(const RadialSolution& sol, double r) {
  if (!(r >= 0.0)) throw DomainError("eval_radial_derivative: r must be >= 0");
  if (r <= sol.r_star) return 0.0;
  if (r < sol.params.R) return eval_middle_branch_derivative(sol, r);
  return eval_outer_branch_derivative(sol, r);
}

double eval_radial_3d_elementary(const RadialSolution& sol, double r) {
  const RadialParams& p = sol.params;
  if (p.d != 3) throw DomainError("eval_radial_3d_elementary requires d = 3");
  if (!(r > 0.0)) throw DomainError("eval_radial_3d_elementary: r must be > 0");
  if (r <= sol.r_star) return 1.0;

  const double s = p.kappa * sol.r_star;
  const double a_scaled = s * std::sin(s) + std::cos(s);  // a sqrt(2/pi)
  const double b_scaled = std::sin(s) - s * std::cos(s);  // b sqrt(2/pi)
  auto middle = [&](double x) {
    const double kx = p.kappa * x;
    return (a_scaled * std::sin(kx) - b_scaled * std::cos(kx)) / kx;
  };
  if (r < p.R) return middle(r);

  const double ar = p.alpha * p.R;
  const double c_scaled = ar / std::exp(-ar) * middle(p.R);  // c sqrt(pi/2)
  return c_scaled * std::exp(-p.alpha * r) / (p.alpha * r);
}

double rstar_residual_3d_elementary(const RadialParams& p, double rho) {
  if (p.d != 3) throw DomainError("rstar_residual_3d_elementary requires d = 3");
  if (!(rho > 0.0 && rho < p.R)) {
    throw DomainError("rstar_residual_3d_elementary: rho must lie in (0, R)");
  }
  const double s = p.kappa * rho;
  const double kr = p.kappa * p.R;
  const double damping = p.alpha * (1.0 / (p.alpha * p.R) + 1.0);
  const double lhs = (std::sin(s) + std::cos(s) / s) *
                     (std::sin(kr) - p.kappa * (std::sin(kr) / kr - std::cos(kr)) / damping);
  const double rhs = (std::sin(s) / s - std::cos(s)) *
                     (-p.kappa * (std::sin(kr) + std::cos(kr) / kr) / damping + std::cos(kr));
  return lhs - rhs;
}

double radial_energy(const RadialSolution& sol) {
  const RadialParams& p = sol.params;
  return -p.kappa * p.kappa * unit_ball_volume(p.d) * std::pow(sol.r_star, p.d);
}

MatchCoefficients outer_match_coefficients(const RadialParams& p) {
  check_dimension(p.d);
  check_positive_params(p);
  const Order inner = inner_order(p.d);
  const Order outer = outer_order(p.d);
  const double nu = nu_of(p.d);
  const double kr = p.kappa * p.R;
  const double ar = p.alpha * p.R;

  const double k_value = std::pow(ar, -nu) * bessel_k(inner, ar);
  // Slope condition divided by kappa so both rows share the (kr)^{-nu} factor.
  const double k_slope = (p.alpha / p.kappa) * std::pow(ar, -nu) * bessel_k(outer, ar);

  const double inv_det = -0.5 * kPi * kr;  // 1 / (-2 / (pi kappa R))
  const double lead = std::pow(kr, nu) * inv_det;
  return {lead * (bessel_y(outer, kr) * k_value - bessel_y(inner, kr) * k_slope),
          lead * (-bessel_j(outer, kr) * k_value + bessel_j(inner, kr) * k_slope)};
}

RadialBounds radial_bounds_pair(int d, double alpha, double beta, double r_tilde, double R) {
  if (!(r_tilde > 0.0) || !(r_tilde <= R)) {
    throw DomainError("radial_bounds_pair: need 0 < r_tilde <= R");
  }
  return {radial_minimizer({d, beta, alpha, r_tilde}), radial_minimizer({d, beta, alpha, R})};
}

}  // namespace popdens
