#pragma once

// Exact radially symmetric minimizer for the two-level potential
//   V = -kappa^2 on B_R,   V = alpha^2 outside B_R,
// built from Bessel functions:
//   u = 1                                          on [0, R*]
//   u = a (kr)^{-nu} J_nu(kr) + b (kr)^{-nu} Y_nu(kr)   on (R*, R)
//   u = c (ar)^{-nu} K_nu(ar)                      on [R, inf)
// with nu = (d-2)/2 and R* the largest root of the C^1 matching condition.

#include <utility>

namespace popdens {

struct RadialParams {
  int d = 2;
  double kappa = 0.0;  ///< well strength, V = -kappa^2 inside B_R
  double alpha = 0.0;  ///< exterior strength, V = alpha^2 outside B_R
  double R = 0.0;      ///< well radius
};

struct RadialSolution {
  RadialParams params;
  double r_star = 0.0;  ///< contact radius, {u = 1} = closed ball of radius r_star
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  int bracket_count = 0;  ///< sign changes of the matching residual found on (0, R)
};

/// Lower and upper radial comparison profiles for a well G with
/// B_{r_tilde} in G in B_R.
struct RadialBounds {
  RadialSolution lower;
  RadialSolution upper;
};

/// (j_{(d-2)/2,1} / r)^2, the first Dirichlet eigenvalue of -Laplace on B_r.
double fundamental_tone(int d, double r);

/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

/// Throws AdmissibilityError unless kappa^2 > fundamental_tone(d, R), and
/// DomainError for unsupported d or nonpositive parameters.
void check_admissible(const RadialParams& params);

/// Matching residual at candidate contact radius rho in (0, R); its zeros are
/// the radii where the middle branch has zero slope and joins the decaying
/// exterior branch in C^1.
double rstar_residual(const RadialParams& params, double rho);

struct RstarSearch {
  double r_star = 0.0;
  int bracket_count = 0;
};

/// Scans rstar_residual on a uniform grid of (0, R), bisects every sign change
/// and returns the largest root. Throws NoRootError when none is found.
RstarSearch find_rstar(const RadialParams& params);
double solve_rstar(const RadialParams& params);

RadialSolution radial_minimizer(const RadialParams& params);

double eval_radial(const RadialSolution& sol, double r);
/// du/dr, from the derivative recurrences of J, Y, K.
double eval_radial_derivative(const RadialSolution& sol, double r);

/// Middle (Bessel J/Y) branch evaluated at any r > 0, ignoring the piecewise
/// split. Used for matching checks.
double eval_middle_branch(const RadialSolution& sol, double r);
double eval_middle_branch_derivative(const RadialSolution& sol, double r);
/// Exterior (Bessel K) branch evaluated at any r > 0.
double eval_outer_branch(const RadialSolution& sol, double r);
double eval_outer_branch_derivative(const RadialSolution& sol, double r);

/// d = 3 closed form in sin, cos and exp with coefficients computed directly
/// from r_star. Throws DomainError unless sol.params.d == 3.
double eval_radial_3d_elementary(const RadialSolution& sol, double r);

/// d = 3 matching residual written with sin, cos and exp only; vanishes at the
/// same radii as rstar_residual.
double rstar_residual_3d_elementary(const RadialParams& params, double rho);

/// F(u) = -kappa^2 * omega_d * r_star^d.
double radial_energy(const RadialSolution& sol);

/// Coefficients (a0, b0) of the middle branch that joins the unit-normalized
/// exterior branch (alpha r)^{-nu} K_nu(alpha r) in C^1 at r = R, obtained from
/// the explicit 2x2 inverse whose determinant is -2/(pi kappa R).
struct MatchCoefficients {
  double a0 = 0.0;
  double b0 = 0.0;
};
MatchCoefficients outer_match_coefficients(const RadialParams& params);

/// lower: well radius r_tilde; upper: well radius R; both with kappa = beta.
RadialBounds radial_bounds_pair(int d, double alpha, double beta, double r_tilde, double R);

}  // namespace popdens
