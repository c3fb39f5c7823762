#include "popdens/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "popdens/errors.hpp"

namespace popdens {

namespace {

// Mask nodes with at least one 4-neighbour outside the mask. For a node off
// the mask the nearest mask node is always one of these.
std::vector<Point> mask_frontier(const Grid& g, const NodeMask& mask) {
  std::vector<Point> pts;
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      if (!mask[g.index(i, j)]) continue;
      const bool edge = (i > 0 && !mask[g.index(i - 1, j)]) || (i + 1 < g.n && !mask[g.index(i + 1, j)]) ||
                        (j > 0 && !mask[g.index(i, j - 1)]) || (j + 1 < g.n && !mask[g.index(i, j + 1)]);
      if (edge) pts.push_back(g.point(i, j));
    }
  }
  return pts;
}

double nearest(const std::vector<Point>& pts, Point p) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point& q : pts) best = std::min(best, (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y));
  return std::sqrt(best);
}

double v_minus(const PotentialSpec& spec) { return spec.shape.empty() ? 0.0 : spec.beta * spec.beta; }

}  // namespace

LewyStampacchiaResult lewy_stampacchia_check(const ScalarField& u, const PotentialSpec& spec, double contact_eps) {
  const Grid& g = u.grid;
  const std::vector<double> pot = sample_potential(spec, g);
  const NodeMask contact = contact_set(u, contact_eps);

  // Nodes on either side of the contact boundary.
  NodeMask interface(g.size(), 0);
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      const std::size_t k = g.index(i, j);
      const auto differs = [&](int a, int b) {
        return a >= 0 && b >= 0 && a < g.n && b < g.n && contact[g.index(a, b)] != contact[k];
      };
      if (differs(i - 1, j) || differs(i + 1, j) || differs(i, j - 1) || differs(i, j + 1)) interface[k] = 1;
    }
  }
  const std::vector<Point> front = mask_frontier(g, interface);
  const double margin = 2.0 * g.h - 1e-9 * g.h;

  LewyStampacchiaResult res;
  double min_r = 0.0;
  for (int j = 1; j < g.n - 1; ++j) {
    for (int i = 1; i < g.n - 1; ++i) {
      const std::size_t k = g.index(i, j);
      const double v = pot[k];
      if (pot[g.index(i - 1, j)] != v || pot[g.index(i + 1, j)] != v || pot[g.index(i, j - 1)] != v ||
          pot[g.index(i, j + 1)] != v) {
        continue;
      }
      if (!front.empty() && nearest(front, g.point(i, j)) < margin) continue;
      const double r = discrete_laplacian(u, i, j) - v * u.values[k];
      min_r = std::min(min_r, r);
      const double cap = contact[k] ? std::max(-v, 0.0) : 0.0;
      res.upper = std::max(res.upper, r - cap);
      ++res.nodes_checked;
    }
  }
  res.lower = -min_r;
  return res;
}

DistanceConstants distance_constants(int d, const PotentialSpec& spec) {
  const double vm = v_minus(spec);
  const double vp = spec.alpha * spec.alpha;
  const double p = std::ldexp(1.0, d);
  return {(p * vm + vp) / (2.0 * d), 0.5 * p * vm + std::max(vp, vm) / (d + 1.0)};
}

std::vector<double> distance_to_mask(const Grid& g, const NodeMask& mask) {
  const std::vector<Point> front = mask_frontier(g, mask);
  std::vector<double> dist(g.size(), 0.0);
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      const std::size_t k = g.index(i, j);
      if (!mask[k]) dist[k] = nearest(front, g.point(i, j));
    }
  }
  return dist;
}

DistanceBoundResult distance_bound_check(const ScalarField& u, const PotentialSpec& spec, double contact_eps) {
  const Grid& g = u.grid;
  const NodeMask contact = contact_set(u, contact_eps);
  if (mask_count(contact) == 0) throw DiagnosticsError("distance_bound_check: contact set is empty");
  const std::vector<double> dist = distance_to_mask(g, contact);

  DistanceBoundResult res;
  res.constants = distance_constants(2, spec);
  const double h2 = g.h * g.h;
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      const std::size_t k = g.index(i, j);
      const double d = dist[k];
      // The zero boundary is the domain truncation, not part of the bound.
      if (g.on_boundary(i, j)) continue;
      res.ratio = std::max(res.ratio, (1.0 - u.values[k]) / (res.constants.c1 * d * d + h2));
      if (d > 0.0) {
        const double gx = (u.at(i + 1, j) - u.at(i - 1, j)) / (2.0 * g.h);
        const double gy = (u.at(i, j + 1) - u.at(i, j - 1)) / (2.0 * g.h);
        res.gradient_ratio = std::max(res.gradient_ratio, std::hypot(gx, gy) / (res.constants.c2 * d));
      }
    }
  }
  return res;
}

DecayFit decay_fit(const ScalarField& u, double r_in, double r_out, int d) {
  const Grid& g = u.grid;
  if (!(r_in >= 0.0 && r_in < r_out && r_out < g.T - 2.0 * g.h)) {
    throw DomainError("decay_fit: need 0 <= r_in < r_out < T - 2h");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  std::size_t m = 0;
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      const double r = std::hypot(g.coord(i), g.coord(j));
      if (r < r_in || r > r_out) continue;
      const double v = u.at(i, j);
      if (!(v > 0.0)) {
        throw DiagnosticsError("decay_fit: nonpositive value at r = " + std::to_string(r));
      }
      const double x = -r;
      const double y = std::log(v) + 0.5 * (d - 1) * std::log(r);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      syy += y * y;
      ++m;
    }
  }
  if (m < 3) throw DiagnosticsError("decay_fit: fewer than three nodes in the annulus");
  const double n = static_cast<double>(m);
  const double cxx = sxx - sx * sx / n;
  const double cxy = sxy - sx * sy / n;
  const double cyy = syy - sy * sy / n;
  DecayFit fit;
  fit.slope = cxy / cxx;
  fit.r2 = cyy > 0.0 ? (cxy * cxy) / (cxx * cyy) : 1.0;
  fit.samples = m;
  return fit;
}

double energy_contact_identity(const ScalarField& u, const PotentialSpec& spec, double contact_eps) {
  const std::vector<double> pot = sample_potential(spec, u.grid);
  const double energy = discrete_energy(u, pot);
  const NodeMask contact = contact_set(u, contact_eps);
  double rhs = 0.0;
  for (std::size_t k = 0; k < pot.size(); ++k) {
    if (contact[k]) rhs += pot[k];
  }
  rhs *= u.grid.h * u.grid.h;
  return std::abs(energy - rhs) / std::max(std::abs(energy), 1.0);
}

double interpolate(const ScalarField& u, Point p) {
  const Grid& g = u.grid;
  // Snap to nodes so a point on a grid line does not pick up its neighbour row.
  const auto snap = [&](double f) {
    const double r = std::round(f);
    return std::clamp(std::abs(f - r) < 1e-9 ? r : f, 0.0, static_cast<double>(g.n - 1));
  };
  const double fx = snap(p.x / g.h + g.half);
  const double fy = snap(p.y / g.h + g.half);
  const int i = std::min(static_cast<int>(fx), g.n - 2);
  const int j = std::min(static_cast<int>(fy), g.n - 2);
  const double s = fx - i;
  const double t = fy - j;
  // Nested lerps reproduce constant data exactly.
  const double low = u.at(i, j) + s * (u.at(i + 1, j) - u.at(i, j));
  const double high = u.at(i, j + 1) + s * (u.at(i + 1, j + 1) - u.at(i, j + 1));
  return low + t * (high - low);
}

double quasiconcavity_probe(const ScalarField& u, int n_pairs, std::uint64_t seed) {
  const Grid& g = u.grid;
  if (g.n < 3 || n_pairs <= 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(1, g.n - 2);
  double gap = std::numeric_limits<double>::infinity();
  for (int p = 0; p < n_pairs; ++p) {
    const int i0 = pick(rng), j0 = pick(rng), i1 = pick(rng), j1 = pick(rng);
    const Point a = g.point(i0, j0);
    const Point b = g.point(i1, j1);
    const double floor = std::min(u.at(i0, j0), u.at(i1, j1));
    for (int s = 1; s <= 9; ++s) {
      const double t = 0.1 * s;
      const Point q{t * a.x + (1 - t) * b.x, t * a.y + (1 - t) * b.y};
      gap = std::min(gap, interpolate(u, q) - floor);
    }
  }
  return gap;
}

double positivity_check(const ScalarField& u) {
  const Grid& g = u.grid;
  double m = std::numeric_limits<double>::infinity();
  for (int j = 2; j < g.n - 2; ++j) {
    for (int i = 2; i < g.n - 2; ++i) m = std::min(m, u.at(i, j));
  }
  return std::isfinite(m) ? m : 0.0;
}

double contact_area(const ScalarField& u, double contact_eps) {
  return u.grid.h * u.grid.h * static_cast<double>(mask_count(contact_set(u, contact_eps)));
}

bool contact_in_well(const ScalarField& u, const PotentialSpec& spec, double contact_eps) {
  const Grid& g = u.grid;
  const NodeMask contact = contact_set(u, contact_eps);
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      if (contact[g.index(i, j)] && !spec.shape.contains(g.point(i, j))) return false;
    }
  }
  return true;
}

DiagnosticsReport build_report(const ScalarField& u, const PotentialSpec& spec, const DiagnosticsOptions& opts) {
  const Grid& g = u.grid;
  const double h = g.h;
  DiagnosticsReport rep;
  rep.energy = discrete_energy(u, spec);
  rep.energy_contact_identity_gap = energy_contact_identity(u, spec, opts.contact_eps);

  const LewyStampacchiaResult ls = lewy_stampacchia_check(u, spec, opts.contact_eps);
  rep.lewy_stampacchia_lower = ls.lower;
  rep.lewy_stampacchia_upper = ls.upper;

  const DistanceBoundResult db = distance_bound_check(u, spec, opts.contact_eps);
  rep.distance_bound_max_ratio = db.ratio;
  rep.distance_gradient_max_ratio = db.gradient_ratio;

  rep.decay_r_in = opts.decay_r_in.value_or(std::min(2.0 * spec.R, 0.6 * g.T));
  rep.decay_r_out = opts.decay_r_out.value_or(std::min({4.0 * spec.R, 0.9 * g.T, g.T - 3.0 * g.h}));
  const DecayFit fit = decay_fit(u, rep.decay_r_in, rep.decay_r_out);
  rep.decay_fit_slope = fit.slope;
  rep.decay_fit_r2 = fit.r2;

  rep.contact_area = contact_area(u, opts.contact_eps);
  rep.contact_area_h2 = contact_area(u, h * h);
  rep.contact_in_well = contact_in_well(u, spec, opts.contact_eps);
  rep.quasiconcavity_min_gap = quasiconcavity_probe(u, opts.quasi_pairs, opts.seed);
  rep.positivity_min = positivity_check(u);

  rep.lewy_stampacchia_pass = ls.passes(opts.ls_tol_scale, h);
  rep.distance_bound_pass = db.ratio <= 1.0 + 10.0 * h;
  rep.decay_pass = std::abs(fit.slope - spec.alpha) <= opts.decay_rel_tol * spec.alpha;
  rep.positivity_pass = rep.positivity_min > 0.0;
  rep.identity_pass = rep.energy_contact_identity_gap <= opts.identity_tol;
  return rep;
}

}  // namespace popdens
