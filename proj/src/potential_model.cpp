#include "popdens/potential_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "popdens/config.hpp"
#include "popdens/errors.hpp"
#include "popdens/radial_solutions.hpp"

namespace popdens {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double ellipse_level(const Ellipse& e, Point p) {
  const double u = (p.x - e.center.x) / e.semi_x;
  const double v = (p.y - e.center.y) / e.semi_y;
  return u * u + v * v;
}

double dist2(Point p, Point q) { return (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y); }

std::string format_point(Point p) {
  std::ostringstream s;
  s.precision(12);
  s << "(" << p.x << ", " << p.y << ")";
  return s.str();
}

void sample_segment(Point a, Point b, int n, std::vector<Point>& out) {
  for (int k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / n;
    out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
  }
}

bool polygon_is_bounded(const WellShape& shape) {
  constexpr double kFar = 1e6;
  for (int k = 0; k < 360; ++k) {
    const double th = 2.0 * kPi * k / 360.0;
    if (shape.contains({kFar * std::cos(th), kFar * std::sin(th)})) return false;
  }
  return true;
}

}  // namespace

bool WellShape::contains(Point p) const {
  return std::visit(
      Overloaded{
          [&](const Disc& d) { return dist2(p, d.center) <= d.radius * d.radius; },
          [&](const Ellipse& e) { return ellipse_level(e, p) <= 1.0; },
          [&](const Rectangle& r) {
            return p.x >= r.lower.x && p.x <= r.upper.x && p.y >= r.lower.y && p.y <= r.upper.y;
          },
          [&](const HalfPlanePolygon& poly) {
            return std::all_of(poly.half_planes.begin(), poly.half_planes.end(),
                               [&](const HalfPlane& h) { return h.a * p.x + h.b * p.y <= h.c; });
          },
          [&](const Difference& d) { return d.outer->contains(p) && !d.hole->contains_interior(p); },
          [](const NoWell&) { return false; },
      },
      shape_);
}

bool WellShape::contains_interior(Point p) const {
  return std::visit(
      Overloaded{
          [&](const Disc& d) { return dist2(p, d.center) < d.radius * d.radius; },
          [&](const Ellipse& e) { return ellipse_level(e, p) < 1.0; },
          [&](const Rectangle& r) {
            return p.x > r.lower.x && p.x < r.upper.x && p.y > r.lower.y && p.y < r.upper.y;
          },
          [&](const HalfPlanePolygon& poly) {
            return std::all_of(poly.half_planes.begin(), poly.half_planes.end(),
                               [&](const HalfPlane& h) { return h.a * p.x + h.b * p.y < h.c; });
          },
          [&](const Difference& d) { return d.outer->contains_interior(p) && !d.hole->contains(p); },
          [](const NoWell&) { return false; },
      },
      shape_);
}

std::vector<Point> WellShape::boundary_samples(int per_piece) const {
  std::vector<Point> out;
  std::visit(
      Overloaded{
          [&](const Disc& d) {
            for (int k = 0; k < per_piece; ++k) {
              const double th = 2.0 * kPi * k / per_piece;
              out.push_back({d.center.x + d.radius * std::cos(th), d.center.y + d.radius * std::sin(th)});
            }
          },
          [&](const Ellipse& e) {
            for (int k = 0; k < per_piece; ++k) {
              const double th = 2.0 * kPi * k / per_piece;
              out.push_back({e.center.x + e.semi_x * std::cos(th), e.center.y + e.semi_y * std::sin(th)});
            }
          },
          [&](const Rectangle& r) {
            const Point corners[4] = {
                r.lower, {r.upper.x, r.lower.y}, r.upper, {r.lower.x, r.upper.y}};
            for (int k = 0; k < 4; ++k) sample_segment(corners[k], corners[(k + 1) % 4], per_piece, out);
          },
          [&](const HalfPlanePolygon& poly) {
            const auto v = polygon_vertices(poly);
            for (std::size_t k = 0; k < v.size(); ++k) {
              sample_segment(v[k], v[(k + 1) % v.size()], per_piece, out);
            }
          },
          [&](const Difference& d) {
            for (const Point& p : d.outer->boundary_samples(per_piece)) {
              if (!d.hole->contains_interior(p)) out.push_back(p);
            }
            for (const Point& p : d.hole->boundary_samples(per_piece)) {
              if (d.outer->contains(p)) out.push_back(p);
            }
          },
          [](const NoWell&) {},
      },
      shape_);
  return out;
}

std::string WellShape::kind() const {
  return std::visit(
      Overloaded{
          [](const Disc&) -> std::string { return "disc"; },
          [](const Ellipse&) -> std::string { return "ellipse"; },
          [](const Rectangle&) -> std::string { return "rectangle"; },
          [](const HalfPlanePolygon&) -> std::string { return "polygon"; },
          [](const Difference& d) -> std::string {
            const bool discs = std::holds_alternative<Disc>(d.outer->variant()) &&
                               std::holds_alternative<Disc>(d.hole->variant());
            return discs ? "punctured_disc" : "difference";
          },
          [](const NoWell&) -> std::string { return "none"; },
      },
      shape_);
}

std::vector<Point> polygon_vertices(const HalfPlanePolygon& polygon) {
  const auto& hp = polygon.half_planes;
  std::vector<Point> vertices;
  for (std::size_t i = 0; i < hp.size(); ++i) {
    for (std::size_t j = i + 1; j < hp.size(); ++j) {
      const double det = hp[i].a * hp[j].b - hp[j].a * hp[i].b;
      if (std::abs(det) < 1e-14) continue;
      const Point p{(hp[i].c * hp[j].b - hp[j].c * hp[i].b) / det,
                    (hp[i].a * hp[j].c - hp[j].a * hp[i].c) / det};
      const double scale = 1.0 + std::abs(p.x) + std::abs(p.y);
      const bool feasible = std::all_of(hp.begin(), hp.end(), [&](const HalfPlane& h) {
        return h.a * p.x + h.b * p.y <= h.c + 1e-12 * scale;
      });
      const bool duplicate = std::any_of(vertices.begin(), vertices.end(), [&](Point q) {
        return dist2(p, q) < 1e-20 * scale * scale;
      });
      if (feasible && !duplicate) vertices.push_back(p);
    }
  }
  if (vertices.empty()) return vertices;
  Point centroid;
  for (Point p : vertices) {
    centroid.x += p.x / static_cast<double>(vertices.size());
    centroid.y += p.y / static_cast<double>(vertices.size());
  }
  std::sort(vertices.begin(), vertices.end(), [&](Point p, Point q) {
    return std::atan2(p.y - centroid.y, p.x - centroid.x) < std::atan2(q.y - centroid.y, q.x - centroid.x);
  });
  return vertices;
}

double potential_value(const PotentialSpec& spec, Point x) {
  return spec.shape.contains(x) ? -spec.beta * spec.beta : spec.alpha * spec.alpha;
}

std::vector<Violation> validate_spec(const PotentialSpec& spec) {
  std::vector<Violation> out;
  if (!(spec.alpha > 0.0) || !(spec.beta > 0.0) || !(spec.R > 0.0) || !(spec.r_tilde > 0.0)) {
    out.push_back({"parameters", "alpha, beta, R_bound and r_tilde must all be positive"});
    return out;
  }
  if (spec.shape.empty()) {
    out.push_back({"shape", "well is empty"});
    return out;
  }
  if (std::holds_alternative<HalfPlanePolygon>(spec.shape.variant())) {
    const auto& poly = std::get<HalfPlanePolygon>(spec.shape.variant());
    if (!polygon_is_bounded(spec.shape) || polygon_vertices(poly).size() < 3) {
      out.push_back({"shape", "half-plane polygon is unbounded or degenerate"});
      return out;
    }
  }

  const double tone = fundamental_tone(2, spec.r_tilde);
  if (!(spec.beta * spec.beta > tone)) {
    std::ostringstream s;
    s << "beta^2 = " << spec.beta * spec.beta << " does not exceed lambda*(B_r_tilde) = " << tone;
    out.push_back({"trapping", s.str()});
  }

  constexpr int kSamples = 2880;
  const double inner = spec.r_tilde * (1.0 - 1e-12);
  for (int k = 0; k < kSamples; ++k) {
    const double th = 2.0 * kPi * k / kSamples;
    const Point p{inner * std::cos(th), inner * std::sin(th)};
    if (!spec.shape.contains(p)) {
      out.push_back({"inner_disc", "point " + format_point(p) + " of B_r_tilde lies outside G"});
      break;
    }
  }
  const auto boundary = spec.shape.boundary_samples(kSamples);
  const double hole_limit = spec.r_tilde * (1.0 - 1e-9);
  for (Point p : boundary) {
    if (std::hypot(p.x, p.y) < hole_limit) {
      out.push_back({"inner_disc", "boundary point " + format_point(p) + " of G lies inside B_r_tilde"});
      break;
    }
  }
  const double outer = spec.R * (1.0 + 1e-12);
  Point worst{};
  double worst_norm = -1.0;
  for (Point p : boundary) {
    const double n = std::hypot(p.x, p.y);
    if (n > worst_norm) {
      worst_norm = n;
      worst = p;
    }
  }
  if (worst_norm > outer) {
    std::ostringstream s;
    s.precision(12);
    s << "G is not contained in B_R: boundary point " << format_point(worst) << " has |x| = " << worst_norm
      << " > R = " << spec.R;
    out.push_back({"outer_disc", s.str()});
  }
  return out;
}

namespace {

Point read_center(const KeyValues& kv, const std::string& prefix) {
  return {get_double(kv, prefix + "center_x", 0.0), get_double(kv, prefix + "center_y", 0.0)};
}

double require_positive(const KeyValues& kv, const std::string& key) {
  const double v = require_double(kv, key);
  if (!(v > 0.0)) throw ConfigError(key, "must be positive");
  return v;
}

std::vector<HalfPlane> parse_half_planes(const std::string& key, const std::string& text) {
  std::vector<HalfPlane> out;
  std::istringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    if (group.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream nums(group);
    HalfPlane h;
    std::string extra;
    if (!(nums >> h.a >> h.b >> h.c) || (nums >> extra)) {
      throw ConfigError(key, "each half-plane must be three numbers `a b c` meaning a*x + b*y <= c");
    }
    out.push_back(h);
  }
  if (out.size() < 3) throw ConfigError(key, "a bounded polygon needs at least three half-planes");
  return out;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

PotentialSpec potential_from_config(const std::map<std::string, std::string>& kv) {
  PotentialSpec spec;
  spec.alpha = require_positive(kv, "alpha");
  spec.beta = require_positive(kv, "beta");
  spec.r_tilde = require_positive(kv, "r_tilde");
  spec.R = require_positive(kv, "R_bound");

  const auto kind = get_string(kv, "shape.kind");
  if (!kind) throw ConfigError("shape.kind", "missing required key");
  if (*kind == "disc") {
    spec.shape = WellShape::disc(read_center(kv, "shape."), require_positive(kv, "shape.radius"));
  } else if (*kind == "ellipse") {
    spec.shape = Ellipse{read_center(kv, "shape."), require_positive(kv, "shape.semi_x"),
                         require_positive(kv, "shape.semi_y")};
  } else if (*kind == "rectangle") {
    const Point lo{require_double(kv, "shape.x_min"), require_double(kv, "shape.y_min")};
    const Point hi{require_double(kv, "shape.x_max"), require_double(kv, "shape.y_max")};
    if (!(lo.x < hi.x)) throw ConfigError("shape.x_max", "must exceed shape.x_min");
    if (!(lo.y < hi.y)) throw ConfigError("shape.y_max", "must exceed shape.y_min");
    spec.shape = WellShape::rectangle(lo, hi);
  } else if (*kind == "polygon") {
    const auto text = get_string(kv, "shape.half_planes");
    if (!text) throw ConfigError("shape.half_planes", "missing required key");
    spec.shape = WellShape::polygon(parse_half_planes("shape.half_planes", *text));
  } else if (*kind == "punctured_disc") {
    spec.shape = WellShape::difference(
        WellShape::disc(read_center(kv, "shape."), require_positive(kv, "shape.radius")),
        WellShape::disc(read_center(kv, "shape.hole_"), require_positive(kv, "shape.hole_radius")));
  } else if (*kind == "none") {
    spec.shape = WellShape{};
  } else {
    throw ConfigError("shape.kind", "unknown shape '" + *kind +
                                        "' (expected disc, ellipse, rectangle, polygon, punctured_disc, none)");
  }
  return spec;
}

std::map<std::string, std::string> potential_to_config(const PotentialSpec& spec) {
  std::map<std::string, std::string> kv{{"alpha", num(spec.alpha)},
                                        {"beta", num(spec.beta)},
                                        {"r_tilde", num(spec.r_tilde)},
                                        {"R_bound", num(spec.R)},
                                        {"shape.kind", spec.shape.kind()}};
  std::visit(Overloaded{
                 [&](const Disc& d) {
                   kv["shape.radius"] = num(d.radius);
                   kv["shape.center_x"] = num(d.center.x);
                   kv["shape.center_y"] = num(d.center.y);
                 },
                 [&](const Ellipse& e) {
                   kv["shape.semi_x"] = num(e.semi_x);
                   kv["shape.semi_y"] = num(e.semi_y);
                   kv["shape.center_x"] = num(e.center.x);
                   kv["shape.center_y"] = num(e.center.y);
                 },
                 [&](const Rectangle& r) {
                   kv["shape.x_min"] = num(r.lower.x);
                   kv["shape.y_min"] = num(r.lower.y);
                   kv["shape.x_max"] = num(r.upper.x);
                   kv["shape.y_max"] = num(r.upper.y);
                 },
                 [&](const HalfPlanePolygon& p) {
                   std::string text;
                   for (const HalfPlane& h : p.half_planes) {
                     if (!text.empty()) text += "; ";
                     text += num(h.a) + " " + num(h.b) + " " + num(h.c);
                   }
                   kv["shape.half_planes"] = text;
                 },
                 [&](const Difference& d) {
                   const auto* outer = std::get_if<Disc>(&d.outer->variant());
                   const auto* hole = std::get_if<Disc>(&d.hole->variant());
                   if (outer == nullptr || hole == nullptr) {
                     throw ConfigError("shape.kind", "only disc-minus-disc differences are expressible");
                   }
                   kv["shape.radius"] = num(outer->radius);
                   kv["shape.center_x"] = num(outer->center.x);
                   kv["shape.center_y"] = num(outer->center.y);
                   kv["shape.hole_radius"] = num(hole->radius);
                   kv["shape.hole_center_x"] = num(hole->center.x);
                   kv["shape.hole_center_y"] = num(hole->center.y);
                 },
                 [](const NoWell&) {},
             },
             spec.shape.variant());
  return kv;
}

}  // namespace popdens
