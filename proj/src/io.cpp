#include "popdens/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "popdens/errors.hpp"

namespace popdens {

namespace {

std::string fmt12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path.string(), "cannot open for writing");
  return out;
}

}  // namespace

void write_field_csv(std::ostream& out, const ScalarField& u) {
  const Grid& g = u.grid;
  out << "x,y,u\n";
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      out << fmt12(g.coord(i)) << ',' << fmt12(g.coord(j)) << ',' << fmt12(u.at(i, j)) << '\n';
    }
  }
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& u) {
  std::ofstream out = open_out(path);
  write_field_csv(out, u);
}

ScalarField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "x,y,u") throw ConfigError("field", "expected header 'x,y,u'");
  std::vector<double> xs, ys, us;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    double v[3];
    char comma1 = 0, comma2 = 0;
    if (!(row >> v[0] >> comma1 >> v[1] >> comma2 >> v[2]) || comma1 != ',' || comma2 != ',') {
      throw ConfigError("field", "malformed row at line " + std::to_string(line_no));
    }
    xs.push_back(v[0]);
    ys.push_back(v[1]);
    us.push_back(v[2]);
  }
  const auto count = xs.size();
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
  if (n < 3 || static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != count || n % 2 == 0) {
    throw ConfigError("field", "row count " + std::to_string(count) + " is not an odd square >= 9");
  }
  const double h = xs[1] - xs[0];
  const int half = (n - 1) / 2;
  if (!(h > 0.0)) throw ConfigError("field", "x must increase along a row");
  const Grid g{half * h, h, half, n};
  ScalarField u = ScalarField::zeros(g);
  const double tol = 1e-9 * std::max(1.0, g.T);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t k = g.index(i, j);
      if (std::abs(xs[k] - g.coord(i)) > tol || std::abs(ys[k] - g.coord(j)) > tol) {
        throw ConfigError("field", "node " + std::to_string(k) + " is off the uniform symmetric grid");
      }
      u.values[k] = us[k];
    }
  }
  return u;
}

ScalarField read_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open field file");
  return read_field_csv(in);
}

void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history) {
  out << "iter,energy,sup_change,contact_area,linear_iters\n";
  for (const IterationRecord& r : history) {
    out << r.iter << ',' << fmt12(r.energy) << ',' << fmt12(r.sup_change) << ',' << fmt12(r.contact_area) << ','
        << r.linear_iters << '\n';
  }
}

void write_history_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& history) {
  std::ofstream out = open_out(path);
  write_history_csv(out, history);
}

nlohmann::json report_to_json(const DiagnosticsReport& r) {
  return {
      {"energy", r.energy},
      {"energy_contact_identity_gap", r.energy_contact_identity_gap},
      {"lewy_stampacchia_max_violation", {r.lewy_stampacchia_lower, r.lewy_stampacchia_upper}},
      {"distance_bound_max_ratio", r.distance_bound_max_ratio},
      {"distance_gradient_max_ratio", r.distance_gradient_max_ratio},
      {"decay_fit_slope", r.decay_fit_slope},
      {"decay_fit_r2", r.decay_fit_r2},
      {"decay_annulus", {r.decay_r_in, r.decay_r_out}},
      {"contact_area", r.contact_area},
      {"contact_area_eps_h2", r.contact_area_h2},
      {"contact_in_well", r.contact_in_well},
      {"quasiconcavity_min_gap", r.quasiconcavity_min_gap},
      {"positivity_min", r.positivity_min},
      {"pass",
       {{"lewy_stampacchia", r.lewy_stampacchia_pass},
        {"distance_bound", r.distance_bound_pass},
        {"decay_fit", r.decay_pass},
        {"positivity", r.positivity_pass},
        {"contact_in_well", r.contact_in_well},
        {"energy_contact_identity", r.identity_pass},
        {"all_asserted", r.all_pass()}}},
  };
}

nlohmann::json grid_to_json(const Grid& g) { return {{"T", g.T}, {"h", g.h}, {"half", g.half}, {"n", g.n}}; }

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
}

}  // namespace popdens
