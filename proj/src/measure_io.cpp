#include "vectorgas/measure_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace vectorgas {

namespace {

using nlohmann::json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("measure_io: cannot open " + path);
  out << text;
  if (!out) throw std::invalid_argument("measure_io: write failed on " + path);
}

void write_sidecar(const std::string& path, const json& meta) {
  write_text(path + ".json", meta.dump(2) + "\n");
}

std::string csv_table(const std::vector<double>& points,
                      const std::vector<double>& weights) {
  std::ostringstream csv;
  csv << "point,weight\n";
  for (std::size_t i = 0; i < points.size(); ++i)
    csv << fmt(points[i]) << ',' << fmt(weights[i]) << '\n';
  return csv.str();
}

std::string line_domain(double lo, double hi) {
  if (lo >= -1e-12) return "R+";
  if (hi <= 1e-12) return "R-";
  return "R";
}

std::vector<double> parse_row(const std::string& line, const std::string& path) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t comma = line.find(',', pos);
    const std::string field =
        line.substr(pos, comma == std::string::npos ? comma : comma - pos);
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
      throw std::invalid_argument("measure_io: bad number in " + path);
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.size() != 2)
    throw std::invalid_argument("measure_io: expected two columns in " + path);
  return out;
}

// rows of "point,weight" after a verbatim header line
void read_csv(const std::string& path, std::vector<double>* points,
              std::vector<double>* weights) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("measure_io: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("measure_io: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "point,weight")
    throw std::invalid_argument("measure_io: unexpected header in " + path);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<double> row = parse_row(line, path);
    points->push_back(row[0]);
    weights->push_back(row[1]);
  }
  if (points->empty())
    throw std::invalid_argument("measure_io: no data rows in " + path);
}

json read_sidecar(const std::string& path) {
  std::ifstream in(path + ".json", std::ios::binary);
  if (!in)
    throw std::invalid_argument("measure_io: missing sidecar " + path + ".json");
  json meta;
  try {
    in >> meta;
  } catch (const json::exception& e) {
    throw std::invalid_argument("measure_io: bad sidecar for " + path + ": " +
                                e.what());
  }
  return meta;
}

}  // namespace

// The table is always "point,weight"; the sidecar carries mass and domain
// plus whatever the shape needs to round-trip exactly (cell edges for grid
// measures, angles metadata for sphere measures).
void write_measure(const std::string& path, const GridMeasure& m) {
  std::vector<double> points(m.size()), weights(m.size());
  for (int i = 0; i < m.size(); ++i) {
    points[i] = m.point(i);
    weights[i] = m.weight(i);
  }
  write_text(path, csv_table(points, weights));
  write_sidecar(path, json{{"type", "grid"},
                           {"mass", m.mass()},
                           {"domain", line_domain(m.left_edge(0),
                                                  m.right_edge(m.size() - 1))},
                           {"edges", m.edges()}});
}

void write_measure(const std::string& path, const EmpiricalMeasure& m) {
  std::vector<double> weights(m.size(), m.atom_mass());
  write_text(path, csv_table(m.atoms(), weights));
  double lo = m.atom(0), hi = m.atom(0);
  for (double x : m.atoms()) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  write_sidecar(path, json{{"type", "empirical"},
                           {"mass", m.mass()},
                           {"domain", line_domain(lo, hi)},
                           {"atom_mass", m.atom_mass()}});
}

void write_measure(const std::string& path, const SphereMeasure& m) {
  write_text(path, csv_table(m.angles(), m.weights()));
  json meta{{"type", "sphere"},
            {"mass", m.mass()},
            {"domain", "sphere"},
            {"mass_at_infinity", m.mass_at_infinity()}};
  if (m.has_cells()) meta["edge_angles"] = m.edge_angles();
  write_sidecar(path, meta);
}

void write_measure(const std::string& path, const MeasureFile& m) {
  std::visit([&](const auto& inner) { write_measure(path, inner); }, m);
}

MeasureFile read_measure(const std::string& path) {
  const json meta = read_sidecar(path);
  const std::string type = meta.value("type", "");
  std::vector<double> points, weights;
  read_csv(path, &points, &weights);

  if (type == "grid") {
    if (!meta.contains("edges"))
      throw std::invalid_argument("measure_io: grid sidecar lacks edges for " +
                                  path);
    std::vector<double> edges;
    try {
      edges = meta.at("edges").get<std::vector<double>>();
    } catch (const json::exception&) {
      throw std::invalid_argument("measure_io: bad edges in sidecar of " + path);
    }
    if (edges.size() != points.size() + 1)
      throw std::invalid_argument("measure_io: edge count mismatch in " + path);
    return GridMeasure(std::move(edges), std::move(weights));
  }
  if (type == "empirical") {
    for (double w : weights)
      if (w != weights[0])
        throw std::invalid_argument("measure_io: unequal atom masses in " + path);
    return EmpiricalMeasure(std::move(points), weights[0]);
  }
  if (type == "sphere") {
    std::vector<double> edge_angles;
    if (meta.contains("edge_angles")) {
      try {
        edge_angles = meta.at("edge_angles").get<std::vector<double>>();
      } catch (const json::exception&) {
        throw std::invalid_argument("measure_io: bad edge_angles in sidecar of " +
                                    path);
      }
    }
    return SphereMeasure(std::move(points), std::move(weights),
                         meta.value("mass_at_infinity", 0.0),
                         std::move(edge_angles));
  }
  throw std::invalid_argument("measure_io: unknown measure type in sidecar of " +
                              path);
}

}  // namespace vectorgas
