#include "rhloc/scenario_io.hpp"

#include <fstream>
#include <stdexcept>

namespace rhloc {

using nlohmann::json;

json positions_to_json(const Positions& positions) {
  json rows = json::array();
  for (Eigen::Index c = 0; c < positions.cols(); ++c) {
    json row = json::array();
    for (Eigen::Index r = 0; r < positions.rows(); ++r) row.push_back(positions(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Positions positions_from_json(const json& rows, int dim) {
  if (!rows.is_array()) throw std::invalid_argument("positions must be an array of rows");
  Positions out(dim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t c = 0; c < rows.size(); ++c) {
    const auto& row = rows[c];
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw std::invalid_argument("position row " + std::to_string(c) + " does not have " +
                                  std::to_string(dim) + " coordinates");
    }
    for (int r = 0; r < dim; ++r) out(r, static_cast<Eigen::Index>(c)) = row[r].get<double>();
  }
  return out;
}

json scenario_to_json(const NetworkScenario& s) {
  json doc;
  doc["format"] = "rhloc-scenario";
  doc["version"] = 1;
  doc["dimension"] = s.dim;
  doc["sensors"] = positions_to_json(s.truth);
  doc["anchors"] = positions_to_json(s.anchors);
  json edges = json::array();
  for (const auto& e : s.edges) {
    edges.push_back({{"i", e.i}, {"j", e.j}, {"range", e.range}, {"radius", e.radius}});
  }
  doc["edges"] = std::move(edges);
  json links = json::array();
  for (const auto& l : s.links) {
    links.push_back(
        {{"node", l.node}, {"anchor", l.anchor}, {"range", l.range}, {"radius", l.radius}});
  }
  doc["anchor_links"] = std::move(links);
  return doc;
}

NetworkScenario scenario_from_json(const json& doc) {
  if (doc.value("format", std::string{}) != "rhloc-scenario") {
    throw std::invalid_argument("not a scenario document");
  }
  if (doc.value("version", 0) != 1) throw std::invalid_argument("unsupported scenario version");
  NetworkScenario s;
  s.dim = doc.at("dimension").get<int>();
  if (s.dim < 1 || s.dim > kMaxDim) throw std::invalid_argument("unsupported dimension");
  s.truth = positions_from_json(doc.at("sensors"), s.dim);
  s.anchors = positions_from_json(doc.at("anchors"), s.dim);
  for (const auto& e : doc.at("edges")) {
    s.edges.push_back({e.at("i").get<int>(), e.at("j").get<int>(), e.at("range").get<double>(),
                       e.at("radius").get<double>()});
  }
  for (const auto& l : doc.at("anchor_links")) {
    s.links.push_back({l.at("node").get<int>(), l.at("anchor").get<int>(),
                       l.at("range").get<double>(), l.at("radius").get<double>()});
  }
  normalize(s);
  validate(s);
  return s;
}

void write_scenario(const std::filesystem::path& path, const NetworkScenario& scenario,
                    const json& metadata) {
  json doc = scenario_to_json(scenario);
  if (!metadata.empty()) doc["metadata"] = metadata;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

NetworkScenario read_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed scenario " + path.string() + ": " + e.what());
  }
  return scenario_from_json(doc);
}

}  // namespace rhloc
