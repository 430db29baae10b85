#include "gaplab/domain_spec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gaplab/oned.hpp"

namespace gaplab {

namespace {

using nlohmann::json;

double require_positive(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw std::invalid_argument(std::string("domain spec needs numeric \"") + key +
                                "\"");
  const double v = j[key].get<double>();
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string("\"") + key + "\" must be positive");
  return v;
}

Domain parse_graph(const json& j) {
  const double L = require_positive(j, "L");
  const double eps = require_positive(j, "epsilon");
  const std::string profile = j.value("profile", std::string("const"));
  std::vector<double> samples;
  if (j.contains("samples")) {
    if (!j["samples"].is_array())
      throw std::invalid_argument("\"samples\" must be an array of numbers");
    for (const auto& v : j["samples"]) {
      if (!v.is_number())
        throw std::invalid_argument("\"samples\" must be an array of numbers");
      samples.push_back(v.get<double>());
    }
  }
  if (profile == "const") {
    if (!samples.empty()) return GraphDomain(L, eps, std::move(samples));
    return GraphDomain::constant(L, eps, 129);
  }
  if (profile == "sin2") {
    if (!samples.empty()) return GraphDomain(L, eps, std::move(samples));
    return GraphDomain::sin2(L, eps, 1025);
  }
  if (profile == "weight_file") {
    if (samples.empty() && j.contains("path")) {
      std::ifstream in(j["path"].get<std::string>());
      if (!in) throw std::invalid_argument("cannot open profile CSV " +
                                           j["path"].get<std::string>());
      Profile1D p = Profile1D::from_csv(in);
      if (std::abs(p.R - L) > 1e-9 * L)
        throw std::invalid_argument("profile CSV does not span [0, L]");
      samples = p.samples;
    }
    if (samples.empty())
      throw std::invalid_argument(
          "profile weight_file needs \"samples\" or \"path\"");
    return GraphDomain(L, eps, std::move(samples));
  }
  throw std::invalid_argument("unknown graph profile \"" + profile + "\"");
}

}  // namespace

Domain parse_domain(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("domain spec is not valid JSON: ") +
                                e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw std::invalid_argument("domain spec needs a string \"type\"");
  const std::string type = j["type"].get<std::string>();

  if (type == "polygon") {
    if (!j.contains("vertices") || !j["vertices"].is_array())
      throw std::invalid_argument("polygon spec needs \"vertices\"");
    std::vector<Vec2> verts;
    for (const auto& v : j["vertices"]) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw std::invalid_argument("polygon vertices must be [x, y] pairs");
      verts.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    return Polygon(std::move(verts));
  }
  if (type == "rectangle") {
    const double a = require_positive(j, "a");
    const double b = require_positive(j, "b");
    return Polygon::rectangle(a, b);
  }
  if (type == "triangle_moduli") {
    if (!j.contains("p") || !j["p"].is_array() || j["p"].size() != 2)
      throw std::invalid_argument("triangle_moduli spec needs \"p\": [x, y]");
    const Vec2 p{j["p"][0].get<double>(), j["p"][1].get<double>()};
    if (!in_moduli_region(p))
      throw std::invalid_argument("apex is outside the moduli region");
    return make_triangle_from_moduli(p);
  }
  if (type == "graph") return parse_graph(j);
  throw std::invalid_argument("unknown domain type \"" + type + "\"");
}

Domain load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open domain spec " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_domain(buf.str());
}

double domain_diameter(const Domain& d) {
  return std::visit([](const auto& g) { return g.diameter(); }, d);
}

std::string domain_kind(const Domain& d) {
  if (std::holds_alternative<Polygon>(d)) return "polygon";
  if (std::holds_alternative<Simplex>(d)) return "simplex";
  return "graph";
}

TriMesh initial_mesh(const Domain& d, double target_h) {
  if (!(target_h > 0.0)) throw std::invalid_argument("target_h must be positive");
  if (const auto* p = std::get_if<Polygon>(&d)) return triangulate(*p, target_h);
  if (const auto* s = std::get_if<Simplex>(&d))
    return triangulate(s->to_polygon(), target_h);
  const auto& g = std::get<GraphDomain>(d);
  const int nx = std::max(2, static_cast<int>(std::ceil(g.length() / target_h)));
  const double top = g.epsilon() * g.max_width();
  const int ny = std::max(2, static_cast<int>(std::ceil(top / target_h)));
  return mesh_graph_domain(g, nx, ny);
}

}  // namespace gaplab
