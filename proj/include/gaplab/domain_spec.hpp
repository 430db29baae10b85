#pragma once

#include <string>
#include <variant>

#include "gaplab/geometry.hpp"
#include "gaplab/mesh.hpp"

namespace gaplab {

/// A solvable 2D domain: polygon, triangle (simplex), or thin graph domain.
using Domain = std::variant<Polygon, Simplex, GraphDomain>;

/// Parses a JSON domain spec. Accepted forms:
///   {"type":"polygon","vertices":[[x,y],...]}
///   {"type":"rectangle","a":..,"b":..}
///   {"type":"triangle_moduli","p":[x,y]}
///   {"type":"graph","L":..,"epsilon":..,"profile":"const|sin2|weight_file",
///    "samples":[...]}
/// For profile const/sin2 the sample array is optional (a dense default is
/// generated); weight_file requires "samples" inline or a "path" to a CSV of
/// (x, value) rows spanning [0, L].
Domain parse_domain(const std::string& json_text);

/// Reads the file at `path` and parses it as a domain spec.
Domain load_domain(const std::string& path);

double domain_diameter(const Domain& d);
std::string domain_kind(const Domain& d);

/// Builds a starting mesh with element size about target_h. Graph domains get
/// a mapped structured grid sized so cells track the thin direction.
TriMesh initial_mesh(const Domain& d, double target_h);

}  // namespace gaplab
