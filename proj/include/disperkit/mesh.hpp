#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "disperkit/material.hpp"
#include "disperkit/quadrature.hpp"

namespace disperkit {

enum class ElementKind { LineGLL, Quad9 };

struct Element {
  ElementKind kind;
  std::vector<int> nodes;  // tensor order; quad9: 3*b + a with a along y-ish axis
  int material = 0;
};

// Cross-section discretization in normalized (y, z) coordinates.
struct CrossSectionMesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<Element> elements;
  std::vector<Material> materials;

  int dof_count() const { return 3 * static_cast<int>(nodes.size()); }

  void validate() const {
    int nn = static_cast<int>(nodes.size());
    for (size_t e = 0; e < elements.size(); ++e) {
      const Element& el = elements[e];
      if (el.kind == ElementKind::Quad9 && el.nodes.size() != 9)
        throw std::invalid_argument("mesh: quad9 element " + std::to_string(e) +
                                    " must have 9 nodes");
      if (el.kind == ElementKind::LineGLL && el.nodes.size() < 2)
        throw std::invalid_argument("mesh: line element " + std::to_string(e) +
                                    " must have at least 2 nodes");
      for (int id : el.nodes)
        if (id < 0 || id >= nn)
          throw std::invalid_argument("mesh: element " + std::to_string(e) +
                                      " references invalid node " + std::to_string(id));
      if (el.material < 0 || el.material >= static_cast<int>(materials.size()))
        throw std::invalid_argument("mesh: element " + std::to_string(e) +
                                    " references invalid material " +
                                    std::to_string(el.material));
    }
    // duplicate-node scan via lexicographic sort
    std::vector<int> order(nn);
    for (int i = 0; i < nn; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (nodes[a].x() != nodes[b].x()) return nodes[a].x() < nodes[b].x();
      return nodes[a].y() < nodes[b].y();
    });
    for (int i = 0; i + 1 < nn; ++i) {
      const auto& p = nodes[order[i]];
      for (int j = i + 1; j < nn && nodes[order[j]].x() - p.x() <= 1e-12; ++j) {
        if ((nodes[order[j]] - p).norm() <= 1e-12)
          throw std::invalid_argument("mesh: duplicate nodes " + std::to_string(order[i]) +
                                      " and " + std::to_string(order[j]));
      }
    }
  }
};

struct Ply {
  double angle_deg = 0.0;
  double thickness = 0.0;  // meters
  int material = 0;        // index into the base material list
};

struct Layup {
  std::vector<Ply> plies;

  void validate() const {
    if (plies.empty()) throw std::invalid_argument("layup: must contain at least one ply");
    for (const Ply& p : plies)
      if (!(p.thickness > 0.0))
        throw std::invalid_argument("layup: ply thicknesses must be positive");
  }

  double total_thickness() const {
    double t = 0.0;
    for (const Ply& p : plies) t += p.thickness;
    return t;
  }
};

// One GLL line element per ply, stacked along z, coordinates normalized by a.
// Ply materials are rotated about the plate normal by the ply angle.
inline CrossSectionMesh build_plate_mesh(const Layup& layup,
                                         const std::vector<Material>& base_materials,
                                         int order, double a) {
  layup.validate();
  if (order < 2) throw std::invalid_argument("build_plate_mesh: order must be >= 2");
  if (!(a > 0.0)) throw std::invalid_argument("build_plate_mesh: a must be positive");
  QuadratureRule gll = gll_rule(order);

  CrossSectionMesh mesh;
  double z = 0.0;
  for (size_t p = 0; p < layup.plies.size(); ++p) {
    const Ply& ply = layup.plies[p];
    const Material& base = base_materials.at(ply.material);
    mesh.materials.push_back({rotate_stiffness(base.stiffness, ply.angle_deg), base.density});

    double t = ply.thickness / a;
    Element el;
    el.kind = ElementKind::LineGLL;
    el.material = static_cast<int>(p);
    for (int j = 0; j <= order; ++j) {
      if (p > 0 && j == 0) {
        el.nodes.push_back(static_cast<int>(mesh.nodes.size()) - 1);  // shared interface
        continue;
      }
      double zj = z + 0.5 * (gll.points(j) + 1.0) * t;
      mesh.nodes.push_back(Eigen::Vector2d(0.0, zj));
      el.nodes.push_back(static_cast<int>(mesh.nodes.size()) - 1);
    }
    mesh.elements.push_back(std::move(el));
    z += t;
  }
  mesh.validate();
  return mesh;
}

// Quad9 annulus with exactly n_circ-fold rotationally symmetric node placement.
// Mid-edge nodes sit on the circles (curved isoparametric edges).
inline CrossSectionMesh build_annulus_mesh(double r_in, double r_out, int n_circ, int n_rad,
                                           const Material& material) {
  if (!(r_in > 0.0 && r_in < r_out))
    throw std::invalid_argument("build_annulus_mesh: need 0 < r_in < r_out");
  if (n_circ < 8 || n_circ % 2 != 0)
    throw std::invalid_argument("build_annulus_mesh: n_circ must be even and >= 8");
  if (n_rad < 1) throw std::invalid_argument("build_annulus_mesh: n_rad must be >= 1");

  CrossSectionMesh mesh;
  mesh.materials.push_back(material);

  int nr = 2 * n_rad + 1;   // radial node lines
  int nc = 2 * n_circ;      // angular node positions
  for (int ir = 0; ir < nr; ++ir) {
    double r = r_in + (r_out - r_in) * ir / (nr - 1.0);
    for (int j = 0; j < nc; ++j) {
      double th = 2.0 * M_PI * j / nc;
      mesh.nodes.push_back(Eigen::Vector2d(r * std::cos(th), r * std::sin(th)));
    }
  }
  auto node_id = [&](int ir, int j) { return ir * nc + (j % nc); };
  for (int er = 0; er < n_rad; ++er) {
    for (int ec = 0; ec < n_circ; ++ec) {
      Element el;
      el.kind = ElementKind::Quad9;
      el.material = 0;
      el.nodes.resize(9);
      // local a along radius (xi), b along circumference (eta): positive Jacobian
      for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a)
          el.nodes[3 * b + a] = node_id(2 * er + a, 2 * ec + b);
      mesh.elements.push_back(std::move(el));
    }
  }
  mesh.validate();
  return mesh;
}

struct LShapeGeometry {
  double leg_y = 4.0;      // extent of the leg along y
  double leg_z = 4.0;      // extent of the leg along z
  double thickness = 2.0;  // thickness of both legs
  double elem_size = 1.0;  // target quad9 edge length
};

// Structured quad9 mesh of the L-section [0,leg_y]x[0,t] U [0,t]x[0,leg_z].
inline CrossSectionMesh build_lshape_mesh(const LShapeGeometry& g, const Material& material) {
  if (!(g.leg_y > 0 && g.leg_z > 0 && g.thickness > 0 && g.elem_size > 0))
    throw std::invalid_argument("build_lshape_mesh: geometry parameters must be positive");
  if (!(g.thickness <= g.leg_y && g.thickness <= g.leg_z))
    throw std::invalid_argument("build_lshape_mesh: thickness must not exceed leg extents");

  int ny = std::max(1, static_cast<int>(std::lround(g.leg_y / g.elem_size)));
  int nz = std::max(1, static_cast<int>(std::lround(g.leg_z / g.elem_size)));
  double hy = g.leg_y / ny, hz = g.leg_z / nz;

  CrossSectionMesh mesh;
  mesh.materials.push_back(material);
  std::map<std::pair<int, int>, int> node_of;  // fine-grid (gi, gj) -> node id
  auto get_node = [&](int gi, int gj) {
    auto it = node_of.find({gi, gj});
    if (it != node_of.end()) return it->second;
    int id = static_cast<int>(mesh.nodes.size());
    mesh.nodes.push_back(Eigen::Vector2d(0.5 * gi * hy, 0.5 * gj * hz));
    node_of[{gi, gj}] = id;
    return id;
  };
  auto inside = [&](double y, double z) {
    return (y <= g.leg_y + 1e-12 && z <= g.thickness + 1e-12) ||
           (y <= g.thickness + 1e-12 && z <= g.leg_z + 1e-12);
  };
  for (int cz = 0; cz < nz; ++cz) {
    for (int cy = 0; cy < ny; ++cy) {
      double yc = (cy + 0.5) * hy, zc = (cz + 0.5) * hz;
      if (!inside(yc, zc)) continue;
      Element el;
      el.kind = ElementKind::Quad9;
      el.material = 0;
      el.nodes.resize(9);
      for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a)
          el.nodes[3 * b + a] = get_node(2 * cy + a, 2 * cz + b);
      mesh.elements.push_back(std::move(el));
    }
  }
  mesh.validate();
  return mesh;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

// Text format: header `nodes N elements E`, N node lines `id y z`, E element
// lines `id kind n1 ... n9 mat`, then one `mat id rho c11 c12 ... c66` line per
// material (21 upper-triangle entries). Quad9 only.
inline void save_mesh(const CrossSectionMesh& mesh, const std::string& path) {
  for (const Element& el : mesh.elements)
    if (el.kind != ElementKind::Quad9)
      throw std::invalid_argument("save_mesh: text format supports quad9 elements only");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mesh: cannot open " + path);
  out << "nodes " << mesh.nodes.size() << " elements " << mesh.elements.size() << "\n";
  for (size_t i = 0; i < mesh.nodes.size(); ++i)
    out << i << " " << detail::format_double(mesh.nodes[i].x()) << " "
        << detail::format_double(mesh.nodes[i].y()) << "\n";
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    out << e << " quad9";
    for (int id : mesh.elements[e].nodes) out << " " << id;
    out << " " << mesh.elements[e].material << "\n";
  }
  for (size_t m = 0; m < mesh.materials.size(); ++m) {
    out << "mat " << m << " " << detail::format_double(mesh.materials[m].density);
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) out << " " << detail::format_double(mesh.materials[m].stiffness(i, j));
    out << "\n";
  }
}

inline CrossSectionMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mesh: cannot open " + path);
  auto fail = [&](int line, const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
  };
  std::string line;
  int lineno = 0;

  auto next_line = [&]() -> std::istringstream {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return std::istringstream(line);
    }
    fail(lineno, "unexpected end of file");
    return std::istringstream();
  };

  std::istringstream header = next_line();
  std::string kw1, kw2;
  size_t n_nodes = 0, n_elems = 0;
  if (!(header >> kw1 >> n_nodes >> kw2 >> n_elems) || kw1 != "nodes" || kw2 != "elements")
    fail(lineno, "expected header 'nodes N elements E'");

  CrossSectionMesh mesh;
  mesh.nodes.resize(n_nodes);
  for (size_t i = 0; i < n_nodes; ++i) {
    std::istringstream ls = next_line();
    size_t id;
    double y, z;
    if (!(ls >> id >> y >> z) || id != i) fail(lineno, "malformed node line");
    mesh.nodes[i] = Eigen::Vector2d(y, z);
  }
  mesh.elements.resize(n_elems);
  int max_mat = -1;
  for (size_t e = 0; e < n_elems; ++e) {
    std::istringstream ls = next_line();
    size_t id;
    std::string kind;
    if (!(ls >> id >> kind) || id != e) fail(lineno, "malformed element line");
    if (kind != "quad9") fail(lineno, "unknown element kind '" + kind + "'");
    Element el;
    el.kind = ElementKind::Quad9;
    el.nodes.resize(9);
    for (int a = 0; a < 9; ++a) {
      long v;
      if (!(ls >> v)) fail(lineno, "element line needs 9 node indices");
      if (v < 0 || v >= static_cast<long>(n_nodes))
        fail(lineno, "dangling node index " + std::to_string(v));
      el.nodes[a] = static_cast<int>(v);
    }
    if (!(ls >> el.material) || el.material < 0) fail(lineno, "missing material index");
    max_mat = std::max(max_mat, el.material);
    mesh.elements[e] = std::move(el);
  }
  while (true) {
    if (!std::getline(in, line)) break;
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string kw;
    size_t id;
    if (!(ls >> kw >> id) || kw != "mat") fail(lineno, "expected material line");
    if (id != mesh.materials.size()) fail(lineno, "material ids must be sequential");
    Material m;
    if (!(ls >> m.density)) fail(lineno, "missing density");
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) {
        double v;
        if (!(ls >> v)) fail(lineno, "material line needs 21 stiffness entries");
        m.stiffness(i, j) = v;
        m.stiffness(j, i) = v;
      }
    mesh.materials.push_back(m);
  }
  if (max_mat >= static_cast<int>(mesh.materials.size()))
    fail(lineno, "element references undefined material " + std::to_string(max_mat));
  mesh.validate();
  return mesh;
}

}  // namespace disperkit
