#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "disperkit/adaptive.hpp"
#include "disperkit/assembly.hpp"
#include "disperkit/mesh.hpp"

namespace disperkit {

// Declarative problem description parsed from the INI-style config format.
struct ProblemConfig {
  std::string name = "problem";
  std::string kind;  // plate-layup | mesh-file | annulus | lshape
  Scales scales;
  std::map<std::string, Material> materials;
  std::vector<std::string> material_order;

  // plate-layup
  std::string layup_material;
  std::vector<double> layup_angles;
  double ply_thickness = 0.0;
  int gll_order = 4;

  // annulus
  double r_in = 0.0, r_out = 0.0;
  int n_circ = 0, n_rad = 1;
  std::string annulus_material;

  // lshape
  LShapeGeometry lshape;
  std::string lshape_material;

  // mesh-file
  std::string mesh_path;

  AdaptiveConfig adaptive;
};

namespace detail {

struct IniSection {
  std::string type;  // e.g. "material"
  std::string name;  // e.g. "aluminum"
  std::map<std::string, std::string> values;
  int lineno = 0;
};

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<IniSection> parse_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::vector<IniSection> sections;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    size_t hash = s.find('#');
    if (hash != std::string::npos) s = trim(s.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unterminated section");
      std::string inner = trim(s.substr(1, s.size() - 2));
      IniSection sec;
      sec.lineno = lineno;
      size_t sp = inner.find(' ');
      sec.type = sp == std::string::npos ? inner : trim(inner.substr(0, sp));
      sec.name = sp == std::string::npos ? "" : trim(inner.substr(sp + 1));
      sections.push_back(sec);
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos || sections.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    sections.back().values[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
  }
  return sections;
}

struct SectionReader {
  const IniSection* sec;
  const std::string* path;

  std::string require(const std::string& key) const {
    auto it = sec->values.find(key);
    if (it == sec->values.end())
      throw std::runtime_error(*path + ": section [" + sec->type +
                               (sec->name.empty() ? "" : " " + sec->name) + "] is missing '" +
                               key + "'");
    return it->second;
  }
  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = sec->values.find(key);
    return it == sec->values.end() ? fallback : it->second;
  }
  double number(const std::string& key) const { return to_number(key, require(key)); }
  double number(const std::string& key, double fallback) const {
    auto it = sec->values.find(key);
    return it == sec->values.end() ? fallback : to_number(key, it->second);
  }
  int integer(const std::string& key, int fallback) const {
    return static_cast<int>(number(key, fallback));
  }
  bool boolean(const std::string& key, bool fallback) const {
    auto it = sec->values.find(key);
    if (it == sec->values.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::runtime_error(*path + ": key '" + key + "' must be true or false");
  }
  double to_number(const std::string& key, const std::string& v) const {
    try {
      size_t pos = 0;
      double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw std::runtime_error(*path + ": key '" + key + "' has non-numeric value '" + v + "'");
    }
  }
  std::vector<double> numbers(const std::string& key) const {
    std::istringstream ss(require(key));
    std::vector<double> out;
    double v;
    while (ss >> v) out.push_back(v);
    return out;
  }
};

}  // namespace detail

inline ProblemConfig parse_config(const std::string& path) {
  auto sections = detail::parse_ini(path);
  ProblemConfig cfg;
  cfg.name = std::filesystem::path(path).stem().string();

  int geometry_sources = 0;
  for (const auto& sec : sections) {
    detail::SectionReader r{&sec, &path};
    if (sec.type == "problem") {
      cfg.kind = r.require("kind");
      cfg.name = r.get("name", cfg.name);
      cfg.scales.a = r.number("a");
      cfg.scales.c_T = r.number("c_T");
    } else if (sec.type == "material") {
      if (sec.name.empty()) throw std::runtime_error(path + ": material section needs a name");
      std::string type = r.require("type");
      Material m;
      if (type == "isotropic") {
        m = make_isotropic(r.number("E"), r.number("nu"), r.number("rho"));
      } else if (type == "transversely-isotropic") {
        m = transversely_isotropic_stiffness(r.number("E1"), r.number("E2"), r.number("G12"),
                                             r.number("nu12"), r.number("nu23"), r.number("rho"));
      } else {
        throw std::runtime_error(path + ": unknown material type '" + type + "'");
      }
      cfg.materials[sec.name] = m;
      cfg.material_order.push_back(sec.name);
    } else if (sec.type == "layup") {
      ++geometry_sources;
      cfg.layup_material = r.require("material");
      cfg.layup_angles = r.numbers("angles");
      cfg.ply_thickness = r.number("ply_thickness");
      cfg.gll_order = r.integer("order", 4);
    } else if (sec.type == "annulus") {
      ++geometry_sources;
      cfg.r_in = r.number("r_in");
      cfg.r_out = r.number("r_out");
      cfg.n_circ = r.integer("n_circ", 0);
      cfg.n_rad = r.integer("n_rad", 1);
      cfg.annulus_material = r.require("material");
    } else if (sec.type == "lshape") {
      ++geometry_sources;
      cfg.lshape.leg_y = r.number("leg_y");
      cfg.lshape.leg_z = r.number("leg_z");
      cfg.lshape.thickness = r.number("thickness");
      cfg.lshape.elem_size = r.number("elem_size", 1.0);
      cfg.lshape_material = r.require("material");
    } else if (sec.type == "mesh") {
      ++geometry_sources;
      cfg.mesh_path = r.require("path");
      std::filesystem::path p(cfg.mesh_path);
      if (p.is_relative()) {
        cfg.mesh_path = (std::filesystem::path(path).parent_path() / p).string();
      }
      if (!std::filesystem::exists(cfg.mesh_path))
        throw std::runtime_error(path + ": mesh file does not exist: " + cfg.mesh_path);
    } else if (sec.type == "adaptive") {
      cfg.adaptive.k_min = r.number("k_min");
      cfg.adaptive.k_max = r.number("k_max");
      cfg.adaptive.v_p_max = r.number("v_p_max");
      cfg.adaptive.eps_bar = r.number("eps_bar", 0.05);
      cfg.adaptive.delta_k_min = r.number("delta_k_min", 1e-3);
      cfg.adaptive.n0 = r.integer("n0", 10);
      cfg.adaptive.eps_eig = r.number("eps_eig", 1e-6);
      cfg.adaptive.coupling_tol = r.number("coupling_tol", 1e-6);
      cfg.adaptive.max_iterations = r.integer("max_iterations", 60);
      cfg.adaptive.subspace_tracking = r.boolean("subspace_tracking", true);
    } else {
      throw std::runtime_error(path + ":" + std::to_string(sec.lineno) + ": unknown section [" +
                               sec.type + "]");
    }
  }
  if (cfg.kind.empty()) throw std::runtime_error(path + ": missing [problem] section");
  if (geometry_sources != 1)
    throw std::runtime_error(path + ": exactly one geometry section required ([layup], " +
                             "[annulus], [lshape] or [mesh]), found " +
                             std::to_string(geometry_sources));
  auto expects = [&](const std::string& kind, const std::string& what) {
    if (cfg.kind != kind)
      throw std::runtime_error(path + ": kind '" + cfg.kind + "' does not match geometry [" +
                               what + "]");
  };
  if (!cfg.layup_angles.empty()) expects("plate-layup", "layup");
  if (cfg.n_circ > 0) expects("annulus", "annulus");
  if (!cfg.lshape_material.empty()) expects("lshape", "lshape");
  if (!cfg.mesh_path.empty()) expects("mesh-file", "mesh");
  cfg.adaptive.validate();
  return cfg;
}

inline const Material& config_material(const ProblemConfig& cfg, const std::string& name) {
  auto it = cfg.materials.find(name);
  if (it == cfg.materials.end())
    throw std::runtime_error("config: undefined material '" + name + "'");
  return it->second;
}

inline CrossSectionMesh build_mesh(const ProblemConfig& cfg) {
  if (cfg.kind == "plate-layup") {
    Layup layup;
    for (double angle : cfg.layup_angles) layup.plies.push_back({angle, cfg.ply_thickness, 0});
    return build_plate_mesh(layup, {config_material(cfg, cfg.layup_material)}, cfg.gll_order,
                            cfg.scales.a);
  }
  if (cfg.kind == "annulus")
    return build_annulus_mesh(cfg.r_in, cfg.r_out, cfg.n_circ, cfg.n_rad,
                              config_material(cfg, cfg.annulus_material));
  if (cfg.kind == "lshape")
    return build_lshape_mesh(cfg.lshape, config_material(cfg, cfg.lshape_material));
  if (cfg.kind == "mesh-file") return load_mesh(cfg.mesh_path);
  throw std::runtime_error("config: unknown problem kind '" + cfg.kind + "'");
}

struct Problem {
  ProblemConfig config;
  CrossSectionMesh mesh;
  SafeMatrices matrices;
};

inline Problem build_problem(const std::string& config_path) {
  Problem p;
  p.config = parse_config(config_path);
  p.mesh = build_mesh(p.config);
  p.matrices = assemble(p.mesh, p.config.scales);
  return p;
}

}  // namespace disperkit
