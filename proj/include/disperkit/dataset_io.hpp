#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "disperkit/adaptive.hpp"

namespace disperkit {

namespace detail {

inline std::string g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace detail

// CSV rows sorted by k then branch label; degenerate-cluster branches emit d
// coincident rows per grid point. vp is empty at k = 0.
inline void write_csv(const DispersionDataset& ds, std::ostream& out) {
  out << "k,branch,omega,vp,cluster_dim\n";
  for (size_t p = 0; p < ds.grid.size(); ++p) {
    double k = ds.grid[p];
    for (const Branch& b : ds.branches) {
      int local = static_cast<int>(p) - b.start;
      if (local < 0 || local >= static_cast<int>(b.samples.size())) continue;
      const BranchSample& s = b.samples[local];
      for (int rep = 0; rep < s.cluster_dim; ++rep) {
        out << detail::g12(k) << "," << b.label << "," << detail::g12(s.omega) << ",";
        if (k > 0.0) out << detail::g12(s.omega / k);
        out << "," << s.cluster_dim << "\n";
      }
    }
  }
}

inline void write_csv(const DispersionDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  write_csv(ds, out);
}

inline nlohmann::ordered_json diagnostics_json(const DispersionDataset& ds) {
  nlohmann::ordered_json root;
  root["iterations"] = nlohmann::ordered_json::array();
  for (const IterationDiag& it : ds.iterations) {
    nlohmann::ordered_json j;
    j["grid"] = it.grid;
    j["intervals"] = nlohmann::ordered_json::array();
    for (const IntervalDiag& d : it.intervals) {
      nlohmann::ordered_json i;
      i["k_left"] = d.k_left;
      i["k_right"] = d.k_right;
      i["epsilon"] = d.epsilon;
      i["refined"] = d.refined;
      i["flagged"] = d.flagged;
      if (d.flagged) {
        i["worst_self_mac"] = d.worst_self_mac;
        i["worst_competitor_mac"] = d.worst_competitor_mac;
      }
      j["intervals"].push_back(i);
    }
    root["iterations"].push_back(j);
  }
  root["total_solves"] = ds.total_solves;
  root["max_iterations_exceeded"] = ds.max_iterations_exceeded;
  return root;
}

inline void write_diagnostics(const DispersionDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_diagnostics: cannot open " + path);
  out << diagnostics_json(ds).dump(2) << "\n";
}

// Static dispersion plot: one polyline per branch, dashed for degenerate
// clusters. Presentation only.
inline void write_svg(const DispersionDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_svg: cannot open " + path);
  const double w = 900, h = 600, ml = 70, mr = 20, mt = 20, mb = 50;
  double kmin = ds.grid.front(), kmax = ds.grid.back();
  double wmax = 1e-12;
  for (const Branch& b : ds.branches)
    for (const BranchSample& s : b.samples) wmax = std::max(wmax, s.omega);
  auto px = [&](double k) { return ml + (k - kmin) / (kmax - kmin) * (w - ml - mr); };
  auto py = [&](double om) { return h - mb - om / wmax * (h - mt - mb); };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  for (int t = 0; t <= 6; ++t) {
    double k = kmin + (kmax - kmin) * t / 6.0;
    double om = wmax * t / 6.0;
    out << "<line x1=\"" << px(k) << "\" y1=\"" << h - mb << "\" x2=\"" << px(k) << "\" y2=\""
        << h - mb + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(k) << "\" y=\"" << h - mb + 20
        << "\" font-size=\"12\" text-anchor=\"middle\">" << detail::g12(k) << "</text>\n";
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(om) << "\" x2=\"" << ml << "\" y2=\""
        << py(om) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << py(om) + 4
        << "\" font-size=\"12\" text-anchor=\"end\">" << detail::g12(om) << "</text>\n";
  }
  out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
      << h - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 10
      << "\" font-size=\"14\" text-anchor=\"middle\">dimensionless wavenumber k</text>\n";
  out << "<text x=\"15\" y=\"" << (mt + h - mb) / 2
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
      << (mt + h - mb) / 2 << ")\">dimensionless frequency</text>\n";
  for (const Branch& b : ds.branches) {
    bool cluster = false;
    for (const BranchSample& s : b.samples) cluster |= s.cluster_dim > 1;
    out << "<polyline fill=\"none\" stroke=\"" << palette[b.label % 10] << "\" stroke-width=\"1.5\"";
    if (cluster) out << " stroke-dasharray=\"6 3\"";
    out << " points=\"";
    for (size_t t = 0; t < b.samples.size(); ++t)
      out << px(ds.grid[b.start + t]) << "," << py(b.samples[t].omega) << " ";
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

// Parsed CSV dataset for comparisons.
struct CsvDataset {
  struct Row {
    double k, omega;
    int branch, cluster_dim;
  };
  std::vector<Row> rows;
  std::vector<double> grid;  // unique sorted k values
};

inline CsvDataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  CsvDataset ds;
  std::string line;
  if (!std::getline(in, line) || line.rfind("k,branch,omega", 0) != 0)
    throw std::runtime_error("read_csv: " + path + " is not a dispersion CSV");
  std::set<double> ks;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    CsvDataset::Row r;
    char vp[40];
    int got = std::sscanf(line.c_str(), "%lf,%d,%lf,%39[^,],%d", &r.k, &r.branch, &r.omega, vp,
                          &r.cluster_dim);
    if (got != 5) {
      got = std::sscanf(line.c_str(), "%lf,%d,%lf,,%d", &r.k, &r.branch, &r.omega, &r.cluster_dim);
      if (got != 4)
        throw std::runtime_error("read_csv: " + path + ":" + std::to_string(lineno) +
                                 ": malformed row");
    }
    ds.rows.push_back(r);
    ks.insert(r.k);
  }
  ds.grid.assign(ks.begin(), ks.end());
  return ds;
}

struct CompareReport {
  size_t grid_a = 0, grid_b = 0;
  size_t shared_points = 0;
  double label_agreement = 0.0;  // fraction of shared rows with equal labels
  double max_domega = 0.0;       // over matched (k, branch) pairs
  bool compatible = true;
};

// Compares two exported datasets: shared-grid-point label agreement and the
// largest frequency deviation over matched (k, branch) pairs.
inline CompareReport compare_datasets(const CsvDataset& a, const CsvDataset& b) {
  CompareReport rep;
  rep.grid_a = a.grid.size();
  rep.grid_b = b.grid.size();
  auto rows_at = [](const CsvDataset& d, double k) {
    std::vector<CsvDataset::Row> rows;
    for (const auto& r : d.rows)
      if (r.k == k) rows.push_back(r);
    std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
      if (x.omega != y.omega) return x.omega < y.omega;
      return x.branch < y.branch;
    });
    return rows;
  };
  if (a.grid.empty() || b.grid.empty()) throw std::runtime_error("compare: empty dataset");
  if (rows_at(a, a.grid.front()).size() != rows_at(b, b.grid.front()).size()) {
    rep.compatible = false;
    return rep;
  }
  size_t agree = 0, total = 0;
  for (double k : a.grid) {
    bool shared = false;
    for (double kb : b.grid)
      if (std::abs(kb - k) <= 1e-12 * std::max(1.0, std::abs(k))) shared = true;
    if (!shared) continue;
    ++rep.shared_points;
    auto ra = rows_at(a, k), rb = rows_at(b, k);
    size_t n = std::min(ra.size(), rb.size());
    for (size_t i = 0; i < n; ++i) {
      ++total;
      if (ra[i].branch == rb[i].branch) ++agree;
    }
    // matched (k, branch) pairs
    std::map<int, double> omega_b;
    for (const auto& r : rb)
      if (!omega_b.count(r.branch)) omega_b[r.branch] = r.omega;
    for (const auto& r : ra) {
      auto it = omega_b.find(r.branch);
      if (it != omega_b.end())
        rep.max_domega = std::max(rep.max_domega, std::abs(r.omega - it->second));
    }
  }
  rep.label_agreement = total ? static_cast<double>(agree) / total : 1.0;
  return rep;
}

}  // namespace disperkit
