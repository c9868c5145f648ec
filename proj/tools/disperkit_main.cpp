// disperkit command line: trace | sweep | verify | compare.
// DISPERKIT_LOG=info|debug enables progress output on stderr.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "disperkit/config.hpp"
#include "disperkit/dataset_io.hpp"
#include "disperkit/perturbation.hpp"

namespace fs = std::filesystem;
using namespace disperkit;

namespace {

int log_level() {
  static int level = [] {
    const char* v = std::getenv("DISPERKIT_LOG");
    if (!v) return 0;
    std::string s(v);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[disperkit] " << msg << "\n";
}

void write_outputs(const DispersionDataset& ds, const ProblemConfig& cfg, const fs::path& out_dir,
                   bool svg) {
  fs::create_directories(out_dir);
  fs::path csv = out_dir / (cfg.name + ".csv");
  fs::path json = out_dir / (cfg.name + ".diagnostics.json");
  write_csv(ds, csv.string());
  write_diagnostics(ds, json.string());
  std::cout << "wrote " << csv.string() << "\n";
  std::cout << "wrote " << json.string() << "\n";
  if (svg) {
    fs::path plot = out_dir / (cfg.name + ".svg");
    write_svg(ds, plot.string());
    std::cout << "wrote " << plot.string() << "\n";
  }
}

int run_trace(const std::string& config_path, const std::string& out_dir, bool svg, int threads,
              bool dump_matrices) {
  Problem p = build_problem(config_path);
  log_info("assembled " + std::to_string(p.matrices.n) + " DOFs for '" + p.config.name + "'");
  if (dump_matrices) {
    fs::create_directories(out_dir);
    write_triplets(p.matrices.K1, (fs::path(out_dir) / (p.config.name + ".K1.txt")).string());
    write_triplets(p.matrices.K2, (fs::path(out_dir) / (p.config.name + ".K2.txt")).string());
    write_triplets(p.matrices.K3, (fs::path(out_dir) / (p.config.name + ".K3.txt")).string());
    write_triplets(p.matrices.M, (fs::path(out_dir) / (p.config.name + ".M.txt")).string());
  }
  DispersionDataset ds = run_adaptive(p.matrices, p.config.adaptive, threads);
  log_info("final grid: " + std::to_string(ds.grid.size()) + " points, " +
           std::to_string(ds.iterations.size()) + " iterations");
  write_outputs(ds, p.config, out_dir, svg);
  if (ds.max_iterations_exceeded) {
    std::cerr << "warning: max_iterations exceeded, dataset is partial\n";
    return 2;
  }
  if (!ds.flagged.empty()) {
    std::cerr << "warning: " << ds.flagged.size()
              << " interval(s) flagged unresolvable at delta_k_min\n";
    return 2;
  }
  return 0;
}

std::vector<double> parse_grid_spec(const std::string& spec) {
  double a, b, step;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 || !(step > 0.0) || !(a < b))
    throw std::runtime_error("grid spec must be 'a:b:step' with a < b, step > 0");
  int n = static_cast<int>(std::lround((b - a) / step)) + 1;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = a + i * step;
  return grid;
}

int run_sweep(const std::string& config_path, const std::string& grid_spec,
              const std::string& out_dir, bool svg, int threads) {
  Problem p = build_problem(config_path);
  std::vector<double> grid = parse_grid_spec(grid_spec);
  log_info("uniform sweep over " + std::to_string(grid.size()) + " points");
  DispersionDataset ds = uniform_sweep(p.matrices, grid, p.config.adaptive, threads);
  double max_eps = 0.0;
  for (double e : ds.interval_epsilons) max_eps = std::max(max_eps, e);
  write_outputs(ds, p.config, out_dir, svg);
  std::cout << "max interval epsilon: " << detail::g12(max_eps) << "\n";
  return ds.flagged.empty() ? 0 : 2;
}

int run_verify(const std::string& config_path, int samples) {
  Problem p = build_problem(config_path);
  const AdaptiveConfig& ac = p.config.adaptive;
  ModeSolver solver(p.matrices);
  const double h = 1e-5;
  const double fd_tol = 1e-5, fit_tol = 0.05, hf_tol = 1e-6;
  bool all_ok = true;

  std::printf("%-10s %-5s %-12s %-12s %-12s %-12s %s\n", "k", "mode", "fd_err", "dnorm_fit",
              "cij_fit", "hf_err", "status");
  for (int s = 0; s < samples; ++s) {
    double k = ac.k_min + (s + 0.5) * (ac.k_max - ac.k_min) / samples;
    ModeSet set = solver.solve(k, ac.omega_max());
    Eigen::MatrixXcd kp = stiffness_derivative_at(p.matrices, k);
    set = cluster_degenerate(set, kp, ac.eps_eig, ac.coupling_tol);
    ModeSet plus = solver.solve(k + h, ac.omega_max());
    ModeSet minus = solver.solve(k - h, ac.omega_max());

    std::vector<double> dks;
    std::vector<ModeSet> taylor_sets;
    for (int t = 0; t < 6; ++t) {
      double dk = 1e-4 * std::pow(10.0, t / 5.0);
      dks.push_back(dk);
      taylor_sets.push_back(solver.solve(k + dk, ac.omega_max()));
    }

    std::vector<int> dim_of(set.mode_count(), 1);
    for (const auto& obj : set.objects)
      for (int i : obj) dim_of[i] = static_cast<int>(obj.size());

    for (int i = 0; i < set.mode_count(); ++i) {
      if (dim_of[i] > 1) {
        std::printf("%-10.4g %-5d skipped (degenerate)\n", k, i);
        continue;
      }
      if (i >= plus.mode_count() || i >= minus.mode_count()) continue;

      auto m_ip = [&](const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
        return cxd(a.adjoint() * (p.matrices.M * b).eval());
      };
      auto m_norm = [&](const Eigen::VectorXcd& v) { return std::sqrt(std::real(m_ip(v, v))); };
      auto aligned = [&](const ModeSet& other) {
        Eigen::VectorXcd q = other.vectors.col(i);
        cxd ip = m_ip(set.vectors.col(i), q);
        if (std::abs(ip) > 0) q *= std::conj(ip) / std::abs(ip);
        return q;
      };
      Eigen::VectorXcd fd = (aligned(plus) - aligned(minus)) / (2.0 * h);
      fd -= set.vectors.col(i) * m_ip(set.vectors.col(i), fd);
      Eigen::VectorXcd qd = eigvec_derivative(set, i, kp, ac.eps_eig);
      // floor keeps k-independent mode shapes (zero derivative) well defined
      double fd_err = m_norm(qd - fd) / std::max(m_norm(qd), 1e-3);

      // Taylor fits of 1 - self-MAC and the dominant cross-MAC against dk^2
      double dn2 = std::pow(derivative_norm(set, i, kp, ac.eps_eig), 2);
      int jstar = -1;
      double cmax = 0.0;
      for (int j = 0; j < set.mode_count(); ++j) {
        if (j == i) continue;
        double cij = std::abs(coupling(set, j, i, kp)) / std::abs(set.lambdas(j) - set.lambdas(i));
        if (cij > cmax) {
          cmax = cij;
          jstar = j;
        }
      }
      double sxx = 0.0, sxy_self = 0.0, sxy_cross = 0.0;
      for (size_t t = 0; t < dks.size(); ++t) {
        const ModeSet& ts = taylor_sets[t];
        if (i >= ts.mode_count() || (jstar >= 0 && jstar >= ts.mode_count())) continue;
        double x = dks[t] * dks[t];
        double self = std::norm(m_ip(set.vectors.col(i), ts.vectors.col(i)));
        sxx += x * x;
        sxy_self += x * (1.0 - self);
        if (jstar >= 0)
          sxy_cross += x * std::norm(m_ip(set.vectors.col(i), ts.vectors.col(jstar)));
      }
      // modes with (near) zero derivative or coupling have nothing to fit
      double dnorm_fit = sxx > 0 && dn2 > 1e-12 ? (sxy_self / sxx) / dn2 : 1.0;
      double cij_fit = sxx > 0 && cmax > 1e-8 ? (sxy_cross / sxx) / (cmax * cmax) : 1.0;

      // Hellmann-Feynman: lambda' = q^H K' q against central differences
      double lam_fd = (plus.lambdas(i) - minus.lambdas(i)) / (2.0 * h);
      double lam_an = std::real(cxd(set.vectors.col(i).adjoint() * kp * set.vectors.col(i)));
      double hf_err = std::abs(lam_an - lam_fd) /
                      std::max(std::abs(lam_fd), 1e-9 * std::max(1.0, std::abs(set.lambdas(i))));

      bool ok = fd_err <= fd_tol && std::abs(dnorm_fit - 1.0) <= fit_tol &&
                std::abs(cij_fit - 1.0) <= fit_tol && hf_err <= hf_tol;
      all_ok &= ok;
      std::printf("%-10.4g %-5d %-12.3e %-12.4f %-12.4f %-12.3e %s\n", k, i, fd_err, dnorm_fit,
                  cij_fit, hf_err, ok ? "ok" : "FAIL");
    }
  }
  return all_ok ? 0 : 1;
}

int run_compare(const std::string& path_a, const std::string& path_b) {
  CsvDataset a = read_csv(path_a);
  CsvDataset b = read_csv(path_b);
  CompareReport rep = compare_datasets(a, b);
  if (!rep.compatible) {
    std::cerr << "error: datasets are incompatible (different branch count at k_min)\n";
    return 1;
  }
  std::cout << "grid sizes: " << rep.grid_a << " vs " << rep.grid_b << "\n";
  std::cout << "shared grid points: " << rep.shared_points << "\n";
  std::cout << "branch label agreement: " << detail::g12(100.0 * rep.label_agreement) << "%\n";
  std::cout << "max |d omega|: " << detail::g12(rep.max_domega) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"disperkit: guided-wave dispersion curves with adaptive mode tracking"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", grid_spec, path_a, path_b;
  bool svg = false, dump_matrices = false;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int samples = 5;

  CLI::App* trace = app.add_subcommand("trace", "adaptive dispersion trace");
  trace->add_option("config", config_path, "problem config file")->required();
  trace->add_option("--out", out_dir, "output directory");
  trace->add_flag("--svg", svg, "also write an SVG plot");
  trace->add_option("--threads", threads, "parallel eigensolve width");
  trace->add_flag("--dump-matrices", dump_matrices, "export assembled matrices as triplets");

  CLI::App* sweep = app.add_subcommand("sweep", "uniform-grid sweep baseline");
  sweep->add_option("config", config_path, "problem config file")->required();
  sweep->add_option("--grid", grid_spec, "uniform grid a:b:step")->required();
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_flag("--svg", svg, "also write an SVG plot");
  sweep->add_option("--threads", threads, "parallel eigensolve width");

  CLI::App* verify = app.add_subcommand("verify", "perturbation-theory self checks");
  verify->add_option("config", config_path, "problem config file")->required();
  verify->add_option("--samples", samples, "number of sampled wavenumbers");

  CLI::App* compare = app.add_subcommand("compare", "compare two exported datasets");
  compare->add_option("a", path_a, "first CSV")->required();
  compare->add_option("b", path_b, "second CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (trace->parsed()) return run_trace(config_path, out_dir, svg, threads, dump_matrices);
    if (sweep->parsed()) return run_sweep(config_path, grid_spec, out_dir, svg, threads);
    if (verify->parsed()) return run_verify(config_path, samples);
    if (compare->parsed()) return run_compare(path_a, path_b);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
