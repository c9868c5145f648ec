#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "disperkit/parallel.hpp"
#include "disperkit/tracking.hpp"

namespace disperkit {

struct AdaptiveConfig {
  double k_min = 0.0, k_max = 1.0;
  double v_p_max = 1.0;       // fixes the retained-frequency ceiling v_p_max * k_max
  double eps_bar = 0.05;      // tracking error tolerance
  double delta_k_min = 1e-3;  // refinement stops at this interval width
  int n0 = 10;                // initial grid size
  double eps_eig = 1e-6;
  double coupling_tol = 1e-6;
  int max_iterations = 60;
  bool subspace_tracking = true;  // false forces pointwise (singleton) MAC

  double omega_max() const { return v_p_max * k_max; }

  void validate() const {
    if (!(k_min < k_max)) throw std::invalid_argument("adaptive: k_min must be < k_max");
    if (!(k_min >= 0.0)) throw std::invalid_argument("adaptive: k_min must be >= 0");
    if (n0 < 2) throw std::invalid_argument("adaptive: n0 must be >= 2");
    if (!(delta_k_min > 0.0 && delta_k_min < (k_max - k_min) / n0))
      throw std::invalid_argument("adaptive: delta_k_min must lie in (0, (k_max-k_min)/n0)");
    if (!(eps_bar > 0.0 && eps_bar < 2.0))
      throw std::invalid_argument("adaptive: eps_bar must lie in (0, 2)");
    if (!(v_p_max > 0.0)) throw std::invalid_argument("adaptive: v_p_max must be > 0");
    if (!(eps_eig > 0.0 && coupling_tol > 0.0))
      throw std::invalid_argument("adaptive: eps_eig and coupling_tol must be > 0");
    if (max_iterations < 1) throw std::invalid_argument("adaptive: max_iterations must be >= 1");
  }
};

struct IntervalDiag {
  double k_left = 0.0, k_right = 0.0;
  double epsilon = 0.0;
  bool refined = false;
  bool flagged = false;
  // populated for flagged intervals: matched cost vs best competing cost of
  // the worst object, so the user can judge the ambiguity
  double worst_self_mac = 0.0, worst_competitor_mac = 0.0;
};

struct IterationDiag {
  std::vector<double> grid;
  std::vector<IntervalDiag> intervals;
};

struct BranchSample {
  double omega = 0.0;
  int cluster_dim = 1;
};

struct Branch {
  int label = 0;
  int start = 0;  // grid index of the first sample
  std::vector<BranchSample> samples;
};

struct DispersionDataset {
  std::vector<double> grid;
  std::vector<Branch> branches;  // sorted by label
  std::vector<IterationDiag> iterations;
  std::vector<IntervalDiag> flagged;
  std::vector<double> interval_epsilons;  // final grid, size grid.size()-1
  long total_solves = 0;
  bool max_iterations_exceeded = false;
};

namespace detail {

// Caches eigensolves and interval matches; a given wavenumber is solved
// exactly once regardless of how the grid evolves.
class SweepEngine {
 public:
  SweepEngine(const SafeMatrices& m, const AdaptiveConfig& cfg)
      : m_(&m), cfg_(cfg), solver_(m) {}

  const ModeSet& at(double k) const { return sets_.at(k); }
  long solves() const { return solves_; }

  void prepare(const std::vector<double>& ks, int threads) {
    std::vector<double> missing;
    for (double k : ks)
      if (!sets_.count(k)) missing.push_back(k);
    std::vector<ModeSet> results(missing.size());
    parallel_for(static_cast<int>(missing.size()), threads, [&](int i) {
      ModeSet set = solver_.solve(missing[i], cfg_.omega_max());
      if (cfg_.subspace_tracking) {
        Eigen::MatrixXcd kp = stiffness_derivative_at(*m_, missing[i]);
        set = cluster_degenerate(set, kp, cfg_.eps_eig, cfg_.coupling_tol);
      }
      results[i] = std::move(set);
    });
    for (size_t i = 0; i < missing.size(); ++i) sets_.emplace(missing[i], std::move(results[i]));
    solves_ += static_cast<long>(missing.size());
  }

  const IntervalMatch& match(double kl, double kr) {
    auto key = std::make_pair(kl, kr);
    auto it = matches_.find(key);
    if (it == matches_.end())
      it = matches_.emplace(key, match_interval(sets_.at(kl), sets_.at(kr), m_->M)).first;
    return it->second;
  }

 private:
  const SafeMatrices* m_;
  AdaptiveConfig cfg_;
  ModeSolver solver_;
  std::map<double, ModeSet> sets_;
  std::map<std::pair<double, double>, IntervalMatch> matches_;
  long solves_ = 0;
};

inline void fill_candidate_costs(const IntervalMatch& m, IntervalDiag& diag);

}  // namespace detail

// Propagates branch labels left-to-right by composing interval assignments.
// Labels are minted in order of first appearance; unmatched right-side objects
// start new branches; degenerate clusters emit their dimension per sample.
inline DispersionDataset assemble_dataset(const std::vector<double>& grid,
                                          const std::vector<const ModeSet*>& sets,
                                          const std::vector<const IntervalMatch*>& matches) {
  if (sets.size() != grid.size() || matches.size() + 1 != grid.size())
    throw std::invalid_argument("assemble_dataset: grid, sets and matches sizes disagree");
  for (size_t p = 0; p + 1 < grid.size(); ++p)
    if (matches[p]->k_left != grid[p] || matches[p]->k_right != grid[p + 1])
      throw std::invalid_argument("assemble_dataset: interval endpoints do not match the grid");

  DispersionDataset out;
  out.grid = grid;
  int next_label = 0;
  std::map<int, Branch> branches;
  std::vector<int> labels;

  auto object_sample = [](const ModeSet& set, const std::vector<int>& obj) {
    double omega = 0.0;
    for (int i : obj) omega += set.omega(i);
    return BranchSample{omega / obj.size(), static_cast<int>(obj.size())};
  };

  for (size_t p = 0; p < grid.size(); ++p) {
    const ModeSet& set = *sets[p];
    std::vector<int> current(set.objects.size(), -1);
    if (p == 0) {
      for (size_t o = 0; o < set.objects.size(); ++o) current[o] = next_label++;
    } else {
      const IntervalMatch& m = *matches[p - 1];
      for (size_t l = 0; l < m.assignment.size(); ++l)
        if (m.assignment[l] >= 0) current[m.assignment[l]] = labels[l];
      for (size_t o = 0; o < current.size(); ++o)
        if (current[o] < 0) current[o] = next_label++;  // entered the window here
    }
    for (size_t o = 0; o < set.objects.size(); ++o) {
      int lbl = current[o];
      auto it = branches.find(lbl);
      if (it == branches.end()) {
        Branch b;
        b.label = lbl;
        b.start = static_cast<int>(p);
        it = branches.emplace(lbl, std::move(b)).first;
      }
      it->second.samples.push_back(object_sample(set, set.objects[o]));
    }
    labels = std::move(current);
  }
  for (auto& [lbl, b] : branches) out.branches.push_back(std::move(b));
  return out;
}

namespace detail {

inline void fill_candidate_costs(const IntervalMatch& m, IntervalDiag& diag) {
  int worst = -1;
  double dmin = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < m.separations.size(); ++i) {
    double d = m.separations[i];
    if (!std::isnan(d) && d < dmin) {
      dmin = d;
      worst = static_cast<int>(i);
    }
  }
  if (worst < 0) return;
  int j = m.assignment[worst];
  diag.worst_self_mac = m.mac(worst, j);
  double comp = 0.0;
  for (int jj = 0; jj < m.mac.cols(); ++jj)
    if (jj != j) comp = std::max(comp, m.mac(worst, jj));
  for (int ii = 0; ii < m.mac.rows(); ++ii)
    if (ii != worst) comp = std::max(comp, m.mac(ii, j));
  diag.worst_competitor_mac = comp;
}

inline void collect_branches(const std::vector<double>& grid, const SweepEngine& engine,
                             const std::vector<const IntervalMatch*>& matches,
                             DispersionDataset& out) {
  std::vector<const ModeSet*> sets;
  for (double k : grid) sets.push_back(&engine.at(k));
  out.branches = assemble_dataset(grid, sets, matches).branches;
}

}  // namespace detail

// Adaptive wavenumber sampling: uniform initial grid, bisection of every
// interval whose error indicator exceeds eps_bar until resolved or the
// interval width reaches delta_k_min (then flagged).
inline DispersionDataset run_adaptive(const SafeMatrices& m, const AdaptiveConfig& cfg,
                                      int threads = 1) {
  cfg.validate();
  detail::SweepEngine engine(m, cfg);

  std::vector<double> grid(cfg.n0);
  for (int i = 0; i < cfg.n0; ++i)
    grid[i] = cfg.k_min + (cfg.k_max - cfg.k_min) * i / (cfg.n0 - 1.0);
  grid.back() = cfg.k_max;

  DispersionDataset out;
  int iterations = 0;
  while (true) {
    engine.prepare(grid, threads);
    IterationDiag diag;
    diag.grid = grid;
    std::vector<double> refined_mids;
    for (size_t p = 0; p + 1 < grid.size(); ++p) {
      const IntervalMatch& match = engine.match(grid[p], grid[p + 1]);
      IntervalDiag idiag;
      idiag.k_left = grid[p];
      idiag.k_right = grid[p + 1];
      idiag.epsilon = match.epsilon;
      double width = grid[p + 1] - grid[p];
      bool violating = match.epsilon > cfg.eps_bar;
      idiag.refined = violating && width > cfg.delta_k_min;
      idiag.flagged = violating && width <= cfg.delta_k_min;
      if (idiag.flagged) detail::fill_candidate_costs(match, idiag);
      if (idiag.refined) refined_mids.push_back(0.5 * (grid[p] + grid[p + 1]));
      diag.intervals.push_back(idiag);
    }
    out.iterations.push_back(diag);
    ++iterations;
    if (refined_mids.empty()) break;
    if (iterations >= cfg.max_iterations) {
      out.max_iterations_exceeded = true;
      break;
    }
    grid.insert(grid.end(), refined_mids.begin(), refined_mids.end());
    std::sort(grid.begin(), grid.end());
  }

  out.grid = grid;
  const IterationDiag& last = out.iterations.back();
  for (const IntervalDiag& d : last.intervals) {
    out.interval_epsilons.push_back(d.epsilon);
    if (d.flagged) out.flagged.push_back(d);
  }
  std::vector<const IntervalMatch*> matches;
  for (size_t p = 0; p + 1 < grid.size(); ++p)
    matches.push_back(&engine.match(grid[p], grid[p + 1]));
  detail::collect_branches(grid, engine, matches, out);
  out.total_solves = engine.solves();
  return out;
}

// Fixed-grid baseline: same matching pipeline, no refinement.
inline DispersionDataset uniform_sweep(const SafeMatrices& m, const std::vector<double>& grid,
                                       const AdaptiveConfig& cfg, int threads = 1) {
  if (grid.size() < 2) throw std::invalid_argument("uniform_sweep: grid needs >= 2 points");
  for (size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw std::invalid_argument("uniform_sweep: grid must be strictly increasing");

  detail::SweepEngine engine(m, cfg);
  engine.prepare(grid, threads);

  DispersionDataset out;
  out.grid = grid;
  IterationDiag diag;
  diag.grid = grid;
  std::vector<const IntervalMatch*> matches;
  for (size_t p = 0; p + 1 < grid.size(); ++p) {
    const IntervalMatch& match = engine.match(grid[p], grid[p + 1]);
    matches.push_back(&match);
    IntervalDiag idiag;
    idiag.k_left = grid[p];
    idiag.k_right = grid[p + 1];
    idiag.epsilon = match.epsilon;
    idiag.flagged = match.epsilon > cfg.eps_bar;
    if (idiag.flagged) detail::fill_candidate_costs(match, idiag);
    diag.intervals.push_back(idiag);
    out.interval_epsilons.push_back(match.epsilon);
    if (idiag.flagged) out.flagged.push_back(idiag);
  }
  out.iterations.push_back(std::move(diag));
  detail::collect_branches(grid, engine, matches, out);
  out.total_solves = engine.solves();
  return out;
}

}  // namespace disperkit
