#pragma once

// Hierarchical move making over tree metrics and its extension to general
// semi-metrics through a mixture of trees.
//
// solve_hst labels an instance bottom-up over a tree: every leaf proposes the
// constant labeling of its label, and every internal node fuses the
// labelings of its children. solve_semimetric runs solve_hst once per tree of
// a learned mixture and fuses the per-tree results under the original
// distance. refine alternates between fitting a tree to the label pairs the
// current labeling actually uses and re-solving on that tree.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hstcut/distances.hpp"
#include "hstcut/hst.hpp"
#include "hstcut/moves.hpp"
#include "hstcut/mrf.hpp"
#include "hstcut/parallel.hpp"

namespace hstcut {

struct SolveConfig {
  std::size_t trees = 50;
  double lambda = 0.1;
  std::size_t dp_samples = 64;
  std::uint64_t seed = 0;
  // Measure subproblem pairwise costs with the instance's own distance
  // rather than the tree metric.
  bool use_original_distance = true;
  bool refine = false;
  int max_refine_iters = 20;
  // 0 means one worker per hardware thread.
  unsigned threads = 0;
};

struct PhaseSeconds {
  double embed = 0.0;
  double trees = 0.0;
  double combine = 0.0;
  double refine = 0.0;

  double total() const { return embed + trees + combine + refine; }
};

struct SolveReport {
  Labeling labeling;
  double energy = 0.0;
  std::vector<double> tree_energies;
  double distortion = 1.0;
  PhaseSeconds seconds;
  // Unrefined result of the pipeline (equals labeling when refine is off).
  Labeling unrefined_labeling;
  double unrefined_energy = 0.0;
  std::vector<double> refine_trace;
  bool refine_hit_cap = false;
  MoveStats moves;
};

namespace detail {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline Labeling solve_subtree(const MrfInstance& inst, const HstTree& t, int v, const DistanceFn& pair_distance,
                              MoveStats& stats) {
  const HstNode& node = t.node(v);
  const auto n = static_cast<std::size_t>(inst.num_vars());
  if (node.children.empty()) return Labeling(n, node.label);
  std::vector<Labeling> proposals;
  proposals.reserve(node.children.size());
  for (int c : node.children) proposals.push_back(solve_subtree(inst, t, c, pair_distance, stats));
  MoveResult fused = fuse(inst, proposals, pair_distance);
  stats.absorb(fused.stats);
  return std::move(fused.labeling);
}

}  // namespace detail

// Bottom-up hierarchical labeling over the tree t (post-order).
inline Labeling solve_hst(const MrfInstance& inst, const TreePtr& t, const SolveConfig& config,
                          MoveStats* stats = nullptr) {
  if (!t) throw std::invalid_argument("solve_hst: null tree");
  if (t->num_labels() != inst.num_labels())
    throw std::invalid_argument("solve_hst: tree leaves do not match the instance labels");
  MoveStats local;
  Labeling out;
  if (config.use_original_distance) {
    out = detail::solve_subtree(inst, *t, t->root(), inst.distance(), local);
  } else {
    const DistanceFn tree_metric = DistanceFn::tree(t);
    out = detail::solve_subtree(inst, *t, t->root(), tree_metric, local);
  }
  if (stats) stats->absorb(local);
  return out;
}

// Per-tree hierarchical solves followed by one fusion under the instance's
// distance, started at the best per-tree labeling.
inline SolveReport solve_semimetric(const MrfInstance& inst, const HstMixture& mixture, const SolveConfig& config) {
  if (mixture.num_labels() != inst.num_labels())
    throw std::invalid_argument("solve_semimetric: mixture label count mismatch");
  SolveReport report;
  detail::Stopwatch clock;
  std::vector<Labeling> per_tree(mixture.size());
  std::vector<MoveStats> per_tree_stats(mixture.size());
  parallel_for(mixture.size(), config.threads, [&](std::size_t t) {
    per_tree[t] = solve_hst(inst, mixture.trees()[t], config, &per_tree_stats[t]);
  });
  for (std::size_t t = 0; t < mixture.size(); ++t) {
    report.moves.absorb(per_tree_stats[t]);
    report.tree_energies.push_back(energy(inst, per_tree[t]));
  }
  report.seconds.trees = clock.lap();

  MoveResult combined = fuse(inst, per_tree, inst.distance());
  report.moves.absorb(combined.stats);
  report.labeling = std::move(combined.labeling);
  report.energy = energy(inst, report.labeling);
  report.seconds.combine = clock.lap();
  report.distortion = distortion(mixture, inst.distance());
  report.unrefined_labeling = report.labeling;
  report.unrefined_energy = report.energy;
  return report;
}

struct RefineResult {
  Labeling labeling;
  // Energy of the starting labeling followed by every accepted labeling.
  std::vector<double> trace;
  bool hit_cap = false;
};

// Weight of each unordered label pair in the current labeling's pairwise
// energy, stored symmetrically with a zero diagonal.
inline LabelMatrix label_pair_weights(const MrfInstance& inst, std::span<const Label> f) {
  LabelMatrix y(inst.num_labels());
  for (const Edge& e : inst.edges()) {
    const Label i = f[static_cast<std::size_t>(e.a)];
    const Label j = f[static_cast<std::size_t>(e.b)];
    if (i == j) continue;
    y(i, j) += e.w;
    y(j, i) += e.w;
  }
  return y;
}

// Hard-EM refinement: fit a dominating tree to the label pairs used by f,
// re-solve on it, and keep the result only if the true energy drops.
inline RefineResult refine(const MrfInstance& inst, Labeling f, const SolveConfig& config,
                           MoveStats* stats = nullptr) {
  check_labeling(inst, f);
  RefineResult out;
  double current = energy(inst, f);
  out.trace.push_back(current);
  if (inst.num_labels() > 1) {
    const DpOptions dp{config.dp_samples, kDefaultSeparation, config.threads};
    int iter = 0;
    for (; iter < config.max_refine_iters; ++iter) {
      const LabelMatrix y = label_pair_weights(inst, f);
      const auto tree = std::make_shared<const HstTree>(
          dp_solve(y, inst.distance(), derive_seed(config.seed, 0x2EF1ull, static_cast<std::uint64_t>(iter)), dp));
      Labeling candidate = solve_hst(inst, tree, config, stats);
      const double en = energy(inst, candidate);
      if (!(en < current - kAcceptTolerance)) break;
      f = std::move(candidate);
      current = en;
      out.trace.push_back(current);
    }
    out.hit_cap = iter == config.max_refine_iters;
  }
  out.labeling = std::move(f);
  return out;
}

// Full pipeline. Tree-metric instances are solved directly on their tree;
// anything else is embedded into a learned mixture first.
inline SolveReport solve(const MrfInstance& inst, const SolveConfig& config) {
  SolveReport report;
  const DistanceFn& d = inst.distance();
  if (d.kind() == DistanceKind::tree || inst.num_labels() == 1) {
    detail::Stopwatch clock;
    const TreePtr tree = d.kind() == DistanceKind::tree ? d.tree_ptr() : std::make_shared<const HstTree>(HstTree::single_leaf());
    report.labeling = solve_hst(inst, tree, config, &report.moves);
    report.energy = energy(inst, report.labeling);
    report.tree_energies = {report.energy};
    report.distortion = 1.0;
    report.seconds.trees = clock.lap();
    report.unrefined_labeling = report.labeling;
    report.unrefined_energy = report.energy;
  } else {
    detail::Stopwatch clock;
    MixtureOptions mix;
    mix.trees = config.trees;
    mix.lambda = config.lambda;
    mix.dp = DpOptions{config.dp_samples, kDefaultSeparation, config.threads};
    const HstMixture mixture = learn_mixture(d, config.seed, mix);
    const double embed_seconds = clock.lap();
    report = solve_semimetric(inst, mixture, config);
    report.seconds.embed = embed_seconds;
  }

  if (config.refine) {
    detail::Stopwatch clock;
    RefineResult refined = refine(inst, report.labeling, config, &report.moves);
    report.labeling = std::move(refined.labeling);
    report.energy = energy(inst, report.labeling);
    report.refine_trace = std::move(refined.trace);
    report.refine_hit_cap = refined.hit_cap;
    report.seconds.refine = clock.lap();
  }
  return report;
}

}  // namespace hstcut
