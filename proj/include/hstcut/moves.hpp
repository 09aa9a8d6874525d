#pragma once

// st-mincut move making: alpha-expansion, alpha-beta swap, and fusion of
// candidate labelings.
//
// Every move is a binary problem built with the usual reparameterization of
// a two-variable term
//     E(x_a, x_b) = A + (C - A) x_a + (D - C) x_b + (B + C - A - D)(1 - x_a) x_b
// where A, B, C, D are the costs of (keep, keep), (keep, switch),
// (switch, keep) and (switch, switch). A negative coupling B + C - A - D marks
// a non-submodular term; it is truncated to zero and the candidate labeling is
// then accepted only if its true energy decreases.

#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "hstcut/distances.hpp"
#include "hstcut/maxflow.hpp"
#include "hstcut/mrf.hpp"

namespace hstcut {

// Strict decrease required to accept a move.
inline constexpr double kAcceptTolerance = 1e-9;
// Couplings below -kSubmodularTolerance count as truncated.
inline constexpr double kSubmodularTolerance = 1e-9;

template <class E>
concept PairwiseEnergy = requires(const E& e, int a, int i, std::size_t k) {
  { e.num_vars() } -> std::convertible_to<int>;
  { e.num_labels() } -> std::convertible_to<int>;
  { e.unary(a, i) } -> std::convertible_to<double>;
  { e.pairwise(k, i, i) } -> std::convertible_to<double>;
  { e.edges() } -> std::convertible_to<std::span<const Edge>>;
};

template <PairwiseEnergy E>
double evaluate(const E& e, std::span<const Label> f) {
  double total = 0.0;
  for (int a = 0; a < e.num_vars(); ++a) total += e.unary(a, f[static_cast<std::size_t>(a)]);
  const std::span<const Edge> edges = e.edges();
  for (std::size_t k = 0; k < edges.size(); ++k)
    total += e.pairwise(k, f[static_cast<std::size_t>(edges[k].a)], f[static_cast<std::size_t>(edges[k].b)]);
  return total;
}

struct MoveStats {
  int passes = 0;
  long accepted_moves = 0;
  long truncated_edges = 0;
  // Accepted moves whose re-evaluated energy did not decrease. Always zero
  // unless the acceptance rule is broken; tracked for instrumentation.
  long monotonicity_violations = 0;
  std::vector<double> energy_trace;

  // Adds counters of a sub-run; its trace is checked, not retained.
  void absorb(const MoveStats& other) {
    passes += other.passes;
    accepted_moves += other.accepted_moves;
    truncated_edges += other.truncated_edges;
    monotonicity_violations += other.monotonicity_violations;
    for (std::size_t k = 1; k < other.energy_trace.size(); ++k)
      if (other.energy_trace[k] > other.energy_trace[k - 1]) ++monotonicity_violations;
  }
};

struct MoveResult {
  Labeling labeling;
  MoveStats stats;
};

namespace detail {

// Adds the binary term with costs (A, B, C, D) between local nodes u and v.
inline void add_pair_term(FlowGraph& g, std::vector<double>& c1, int u, int v, double A, double B, double C,
                          double D, MoveStats& stats) {
  c1[static_cast<std::size_t>(u)] += C - A;
  c1[static_cast<std::size_t>(v)] += D - C;
  double coupling = B + C - A - D;
  if (coupling < 0.0) {
    if (coupling < -kSubmodularTolerance) ++stats.truncated_edges;
    coupling = 0.0;
  }
  if (coupling > 0.0) g.add_arc(u, v, coupling);
}

// Cost c0 goes with staying on the source side, c1 with the sink side.
inline void add_unaries(FlowGraph& g, std::span<const double> c0, std::span<const double> c1) {
  for (std::size_t v = 0; v < c0.size(); ++v) {
    const double diff = c1[v] - c0[v];
    if (diff > 0.0) {
      g.add_terminal_capacity(static_cast<int>(v), diff, 0.0);
    } else if (diff < 0.0) {
      g.add_terminal_capacity(static_cast<int>(v), 0.0, -diff);
    }
  }
}

inline bool accept(Labeling& f, Labeling&& candidate, double candidate_energy, double& current, MoveStats& stats) {
  if (!(candidate_energy < current - kAcceptTolerance)) return false;
  f = std::move(candidate);
  current = candidate_energy;
  ++stats.accepted_moves;
  stats.energy_trace.push_back(current);
  return true;
}

template <PairwiseEnergy E>
bool expansion_step(const E& e, Labeling& f, Label alpha, double& current, MoveStats& stats) {
  const int n = e.num_vars();
  bool movable = false;
  for (Label l : f) movable = movable || l != alpha;
  if (!movable) return false;

  std::vector<double> c0(static_cast<std::size_t>(n));
  std::vector<double> c1(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    c0[static_cast<std::size_t>(a)] = e.unary(a, f[static_cast<std::size_t>(a)]);
    c1[static_cast<std::size_t>(a)] = e.unary(a, alpha);
  }
  FlowGraph g(n);
  const std::span<const Edge> edges = e.edges();
  g.reserve_arcs(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const int a = edges[k].a;
    const int b = edges[k].b;
    const Label fa = f[static_cast<std::size_t>(a)];
    const Label fb = f[static_cast<std::size_t>(b)];
    if (fa == alpha && fb == alpha) continue;
    add_pair_term(g, c1, a, b, e.pairwise(k, fa, fb), e.pairwise(k, fa, alpha), e.pairwise(k, alpha, fb),
                  e.pairwise(k, alpha, alpha), stats);
  }
  add_unaries(g, c0, c1);

  const MaxFlowResult cut = max_flow(g);
  Labeling candidate = f;
  for (int a = 0; a < n; ++a)
    if (cut.side[static_cast<std::size_t>(a)] == Side::sink) candidate[static_cast<std::size_t>(a)] = alpha;
  if (candidate == f) return false;
  const double en = evaluate(e, candidate);
  return accept(f, std::move(candidate), en, current, stats);
}

template <PairwiseEnergy E>
bool swap_step(const E& e, Labeling& f, Label alpha, Label beta, double& current, MoveStats& stats) {
  const int n = e.num_vars();
  std::vector<int> local(static_cast<std::size_t>(n), -1);
  std::vector<int> members;
  for (int a = 0; a < n; ++a) {
    const Label l = f[static_cast<std::size_t>(a)];
    if (l == alpha || l == beta) {
      local[static_cast<std::size_t>(a)] = static_cast<int>(members.size());
      members.push_back(a);
    }
  }
  if (members.empty()) return false;

  const auto m = members.size();
  std::vector<double> c0(m);
  std::vector<double> c1(m);
  for (std::size_t v = 0; v < m; ++v) {
    c0[v] = e.unary(members[v], alpha);
    c1[v] = e.unary(members[v], beta);
  }
  FlowGraph g(static_cast<int>(m));
  const std::span<const Edge> edges = e.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const int la = local[static_cast<std::size_t>(edges[k].a)];
    const int lb = local[static_cast<std::size_t>(edges[k].b)];
    if (la < 0 && lb < 0) continue;
    if (la >= 0 && lb >= 0) {
      add_pair_term(g, c1, la, lb, e.pairwise(k, alpha, alpha), e.pairwise(k, alpha, beta),
                    e.pairwise(k, beta, alpha), e.pairwise(k, beta, beta), stats);
    } else if (la >= 0) {
      const Label fb = f[static_cast<std::size_t>(edges[k].b)];
      c0[static_cast<std::size_t>(la)] += e.pairwise(k, alpha, fb);
      c1[static_cast<std::size_t>(la)] += e.pairwise(k, beta, fb);
    } else {
      const Label fa = f[static_cast<std::size_t>(edges[k].a)];
      c0[static_cast<std::size_t>(lb)] += e.pairwise(k, fa, alpha);
      c1[static_cast<std::size_t>(lb)] += e.pairwise(k, fa, beta);
    }
  }
  add_unaries(g, c0, c1);

  const MaxFlowResult cut = max_flow(g);
  Labeling candidate = f;
  for (std::size_t v = 0; v < m; ++v)
    candidate[static_cast<std::size_t>(members[v])] = cut.side[v] == Side::sink ? beta : alpha;
  if (candidate == f) return false;
  const double en = evaluate(e, candidate);
  return accept(f, std::move(candidate), en, current, stats);
}

template <PairwiseEnergy E>
void check_total(const E& e, std::span<const Label> f) {
  if (f.size() != static_cast<std::size_t>(e.num_vars())) throw std::invalid_argument("labeling has wrong size");
  for (Label l : f)
    if (l < 0 || l >= e.num_labels()) throw std::out_of_range("labeling holds an out-of-range label");
}

}  // namespace detail

// One expansion move on alpha. Returns f unchanged unless the move strictly
// lowers the energy.
template <PairwiseEnergy E>
MoveResult expansion_move(const E& e, Labeling f, Label alpha) {
  detail::check_total(e, f);
  if (alpha < 0 || alpha >= e.num_labels()) throw std::out_of_range("expansion label out of range");
  MoveResult out;
  double current = evaluate(e, f);
  out.stats.energy_trace.push_back(current);
  detail::expansion_step(e, f, alpha, current, out.stats);
  out.labeling = std::move(f);
  return out;
}

// Sweeps alpha = 0..H-1 in ascending order, repeating full passes until a
// pass accepts no move.
template <PairwiseEnergy E>
MoveResult alpha_expansion(const E& e, Labeling f0) {
  detail::check_total(e, f0);
  MoveResult out;
  double current = evaluate(e, f0);
  out.stats.energy_trace.push_back(current);
  out.labeling = std::move(f0);
  if (e.num_labels() <= 1) return out;
  for (bool improved = true; improved;) {
    improved = false;
    ++out.stats.passes;
    for (Label alpha = 0; alpha < e.num_labels(); ++alpha)
      improved = detail::expansion_step(e, out.labeling, alpha, current, out.stats) || improved;
  }
  return out;
}

// Sweeps unordered label pairs (alpha < beta) in lexicographic order until a
// pass accepts no move.
template <PairwiseEnergy E>
MoveResult ab_swap(const E& e, Labeling f0) {
  detail::check_total(e, f0);
  MoveResult out;
  double current = evaluate(e, f0);
  out.stats.energy_trace.push_back(current);
  out.labeling = std::move(f0);
  if (e.num_labels() <= 1) return out;
  for (bool improved = true; improved;) {
    improved = false;
    ++out.stats.passes;
    for (Label alpha = 0; alpha < e.num_labels(); ++alpha)
      for (Label beta = alpha + 1; beta < e.num_labels(); ++beta)
        improved = detail::swap_step(e, out.labeling, alpha, beta, current, out.stats) || improved;
  }
  return out;
}

// Meta-problem whose label i at variable a stands for proposals[i][a];
// pairwise costs are measured with `distance` instead of the instance's own.
class FusionEnergy {
 public:
  FusionEnergy(const MrfInstance& inst, std::span<const Labeling> proposals, const DistanceFn& distance)
      : inst_(inst), proposals_(proposals), distance_(distance) {}

  int num_vars() const { return inst_.num_vars(); }
  int num_labels() const { return static_cast<int>(proposals_.size()); }
  double unary(int a, int i) const { return inst_.unary(a, pick(i, a)); }
  double pairwise(std::size_t k, int i, int j) const {
    const Edge& e = inst_.edges()[k];
    return e.w * distance_(pick(i, e.a), pick(j, e.b));
  }
  std::span<const Edge> edges() const { return inst_.edges(); }

  Labeling map_back(std::span<const Label> meta) const {
    Labeling out(meta.size());
    for (std::size_t a = 0; a < meta.size(); ++a) out[a] = pick(meta[a], static_cast<int>(a));
    return out;
  }

 private:
  Label pick(int i, int a) const {
    return proposals_[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
  }

  const MrfInstance& inst_;
  std::span<const Labeling> proposals_;
  const DistanceFn& distance_;
};

// Index of the lowest-energy proposal under `distance`; ties go to the
// smallest index.
inline std::size_t best_proposal(const MrfInstance& inst, std::span<const Labeling> proposals,
                                 const DistanceFn& distance) {
  const FusionEnergy meta(inst, proposals, distance);
  std::size_t best = 0;
  double best_energy = 0.0;
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const double en = evaluate(meta, Labeling(static_cast<std::size_t>(inst.num_vars()), static_cast<Label>(i)));
    if (i == 0 || en < best_energy) {
      best = i;
      best_energy = en;
    }
  }
  return best;
}

// Per-variable selection among proposals by alpha-expansion over proposal
// indices, started from the best single proposal. The energy trace is in
// terms of `distance`.
inline MoveResult fuse(const MrfInstance& inst, std::span<const Labeling> proposals, const DistanceFn& distance) {
  if (proposals.empty()) throw std::invalid_argument("fuse: needs at least one proposal");
  if (distance.num_labels() != inst.num_labels()) throw std::invalid_argument("fuse: distance label count mismatch");
  for (const Labeling& p : proposals) check_labeling(inst, p);
  const FusionEnergy meta(inst, proposals, distance);
  const std::size_t start = best_proposal(inst, proposals, distance);
  MoveResult result =
      alpha_expansion(meta, Labeling(static_cast<std::size_t>(inst.num_vars()), static_cast<Label>(start)));
  result.labeling = meta.map_back(result.labeling);
  return result;
}

}  // namespace hstcut
