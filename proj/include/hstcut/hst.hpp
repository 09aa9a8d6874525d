#pragma once

// Tree-metric approximation of label distances.
//
// frt_sample draws one dominating 2-HST by randomized hierarchical
// clustering: a random priority order over cluster centers and a random
// radius scale, both fixed across levels. embed_semimetric handles
// distances without the triangle inequality by clustering twice, the second
// time on the metric induced by the first tree. dp_solve picks the best of K
// such samples for a weighted sum of tree distances, and learn_mixture grows
// a weighted family of trees that reweights the pairs with the largest
// stretch.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hstcut/distances.hpp"
#include "hstcut/hst_tree.hpp"
#include "hstcut/label_matrix.hpp"
#include "hstcut/parallel.hpp"

namespace hstcut {

inline constexpr double kDefaultSeparation = 2.0;
inline constexpr double kDominationTolerance = 1e-9;
inline constexpr double kMixtureExponentClamp = 500.0;

using TreePtr = std::shared_ptr<const HstTree>;

// True iff d^t(i, j) >= d(i, j) - tol for all pairs.
inline bool dominates(const HstTree& t, const LabelMatrix& d, double tol = kDominationTolerance) {
  const int h = d.size();
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j)
      if (t.distance(i, j) < d(i, j) - tol * std::max(1.0, d(i, j))) return false;
  return true;
}

// Weighted family of trees; rho is a probability vector over trees.
class HstMixture {
 public:
  HstMixture(std::vector<TreePtr> trees, std::vector<double> rho, const DistanceFn* source = nullptr)
      : trees_(std::move(trees)), rho_(std::move(rho)) {
    if (trees_.empty()) throw std::invalid_argument("HstMixture: needs at least one tree");
    if (trees_.size() != rho_.size()) throw std::invalid_argument("HstMixture: one weight per tree required");
    double sum = 0.0;
    for (double r : rho_) {
      if (!(r >= 0.0)) throw std::invalid_argument("HstMixture: negative weight");
      sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("HstMixture: weights must sum to 1");
    const int h = trees_.front()->num_labels();
    for (const TreePtr& t : trees_) {
      if (!t || t->num_labels() != h) throw std::invalid_argument("HstMixture: trees over different label sets");
      if (source && !dominates(*t, source->table()))
        throw std::invalid_argument("HstMixture: tree does not dominate the source distance");
    }
  }

  std::size_t size() const { return trees_.size(); }
  int num_labels() const { return trees_.front()->num_labels(); }
  const std::vector<TreePtr>& trees() const { return trees_; }
  const HstTree& tree(std::size_t t) const { return *trees_[t]; }
  const std::vector<double>& rho() const { return rho_; }

  double expected_distance(int i, int j) const {
    double s = 0.0;
    for (std::size_t t = 0; t < trees_.size(); ++t) s += rho_[t] * trees_[t]->distance(i, j);
    return s;
  }

 private:
  std::vector<TreePtr> trees_;
  std::vector<double> rho_;
};

namespace detail {

// Randomized hierarchical clustering of all labels under d. Centers may be
// any label; a node whose labels all fall into one cluster at some radius is
// re-split at the next, smaller radius instead of creating a unary chain.
// Edge lengths are half the cluster diameter. With enforce_separation the
// lengths are then raised bottom-up where needed so that every internal
// child's length is at most its parent's divided by r.
inline HstTree frt_build(const LabelMatrix& d, std::uint64_t seed, bool enforce_separation, double r) {
  const int h = d.size();
  if (h == 1) return HstTree::single_leaf();

  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j)
      if (i != j) {
        dmin = std::min(dmin, d(i, j));
        dmax = std::max(dmax, d(i, j));
      }
  if (!(dmin > 0.0)) throw std::invalid_argument("frt: distance has a non-positive off-diagonal entry");

  // Scale so the smallest distance is 2 and take delta with 2^delta >= diameter.
  const double scale = 2.0 / dmin;
  const int delta = std::max(1, static_cast<int>(std::ceil(std::log2(dmax * scale) - 1e-12)));

  std::mt19937_64 rng(mix_seed(seed));
  std::vector<int> order(static_cast<std::size_t>(h));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  // beta in [1, 2] with density 1 / (x ln 2): beta = 2^U, U ~ U[0, 1].
  const double beta = std::exp2(std::uniform_real_distribution<double>(0.0, 1.0)(rng));

  std::vector<HstNode> nodes;
  struct Pending {
    int node;
    std::vector<int> labels;
    int level;
  };
  std::vector<Pending> work;
  nodes.push_back({});
  {
    std::vector<int> all(static_cast<std::size_t>(h));
    std::iota(all.begin(), all.end(), 0);
    work.push_back({0, std::move(all), 2});
  }

  auto diameter = [&](const std::vector<int>& labels) {
    double diam = 0.0;
    for (int i : labels)
      for (int j : labels) diam = std::max(diam, d(i, j));
    return diam;
  };

  while (!work.empty()) {
    Pending p = std::move(work.back());
    work.pop_back();
    const auto node_index = static_cast<std::size_t>(p.node);
    if (p.labels.size() == 1) {
      nodes[node_index].label = p.labels.front();
      continue;
    }
    nodes[node_index].child_edge_length = diameter(p.labels) / 2.0;

    // Children keyed by the priority rank of their center, in rank order.
    std::vector<std::pair<int, std::vector<int>>> clusters;
    int level = p.level;
    for (;; ++level) {
      const double radius = std::ldexp(beta, delta - level);
      clusters.clear();
      for (int i : p.labels) {
        int rank = 0;
        while (d(i, order[static_cast<std::size_t>(rank)]) * scale > radius) ++rank;
        auto it = std::find_if(clusters.begin(), clusters.end(), [rank](const auto& c) { return c.first == rank; });
        if (it == clusters.end()) {
          clusters.push_back({rank, {i}});
        } else {
          it->second.push_back(i);
        }
      }
      if (clusters.size() > 1) break;
    }
    std::sort(clusters.begin(), clusters.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto& [rank, labels] : clusters) {
      const int child = static_cast<int>(nodes.size());
      nodes.push_back({});
      nodes[node_index].children.push_back(child);
      work.push_back({child, std::move(labels), level + 1});
    }
  }

  if (enforce_separation) {
    // Children always have larger indices than their parent.
    for (std::size_t v = nodes.size(); v-- > 0;) {
      HstNode& n = nodes[v];
      for (int c : n.children) {
        const HstNode& child = nodes[static_cast<std::size_t>(c)];
        if (!child.children.empty()) n.child_edge_length = std::max(n.child_edge_length, r * child.child_edge_length);
      }
    }
  }
  return HstTree(std::move(nodes), 0, h);
}

}  // namespace detail

// Dominating r-HST for a metric distance. Throws if d violates the triangle
// inequality; use embed_semimetric for those.
inline HstTree frt_sample(const DistanceFn& d, std::uint64_t seed, double r = kDefaultSeparation) {
  if (!is_metric(d)) throw std::invalid_argument("frt_sample: distance is not a metric");
  return detail::frt_build(d.table(), seed, true, r);
}

// Two-stage embedding for semi-metrics: cluster d directly (the result is a
// dominating tree metric, though not an r-HST), then sample an r-HST of that
// tree metric.
inline HstTree embed_semimetric(const DistanceFn& d, std::uint64_t seed, double r = kDefaultSeparation) {
  const HstTree first = detail::frt_build(d.table(), seed, false, r);
  return detail::frt_build(first.distance_table(), derive_seed(seed, 0x5EC0Dull, 1), true, r);
}

inline std::uint64_t candidate_seed(std::uint64_t seed, std::size_t k) {
  return k == 0 ? seed : derive_seed(seed, 0xCA0D1DA7Eull, k);
}

inline double weighted_tree_cost(const LabelMatrix& y, const HstTree& t) {
  double s = 0.0;
  for (int i = 0; i < y.size(); ++i)
    for (int j = 0; j < y.size(); ++j)
      if (y(i, j) != 0.0) s += y(i, j) * t.distance(i, j);
  return s;
}

struct DpOptions {
  std::size_t samples = 64;
  double separation = kDefaultSeparation;
  unsigned threads = 1;
};

// Approximates min_t sum_ij y_ij d^t(i, j) over dominating trees by the best
// of K sampled embeddings (lowest candidate index wins ties).
inline HstTree dp_solve(const LabelMatrix& y, const DistanceFn& d, std::uint64_t seed, const DpOptions& opt = {}) {
  if (y.size() != d.num_labels()) throw std::invalid_argument("dp_solve: weight matrix size mismatch");
  if (opt.samples == 0) throw std::invalid_argument("dp_solve: needs at least one sample");
  if (d.num_labels() == 1) return HstTree::single_leaf();
  const bool metric = is_metric(d);
  std::vector<std::optional<HstTree>> candidates(opt.samples);
  std::vector<double> cost(opt.samples);
  parallel_for(opt.samples, opt.threads, [&](std::size_t k) {
    const std::uint64_t s = candidate_seed(seed, k);
    candidates[k] = metric ? detail::frt_build(d.table(), s, true, opt.separation)
                           : embed_semimetric(d, s, opt.separation);
    cost[k] = weighted_tree_cost(y, *candidates[k]);
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < opt.samples; ++k)
    if (cost[k] < cost[best]) best = k;
  return std::move(*candidates[best]);
}

// max over i != j of sum_t rho_t d^t(i, j) / d(i, j).
inline double distortion(const HstMixture& m, const DistanceFn& d) {
  double worst = 1.0;
  bool any = false;
  for (int i = 0; i < d.num_labels(); ++i)
    for (int j = 0; j < d.num_labels(); ++j) {
      if (i == j) continue;
      const double ratio = m.expected_distance(i, j) / d(i, j);
      worst = any ? std::max(worst, ratio) : ratio;
      any = true;
    }
  return any ? worst : 1.0;
}

// Mean over ordered pairs i != j of the expected stretch.
inline double mean_stretch(const HstMixture& m, const DistanceFn& d) {
  const int h = d.num_labels();
  if (h < 2) return 1.0;
  double sum = 0.0;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j)
      if (i != j) sum += m.expected_distance(i, j) / d(i, j);
  return sum / (static_cast<double>(h) * (h - 1));
}

struct MixtureOptions {
  std::size_t trees = 50;
  double lambda = 0.1;
  DpOptions dp{};
};

// Pair weights favouring label pairs with large current stretch:
// y_ij = exp(min(500, E[d^t(i,j)] / (lambda d(i,j)))) / d(i,j).
inline LabelMatrix stretch_weights(const std::vector<TreePtr>& trees, const std::vector<double>& rho,
                                   const DistanceFn& d, double lambda) {
  const int h = d.num_labels();
  LabelMatrix y(h);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j) {
      if (i == j) continue;
      double expected = 0.0;
      for (std::size_t t = 0; t < trees.size(); ++t) expected += rho[t] * trees[t]->distance(i, j);
      const double dij = d(i, j);
      y(i, j) = std::exp(std::min(kMixtureExponentClamp, expected / (lambda * dij))) / dij;
    }
  return y;
}

inline HstMixture learn_mixture(const DistanceFn& d, std::uint64_t seed, const MixtureOptions& opt = {}) {
  if (opt.trees == 0) throw std::invalid_argument("learn_mixture: needs at least one tree");
  if (!(opt.lambda > 0.0 && opt.lambda < 1.0)) throw std::invalid_argument("learn_mixture: lambda must be in (0, 1)");
  const int h = d.num_labels();
  LabelMatrix ones(h, 1.0);
  for (int i = 0; i < h; ++i) ones(i, i) = 0.0;

  std::vector<TreePtr> trees;
  std::vector<double> rho;
  trees.push_back(std::make_shared<const HstTree>(dp_solve(ones, d, derive_seed(seed, 0x7EEull, 0), opt.dp)));
  rho.push_back(1.0);
  while (trees.size() < opt.trees) {
    const LabelMatrix y = stretch_weights(trees, rho, d, opt.lambda);
    trees.push_back(std::make_shared<const HstTree>(dp_solve(y, d, derive_seed(seed, 0x7EEull, trees.size()), opt.dp)));
    for (double& r : rho) r *= 1.0 - opt.lambda;
    rho.push_back(opt.lambda);
  }
  // Renormalize away accumulated rounding.
  const double sum = std::accumulate(rho.begin(), rho.end(), 0.0);
  for (double& r : rho) r /= sum;
  return HstMixture(std::move(trees), std::move(rho), &d);
}

}  // namespace hstcut
