#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hstcut/distances.hpp"

namespace hstcut {

using Label = int;
using Labeling = std::vector<Label>;

struct Edge {
  int a;
  int b;
  double w;

  bool operator==(const Edge&) const = default;
};

// Pairwise MRF with semi-metric pairwise potentials w_ab * d(i, j).
// Immutable after construction.
class MrfInstance {
 public:
  MrfInstance(int num_vars, int num_labels, std::vector<double> unary, std::vector<Edge> edges,
              DistanceFn distance)
      : num_vars_(num_vars),
        num_labels_(num_labels),
        unary_(std::move(unary)),
        edges_(std::move(edges)),
        distance_(std::move(distance)) {
    if (num_vars < 0) throw std::invalid_argument("MrfInstance: negative variable count");
    if (num_labels < 1) throw std::invalid_argument("MrfInstance: needs at least one label");
    if (unary_.size() != static_cast<std::size_t>(num_vars) * num_labels)
      throw std::invalid_argument("MrfInstance: unary table must be N x H");
    if (distance_.num_labels() != num_labels)
      throw std::invalid_argument("MrfInstance: distance label count differs from H");
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : edges_) {
      if (e.a < 0 || e.b >= num_vars || e.a >= e.b)
        throw std::invalid_argument("MrfInstance: edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) +
                                    ") must satisfy 0 <= a < b < N");
      if (!(e.w >= 0.0)) throw std::invalid_argument("MrfInstance: negative edge weight");
      if (!seen.emplace(e.a, e.b).second)
        throw std::invalid_argument("MrfInstance: duplicate edge (" + std::to_string(e.a) + ", " +
                                    std::to_string(e.b) + ")");
    }
  }

  int num_vars() const { return num_vars_; }
  int num_labels() const { return num_labels_; }
  double unary(int a, int i) const { return unary_[static_cast<std::size_t>(a) * num_labels_ + i]; }
  std::span<const double> unary_row(int a) const {
    return {unary_.data() + static_cast<std::size_t>(a) * num_labels_, static_cast<std::size_t>(num_labels_)};
  }
  std::span<const double> unary_table() const { return unary_; }
  std::span<const Edge> edges() const { return edges_; }
  const DistanceFn& distance() const { return distance_; }

  double pairwise(std::size_t k, int i, int j) const { return edges_[k].w * distance_(i, j); }

  // Same graph and unaries, different pairwise distance.
  MrfInstance with_distance(DistanceFn d) const {
    return MrfInstance(num_vars_, num_labels_, unary_, edges_, std::move(d));
  }

 private:
  int num_vars_;
  int num_labels_;
  std::vector<double> unary_;
  std::vector<Edge> edges_;
  DistanceFn distance_;
};

inline void check_labeling(const MrfInstance& inst, std::span<const Label> f) {
  if (f.size() != static_cast<std::size_t>(inst.num_vars()))
    throw std::invalid_argument("labeling size " + std::to_string(f.size()) + " differs from N = " +
                                std::to_string(inst.num_vars()));
  for (std::size_t a = 0; a < f.size(); ++a) {
    if (f[a] < 0 || f[a] >= inst.num_labels())
      throw std::out_of_range("label " + std::to_string(f[a]) + " of variable " + std::to_string(a) +
                              " out of range");
  }
}

// Gibbs energy: sum of unaries plus weighted pairwise distances.
inline double energy(const MrfInstance& inst, std::span<const Label> f) {
  check_labeling(inst, f);
  double total = 0.0;
  for (int a = 0; a < inst.num_vars(); ++a) total += inst.unary(a, f[static_cast<std::size_t>(a)]);
  const auto& d = inst.distance();
  for (const Edge& e : inst.edges())
    total += e.w * d(f[static_cast<std::size_t>(e.a)], f[static_cast<std::size_t>(e.b)]);
  return total;
}

// 4-connected rows x cols grid edges with constant weight, row-major variables.
inline std::vector<Edge> grid_edges(int rows, int cols, double w) {
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(2 * rows * cols));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) edges.push_back({v, v + 1, w});
      if (r + 1 < rows) edges.push_back({v, v + cols, w});
    }
  return edges;
}

}  // namespace hstcut
