#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hstcut/label_matrix.hpp"

namespace hstcut {

// A node of a hierarchically well-separated tree. Internal nodes carry the
// length shared by all edges to their children; leaves carry a label.
struct HstNode {
  std::vector<int> children;
  double child_edge_length = 0.0;
  int label = -1;
};

// Rooted tree whose leaves biject onto the labels {0..H-1}. The induced
// leaf-to-leaf path metric is tabulated at construction, so distance
// queries are O(1).
class HstTree {
 public:
  HstTree(std::vector<HstNode> nodes, int root, int num_labels)
      : nodes_(std::move(nodes)), root_(root), num_labels_(num_labels) {
    validate_shape();
    tabulate();
  }

  // The one-label tree: a single leaf.
  static HstTree single_leaf() { return HstTree({HstNode{{}, 0.0, 0}}, 0, 1); }

  int num_labels() const { return num_labels_; }
  int root() const { return root_; }
  const std::vector<HstNode>& nodes() const { return nodes_; }
  const HstNode& node(int v) const { return nodes_[static_cast<std::size_t>(v)]; }
  int parent(int v) const { return parent_[static_cast<std::size_t>(v)]; }
  int leaf_of(int label) const { return leaf_of_[static_cast<std::size_t>(label)]; }

  double distance(int i, int j) const { return table_(i, j); }
  const LabelMatrix& distance_table() const { return table_; }

  // Labels in the subtree rooted at v, in left-to-right leaf order.
  std::vector<int> labels_below(int v) const {
    std::vector<int> out;
    std::vector<int> stack{v};
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      const HstNode& n = node(u);
      if (n.children.empty()) {
        out.push_back(n.label);
      } else {
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
      }
    }
    return out;
  }

  // Checks the r-HST structure: edge lengths non-negative and, along every
  // root-to-leaf path, each internal child's edge length is at most its
  // parent's divided by r (up to tol). Returns a description of the first
  // violation found.
  std::optional<std::string> check_hst(double r, double tol = 1e-9) const {
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
      const HstNode& n = nodes_[v];
      if (n.children.empty()) continue;
      if (!(n.child_edge_length >= 0.0)) return "node " + std::to_string(v) + " has a negative edge length";
      for (int c : n.children) {
        const HstNode& child = node(c);
        if (child.children.empty()) continue;
        if (child.child_edge_length * r > n.child_edge_length + tol * std::max(1.0, n.child_edge_length))
          return "edge length ratio below r between node " + std::to_string(v) + " and child " +
                 std::to_string(c);
      }
    }
    return std::nullopt;
  }

 private:
  void validate_shape() {
    if (num_labels_ < 1) throw std::invalid_argument("HstTree: needs at least one label");
    const int n = static_cast<int>(nodes_.size());
    if (root_ < 0 || root_ >= n) throw std::invalid_argument("HstTree: root index out of range");
    parent_.assign(nodes_.size(), -1);
    leaf_of_.assign(static_cast<std::size_t>(num_labels_), -1);
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<int> stack{root_};
    seen[static_cast<std::size_t>(root_)] = 1;
    int reached = 0;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      ++reached;
      const HstNode& nd = nodes_[static_cast<std::size_t>(v)];
      if (nd.children.empty()) {
        if (nd.label < 0 || nd.label >= num_labels_)
          throw std::invalid_argument("HstTree: leaf without a valid label");
        auto& slot = leaf_of_[static_cast<std::size_t>(nd.label)];
        if (slot != -1) throw std::invalid_argument("HstTree: label " + std::to_string(nd.label) + " appears twice");
        slot = v;
        continue;
      }
      if (nd.label != -1) throw std::invalid_argument("HstTree: internal node carries a label");
      if (!(nd.child_edge_length >= 0.0) || !std::isfinite(nd.child_edge_length))
        throw std::invalid_argument("HstTree: invalid edge length");
      for (int c : nd.children) {
        if (c < 0 || c >= n) throw std::invalid_argument("HstTree: child index out of range");
        if (seen[static_cast<std::size_t>(c)]) throw std::invalid_argument("HstTree: node reached twice");
        seen[static_cast<std::size_t>(c)] = 1;
        parent_[static_cast<std::size_t>(c)] = v;
        stack.push_back(c);
      }
    }
    if (reached != n) throw std::invalid_argument("HstTree: unreachable nodes");
    for (int k = 0; k < num_labels_; ++k) {
      if (leaf_of_[static_cast<std::size_t>(k)] == -1)
        throw std::invalid_argument("HstTree: label " + std::to_string(k) + " has no leaf");
    }
  }

  // Path sums are accumulated edge by edge from each leaf up to the lowest
  // common ancestor, so integral trees give exact distances.
  void tabulate() {
    depth_.assign(nodes_.size(), 0);
    std::vector<int> order{root_};
    for (std::size_t k = 0; k < order.size(); ++k) {
      const int v = order[k];
      for (int c : node(v).children) {
        depth_[static_cast<std::size_t>(c)] = depth_[static_cast<std::size_t>(v)] + 1;
        order.push_back(c);
      }
    }
    table_ = LabelMatrix(num_labels_);
    for (int i = 0; i < num_labels_; ++i) {
      for (int j = i + 1; j < num_labels_; ++j) {
        int u = leaf_of(i);
        int w = leaf_of(j);
        double sum_u = 0.0;
        double sum_w = 0.0;
        while (depth_[static_cast<std::size_t>(u)] > depth_[static_cast<std::size_t>(w)]) {
          u = parent(u);
          sum_u += node(u).child_edge_length;
        }
        while (depth_[static_cast<std::size_t>(w)] > depth_[static_cast<std::size_t>(u)]) {
          w = parent(w);
          sum_w += node(w).child_edge_length;
        }
        while (u != w) {
          u = parent(u);
          w = parent(w);
          sum_u += node(u).child_edge_length;
          sum_w += node(w).child_edge_length;
        }
        table_(i, j) = table_(j, i) = sum_u + sum_w;
      }
    }
  }

  std::vector<HstNode> nodes_;
  int root_;
  int num_labels_;
  std::vector<int> parent_;
  std::vector<int> leaf_of_;
  std::vector<int> depth_;
  LabelMatrix table_;
};

inline double tree_distance(const HstTree& t, int i, int j) {
  if (i < 0 || j < 0 || i >= t.num_labels() || j >= t.num_labels())
    throw std::out_of_range("tree_distance: label out of range");
  return t.distance(i, j);
}

}  // namespace hstcut
