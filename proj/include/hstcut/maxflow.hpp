#pragma once

// Max-flow / min-st-cut on sparse capacitated graphs.
//
// The solver follows Boykov & Kolmogorov's augmenting-path scheme: two search
// trees grow from the terminals, paths are augmented when the trees touch, and
// orphaned subtrees are re-adopted. After termination the cut is read off the
// residual graph: a node lies on the source side iff it is reachable from the
// source through arcs with positive residual capacity. That choice makes the
// returned partition canonical (the unique minimal source set).

#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hstcut {

enum class Side : std::uint8_t { source, sink };

struct FlowArc {
  int tail;
  int head;
  double capacity;
};

class FlowGraph {
 public:
  explicit FlowGraph(int node_count)
      : node_count_(node_count),
        source_cap_(static_cast<std::size_t>(node_count), 0.0),
        sink_cap_(static_cast<std::size_t>(node_count), 0.0) {
    if (node_count < 0) throw std::invalid_argument("FlowGraph: negative node count");
  }

  int node_count() const { return node_count_; }

  // Terminal capacities accumulate over repeated calls.
  void add_terminal_capacity(int node, double source_cap, double sink_cap) {
    check_node(node);
    check_capacity(source_cap);
    check_capacity(sink_cap);
    source_cap_[static_cast<std::size_t>(node)] += source_cap;
    sink_cap_[static_cast<std::size_t>(node)] += sink_cap;
  }

  void add_arc(int tail, int head, double capacity) {
    check_node(tail);
    check_node(head);
    check_capacity(capacity);
    if (tail == head) throw std::invalid_argument("FlowGraph: self-loop arc");
    arcs_.push_back({tail, head, capacity});
  }

  void reserve_arcs(std::size_t n) { arcs_.reserve(n); }

  double source_capacity(int node) const { return source_cap_[static_cast<std::size_t>(node)]; }
  double sink_capacity(int node) const { return sink_cap_[static_cast<std::size_t>(node)]; }
  std::span<const FlowArc> arcs() const { return arcs_; }

 private:
  void check_node(int node) const {
    if (node < 0 || node >= node_count_)
      throw std::out_of_range("FlowGraph: node index " + std::to_string(node) + " out of range");
  }
  static void check_capacity(double c) {
    if (!(c >= 0.0)) throw std::invalid_argument("FlowGraph: negative or NaN capacity");
  }

  int node_count_;
  std::vector<double> source_cap_;
  std::vector<double> sink_cap_;
  std::vector<FlowArc> arcs_;
};

struct MaxFlowResult {
  double flow = 0.0;
  std::vector<Side> side;
};

// Capacity of the st-cut induced by `side` on the original capacities.
inline double cut_capacity(const FlowGraph& g, std::span<const Side> side) {
  double total = 0.0;
  for (int v = 0; v < g.node_count(); ++v) {
    total += side[static_cast<std::size_t>(v)] == Side::source ? g.sink_capacity(v) : g.source_capacity(v);
  }
  for (const FlowArc& a : g.arcs()) {
    if (side[static_cast<std::size_t>(a.tail)] == Side::source &&
        side[static_cast<std::size_t>(a.head)] == Side::sink)
      total += a.capacity;
  }
  return total;
}

namespace detail {

class BkSolver {
 public:
  explicit BkSolver(const FlowGraph& g) : n_(g.node_count()) {
    const auto n = static_cast<std::size_t>(n_);
    first_.assign(n, kNone);
    parent_.assign(n, kNone);
    in_sink_.assign(n, 0);
    queued_.assign(n, 0);
    ts_.assign(n, 0);
    dist_.assign(n, 0);
    tr_.resize(n);

    const auto arcs = g.arcs();
    head_.resize(2 * arcs.size());
    next_.resize(2 * arcs.size());
    rcap_.resize(2 * arcs.size());
    for (std::size_t k = 0; k < arcs.size(); ++k) {
      const int fwd = static_cast<int>(2 * k);
      link(fwd, arcs[k].tail, arcs[k].head, arcs[k].capacity);
      link(fwd + 1, arcs[k].head, arcs[k].tail, 0.0);
    }
    for (int v = 0; v < n_; ++v) {
      const double s = g.source_capacity(v);
      const double t = g.sink_capacity(v);
      flow_ += s < t ? s : t;
      tr_[static_cast<std::size_t>(v)] = s - t;
    }
  }

  MaxFlowResult run() {
    for (int v = 0; v < n_; ++v) {
      const double tr = tr_[static_cast<std::size_t>(v)];
      if (tr > 0.0) {
        seed_terminal(v, false);
      } else if (tr < 0.0) {
        seed_terminal(v, true);
      }
    }

    for (;;) {
      const int i = pop_active();
      if (i == kNone) break;
      const int middle = grow(i);
      ++time_;
      if (middle != kNone) {
        queued_[static_cast<std::size_t>(i)] = 1;
        active_.push_front(i);
        augment(middle);
        adopt_orphans();
      }
    }
    return {flow_, residual_cut()};
  }

 private:
  static constexpr int kNone = -1;
  static constexpr int kTerminal = -2;
  static constexpr int kOrphan = -3;
  static constexpr int kInfiniteDist = std::numeric_limits<int>::max();

  void link(int arc, int tail, int head, double cap) {
    head_[static_cast<std::size_t>(arc)] = head;
    rcap_[static_cast<std::size_t>(arc)] = cap;
    next_[static_cast<std::size_t>(arc)] = first_[static_cast<std::size_t>(tail)];
    first_[static_cast<std::size_t>(tail)] = arc;
  }

  void seed_terminal(int v, bool sink) {
    const auto u = static_cast<std::size_t>(v);
    parent_[u] = kTerminal;
    in_sink_[u] = sink ? 1 : 0;
    ts_[u] = 0;
    dist_[u] = 1;
    set_active(v);
  }

  void set_active(int v) {
    auto& q = queued_[static_cast<std::size_t>(v)];
    if (!q) {
      q = 1;
      active_.push_back(v);
    }
  }

  int pop_active() {
    while (!active_.empty()) {
      const int v = active_.front();
      active_.pop_front();
      queued_[static_cast<std::size_t>(v)] = 0;
      if (parent_[static_cast<std::size_t>(v)] != kNone) return v;
    }
    return kNone;
  }

  int tail_of(int arc) const { return head_[static_cast<std::size_t>(arc ^ 1)]; }

  // Expands the tree containing i; returns the source-to-sink arc joining the
  // two trees if one is found.
  int grow(int i) {
    const auto ui = static_cast<std::size_t>(i);
    const bool sink_tree = in_sink_[ui] != 0;
    for (int a = first_[ui]; a != kNone; a = next_[static_cast<std::size_t>(a)]) {
      const double r = sink_tree ? rcap_[static_cast<std::size_t>(a ^ 1)] : rcap_[static_cast<std::size_t>(a)];
      if (!(r > 0.0)) continue;
      const int j = head_[static_cast<std::size_t>(a)];
      const auto uj = static_cast<std::size_t>(j);
      if (parent_[uj] == kNone) {
        in_sink_[uj] = sink_tree ? 1 : 0;
        parent_[uj] = a ^ 1;
        ts_[uj] = ts_[ui];
        dist_[uj] = dist_[ui] + 1;
        set_active(j);
      } else if ((in_sink_[uj] != 0) != sink_tree) {
        return sink_tree ? (a ^ 1) : a;
      } else if (ts_[uj] <= ts_[ui] && dist_[uj] > dist_[ui]) {
        parent_[uj] = a ^ 1;
        ts_[uj] = ts_[ui];
        dist_[uj] = dist_[ui] + 1;
      }
    }
    return kNone;
  }

  void make_orphan(int v) {
    parent_[static_cast<std::size_t>(v)] = kOrphan;
    orphans_.push_back(v);
  }

  void augment(int middle) {
    double bottleneck = rcap_[static_cast<std::size_t>(middle)];
    for (int i = tail_of(middle);;) {
      const int a = parent_[static_cast<std::size_t>(i)];
      if (a == kTerminal) {
        bottleneck = std::min(bottleneck, tr_[static_cast<std::size_t>(i)]);
        break;
      }
      bottleneck = std::min(bottleneck, rcap_[static_cast<std::size_t>(a ^ 1)]);
      i = head_[static_cast<std::size_t>(a)];
    }
    for (int i = head_[static_cast<std::size_t>(middle)];;) {
      const int a = parent_[static_cast<std::size_t>(i)];
      if (a == kTerminal) {
        bottleneck = std::min(bottleneck, -tr_[static_cast<std::size_t>(i)]);
        break;
      }
      bottleneck = std::min(bottleneck, rcap_[static_cast<std::size_t>(a)]);
      i = head_[static_cast<std::size_t>(a)];
    }

    rcap_[static_cast<std::size_t>(middle ^ 1)] += bottleneck;
    rcap_[static_cast<std::size_t>(middle)] -= bottleneck;

    for (int i = tail_of(middle);;) {
      const int a = parent_[static_cast<std::size_t>(i)];
      if (a == kTerminal) {
        auto& tr = tr_[static_cast<std::size_t>(i)];
        tr -= bottleneck;
        if (!(tr > 0.0)) make_orphan(i);
        break;
      }
      rcap_[static_cast<std::size_t>(a)] += bottleneck;
      auto& r = rcap_[static_cast<std::size_t>(a ^ 1)];
      r -= bottleneck;
      const int up = head_[static_cast<std::size_t>(a)];
      if (!(r > 0.0)) make_orphan(i);
      i = up;
    }
    for (int i = head_[static_cast<std::size_t>(middle)];;) {
      const int a = parent_[static_cast<std::size_t>(i)];
      if (a == kTerminal) {
        auto& tr = tr_[static_cast<std::size_t>(i)];
        tr += bottleneck;
        if (!(tr < 0.0)) make_orphan(i);
        break;
      }
      rcap_[static_cast<std::size_t>(a ^ 1)] += bottleneck;
      auto& r = rcap_[static_cast<std::size_t>(a)];
      r -= bottleneck;
      const int up = head_[static_cast<std::size_t>(a)];
      if (!(r > 0.0)) make_orphan(i);
      i = up;
    }
    flow_ += bottleneck;
  }

  void adopt_orphans() {
    while (!orphans_.empty()) {
      const int i = orphans_.front();
      orphans_.pop_front();
      adopt(i);
    }
  }

  void adopt(int i) {
    const auto ui = static_cast<std::size_t>(i);
    const bool sink_tree = in_sink_[ui] != 0;
    int best_arc = kNone;
    int best_dist = kInfiniteDist;

    for (int a0 = first_[ui]; a0 != kNone; a0 = next_[static_cast<std::size_t>(a0)]) {
      // Residual direction towards i for the source tree, away from i for the sink tree.
      const double r = sink_tree ? rcap_[static_cast<std::size_t>(a0)] : rcap_[static_cast<std::size_t>(a0 ^ 1)];
      if (!(r > 0.0)) continue;
      int j = head_[static_cast<std::size_t>(a0)];
      if ((in_sink_[static_cast<std::size_t>(j)] != 0) != sink_tree) continue;
      if (parent_[static_cast<std::size_t>(j)] == kNone) continue;

      int d = 0;
      for (;;) {
        const auto uj = static_cast<std::size_t>(j);
        if (ts_[uj] == time_) {
          d += dist_[uj];
          break;
        }
        const int a = parent_[uj];
        ++d;
        if (a == kTerminal) {
          ts_[uj] = time_;
          dist_[uj] = 1;
          break;
        }
        if (a == kOrphan) {
          d = kInfiniteDist;
          break;
        }
        j = head_[static_cast<std::size_t>(a)];
      }
      if (d == kInfiniteDist) continue;
      if (d < best_dist) {
        best_arc = a0;
        best_dist = d;
      }
      for (j = head_[static_cast<std::size_t>(a0)]; ts_[static_cast<std::size_t>(j)] != time_;
           j = head_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(j)])]) {
        ts_[static_cast<std::size_t>(j)] = time_;
        dist_[static_cast<std::size_t>(j)] = d--;
      }
    }

    if (best_arc != kNone) {
      parent_[ui] = best_arc;
      ts_[ui] = time_;
      dist_[ui] = best_dist + 1;
      return;
    }

    for (int a0 = first_[ui]; a0 != kNone; a0 = next_[static_cast<std::size_t>(a0)]) {
      const int j = head_[static_cast<std::size_t>(a0)];
      const auto uj = static_cast<std::size_t>(j);
      if ((in_sink_[uj] != 0) != sink_tree) continue;
      const int a = parent_[uj];
      if (a == kNone) continue;
      const double r = sink_tree ? rcap_[static_cast<std::size_t>(a0)] : rcap_[static_cast<std::size_t>(a0 ^ 1)];
      if (r > 0.0) set_active(j);
      if (a != kTerminal && a != kOrphan && head_[static_cast<std::size_t>(a)] == i) make_orphan(j);
    }
    parent_[ui] = kNone;
  }

  std::vector<Side> residual_cut() const {
    std::vector<Side> side(static_cast<std::size_t>(n_), Side::sink);
    std::vector<int> stack;
    for (int v = 0; v < n_; ++v) {
      if (tr_[static_cast<std::size_t>(v)] > 0.0) {
        side[static_cast<std::size_t>(v)] = Side::source;
        stack.push_back(v);
      }
    }
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int a = first_[static_cast<std::size_t>(v)]; a != kNone; a = next_[static_cast<std::size_t>(a)]) {
        const int w = head_[static_cast<std::size_t>(a)];
        if (rcap_[static_cast<std::size_t>(a)] > 0.0 && side[static_cast<std::size_t>(w)] == Side::sink) {
          side[static_cast<std::size_t>(w)] = Side::source;
          stack.push_back(w);
        }
      }
    }
    return side;
  }

  int n_;
  double flow_ = 0.0;
  int time_ = 0;

  std::vector<int> first_;
  std::vector<int> parent_;
  std::vector<std::uint8_t> in_sink_;
  std::vector<std::uint8_t> queued_;
  std::vector<int> ts_;
  std::vector<int> dist_;
  std::vector<double> tr_;

  std::vector<int> head_;
  std::vector<int> next_;
  std::vector<double> rcap_;

  std::deque<int> active_;
  std::deque<int> orphans_;
};

}  // namespace detail

inline MaxFlowResult max_flow(const FlowGraph& graph) { return detail::BkSolver(graph).run(); }

}  // namespace hstcut
