#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hstcut/hst_tree.hpp"
#include "hstcut/label_matrix.hpp"

namespace hstcut {

enum class DistanceKind { truncated_linear, truncated_quadratic, uniform, matrix, tree };

inline const char* to_string(DistanceKind k) {
  switch (k) {
    case DistanceKind::truncated_linear: return "TRUNCLIN";
    case DistanceKind::truncated_quadratic: return "TRUNCQUAD";
    case DistanceKind::uniform: return "UNIFORM";
    case DistanceKind::matrix: return "MATRIX";
    case DistanceKind::tree: return "TREE";
  }
  return "?";
}

struct SemimetricViolation {
  int i;
  int j;
  std::string reason;
};

// Zero diagonal, symmetric, strictly positive off-diagonal; equality
// comparisons use an absolute tolerance of 1e-12.
inline std::optional<SemimetricViolation> validate_semimetric(const LabelMatrix& m) {
  constexpr double eps = 1e-12;
  const int h = m.size();
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < h; ++j) {
      const double v = m(i, j);
      if (!std::isfinite(v)) return SemimetricViolation{i, j, "non-finite entry"};
      if (i == j) {
        if (std::abs(v) > eps) return SemimetricViolation{i, j, "non-zero diagonal"};
        continue;
      }
      if (std::abs(v - m(j, i)) > eps) return SemimetricViolation{i, j, "asymmetric entry"};
      if (v <= eps) return SemimetricViolation{i, j, "non-positive off-diagonal entry"};
    }
  }
  return std::nullopt;
}

// Semi-metric over H labels. Every family is tabulated into a dense H x H
// table at construction; evaluation is a table lookup.
class DistanceFn {
 public:
  static DistanceFn truncated_linear(int num_labels, double m) {
    check_truncation(num_labels, m);
    DistanceFn d(DistanceKind::truncated_linear, num_labels);
    d.truncation_ = m;
    d.fill([m](int i, int j) { return std::min<double>(std::abs(i - j), m); });
    return d;
  }

  static DistanceFn truncated_quadratic(int num_labels, double m) {
    check_truncation(num_labels, m);
    DistanceFn d(DistanceKind::truncated_quadratic, num_labels);
    d.truncation_ = m;
    d.fill([m](int i, int j) {
      const double diff = static_cast<double>(i - j);
      return std::min(diff * diff, m);
    });
    return d;
  }

  static DistanceFn uniform(int num_labels) {
    DistanceFn d(DistanceKind::uniform, num_labels);
    d.fill([](int i, int j) { return i == j ? 0.0 : 1.0; });
    return d;
  }

  static DistanceFn matrix(LabelMatrix m) {
    if (auto bad = validate_semimetric(m))
      throw std::invalid_argument("distance matrix is not a semi-metric: " + bad->reason + " at (" +
                                  std::to_string(bad->i) + ", " + std::to_string(bad->j) + ")");
    DistanceFn d(DistanceKind::matrix, m.size());
    d.table_ = std::move(m);
    return d;
  }

  static DistanceFn tree(std::shared_ptr<const HstTree> t) {
    if (!t) throw std::invalid_argument("DistanceFn::tree: null tree");
    DistanceFn d(DistanceKind::tree, t->num_labels());
    d.table_ = t->distance_table();
    if (t->num_labels() > 1) {
      if (auto bad = validate_semimetric(d.table_))
        throw std::invalid_argument("tree metric is degenerate: " + bad->reason);
    }
    d.tree_ = std::move(t);
    return d;
  }
  static DistanceFn tree(HstTree t) { return tree(std::make_shared<const HstTree>(std::move(t))); }

  DistanceKind kind() const { return kind_; }
  int num_labels() const { return num_labels_; }
  double truncation() const { return truncation_; }
  const std::shared_ptr<const HstTree>& tree_ptr() const { return tree_; }
  const LabelMatrix& table() const { return table_; }

  double operator()(int i, int j) const { return table_(i, j); }

  double eval(int i, int j) const {
    if (i < 0 || j < 0 || i >= num_labels_ || j >= num_labels_)
      throw std::out_of_range("DistanceFn: label out of range");
    return table_(i, j);
  }

 private:
  DistanceFn(DistanceKind kind, int num_labels) : kind_(kind), num_labels_(num_labels) {
    if (num_labels < 1) throw std::invalid_argument("DistanceFn: needs at least one label");
  }

  static void check_truncation(int num_labels, double m) {
    if (num_labels > 1 && !(m > 0.0))
      throw std::invalid_argument("truncation factor must be positive for H > 1");
  }

  template <class F>
  void fill(F f) {
    table_ = LabelMatrix(num_labels_);
    for (int i = 0; i < num_labels_; ++i)
      for (int j = 0; j < num_labels_; ++j) table_(i, j) = f(i, j);
  }

  DistanceKind kind_;
  int num_labels_;
  double truncation_ = 0.0;
  LabelMatrix table_;
  std::shared_ptr<const HstTree> tree_;
};

// All-pairs shortest paths over the complete graph whose edge lengths are
// the matrix entries (Floyd-Warshall).
inline LabelMatrix metric_closure(const LabelMatrix& m) {
  LabelMatrix out = m;
  const int h = m.size();
  for (int k = 0; k < h; ++k)
    for (int i = 0; i < h; ++i) {
      const double dik = out(i, k);
      for (int j = 0; j < h; ++j) {
        const double via = dik + out(k, j);
        if (via < out(i, j)) out(i, j) = via;
      }
    }
  return out;
}

// Least constant satisfying d(i,j) - d(j,k) <= gamma * d(i,k) over all
// ordered triples, floored at 1.
inline double gamma(const LabelMatrix& d) {
  const int h = d.size();
  double g = 1.0;
  for (int i = 0; i < h; ++i)
    for (int k = 0; k < h; ++k) {
      const double dik = d(i, k);
      if (!(dik > 0.0)) continue;
      for (int j = 0; j < h; ++j) g = std::max(g, (d(i, j) - d(j, k)) / dik);
    }
  return g;
}

inline double gamma(const DistanceFn& d) { return gamma(d.table()); }

inline bool is_metric(const LabelMatrix& d, double tol = 1e-9) { return gamma(d) <= 1.0 + tol; }
inline bool is_metric(const DistanceFn& d, double tol = 1e-9) {
  if (d.kind() == DistanceKind::uniform || d.kind() == DistanceKind::truncated_linear ||
      d.kind() == DistanceKind::tree)
    return true;
  return is_metric(d.table(), tol);
}

}  // namespace hstcut
