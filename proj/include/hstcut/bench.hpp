#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hstcut/distances.hpp"
#include "hstcut/hst_tree.hpp"
#include "hstcut/moves.hpp"
#include "hstcut/mrf.hpp"
#include "hstcut/parallel.hpp"
#include "hstcut/solver.hpp"

namespace hstcut {

enum class SyntheticCase { truncated_linear, truncated_quadratic, random_hst, general_metric, general_semimetric };

inline constexpr SyntheticCase kAllCases[] = {SyntheticCase::truncated_linear, SyntheticCase::truncated_quadratic,
                                              SyntheticCase::random_hst, SyntheticCase::general_metric,
                                              SyntheticCase::general_semimetric};

inline const char* case_name(SyntheticCase c) {
  switch (c) {
    case SyntheticCase::truncated_linear: return "i";
    case SyntheticCase::truncated_quadratic: return "ii";
    case SyntheticCase::random_hst: return "iii";
    case SyntheticCase::general_metric: return "iv";
    case SyntheticCase::general_semimetric: return "v";
  }
  return "?";
}

inline std::optional<SyntheticCase> parse_case(const std::string& s) {
  for (SyntheticCase c : kAllCases)
    if (s == case_name(c)) return c;
  return std::nullopt;
}

struct SyntheticSpec {
  SyntheticCase kind = SyntheticCase::truncated_linear;
  int rows = 20;
  int cols = 20;
  int labels = 8;
  double unary_lo = 0.0;
  double unary_hi = 10.0;
  double edge_weight = 1.0;
  std::uint64_t seed = 0;
};

namespace detail {

// Uniform on (0, hi]; keeps sampled lengths strictly positive.
inline double positive_uniform(std::mt19937_64& rng, double hi) {
  return hi * (1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng));
}

// Random hierarchical clustering: each cluster splits into 2..4 random
// contiguous parts of a shuffled label order. Root edges ~ (0, 10], deeper
// edges ~ (0, parent / r].
inline HstTree random_hst(int num_labels, std::mt19937_64& rng, double r = 2.0, double root_max = 10.0) {
  if (num_labels == 1) return HstTree::single_leaf();
  std::vector<int> order(static_cast<std::size_t>(num_labels));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<HstNode> nodes;
  struct Pending {
    int node;
    int lo;
    int hi;
    double max_len;
  };
  std::vector<Pending> work{{0, 0, num_labels, root_max}};
  nodes.push_back({});
  while (!work.empty()) {
    const Pending p = work.back();
    work.pop_back();
    const auto idx = static_cast<std::size_t>(p.node);
    const int size = p.hi - p.lo;
    if (size == 1) {
      nodes[idx].label = order[static_cast<std::size_t>(p.lo)];
      continue;
    }
    const double len = positive_uniform(rng, p.max_len);
    nodes[idx].child_edge_length = len;
    const int parts = std::uniform_int_distribution<int>(2, std::min(size, 4))(rng);
    // parts - 1 distinct cut points in (lo, hi).
    std::vector<int> cuts(static_cast<std::size_t>(size - 1));
    std::iota(cuts.begin(), cuts.end(), p.lo + 1);
    std::shuffle(cuts.begin(), cuts.end(), rng);
    cuts.resize(static_cast<std::size_t>(parts - 1));
    std::sort(cuts.begin(), cuts.end());
    int start = p.lo;
    cuts.push_back(p.hi);
    for (int end : cuts) {
      const int child = static_cast<int>(nodes.size());
      nodes.push_back({});
      nodes[idx].children.push_back(child);
      work.push_back({child, start, end, len / r});
      start = end;
    }
  }
  return HstTree(std::move(nodes), 0, num_labels);
}

}  // namespace detail

// Grid MRF with i.i.d. uniform unaries and a random distance of the
// requested family.
inline MrfInstance gen_synthetic(const SyntheticSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1 || spec.labels < 1) throw std::invalid_argument("gen_synthetic: bad sizes");
  if (!(spec.unary_hi > spec.unary_lo) || !(spec.edge_weight >= 0.0))
    throw std::invalid_argument("gen_synthetic: bad ranges");
  std::mt19937_64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(spec.kind), 0x5A7ull));
  const int n = spec.rows * spec.cols;
  const int h = spec.labels;
  std::uniform_real_distribution<double> unary_dist(spec.unary_lo, spec.unary_hi);
  std::vector<double> unary(static_cast<std::size_t>(n) * h);
  for (double& u : unary) u = unary_dist(rng);

  auto random_symmetric = [&] {
    LabelMatrix m(h);
    for (int i = 0; i < h; ++i)
      for (int j = i + 1; j < h; ++j) m(i, j) = m(j, i) = detail::positive_uniform(rng, 10.0);
    return m;
  };

  std::optional<DistanceFn> d;
  switch (spec.kind) {
    case SyntheticCase::truncated_linear:
      d = DistanceFn::truncated_linear(h, detail::positive_uniform(rng, 10.0));
      break;
    case SyntheticCase::truncated_quadratic:
      d = DistanceFn::truncated_quadratic(h, detail::positive_uniform(rng, 10.0));
      break;
    case SyntheticCase::random_hst:
      d = DistanceFn::tree(detail::random_hst(h, rng));
      break;
    case SyntheticCase::general_metric:
      d = DistanceFn::matrix(metric_closure(random_symmetric()));
      break;
    case SyntheticCase::general_semimetric:
      d = DistanceFn::matrix(random_symmetric());
      break;
  }
  return MrfInstance(n, h, std::move(unary), grid_edges(spec.rows, spec.cols, spec.edge_weight), std::move(*d));
}

struct MapResult {
  Labeling labeling;
  double energy;
};

inline constexpr double kBruteForceLimit = 1e7;

// Exhaustive minimum of the energy; ties resolved lexicographically.
inline MapResult brute_force_map(const MrfInstance& inst) {
  const int n = inst.num_vars();
  const int h = inst.num_labels();
  if (std::pow(static_cast<double>(h), n) > kBruteForceLimit)
    throw std::invalid_argument("brute_force_map: H^N exceeds the enumeration limit");
  Labeling f(static_cast<std::size_t>(n), 0);
  MapResult best{f, energy(inst, f)};
  for (;;) {
    int a = n - 1;
    while (a >= 0 && f[static_cast<std::size_t>(a)] == h - 1) f[static_cast<std::size_t>(a--)] = 0;
    if (a < 0) break;
    ++f[static_cast<std::size_t>(a)];
    const double en = energy(inst, f);
    if (en < best.energy) best = {f, en};
  }
  return best;
}

enum class Algorithm { alpha_expansion, ab_swap, ours, ours_refine };

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::alpha_expansion: return "alpha-exp";
    case Algorithm::ab_swap: return "ab-swap";
    case Algorithm::ours: return "ours";
    case Algorithm::ours_refine: return "ours+refine";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& s) {
  for (Algorithm a : {Algorithm::alpha_expansion, Algorithm::ab_swap, Algorithm::ours, Algorithm::ours_refine})
    if (s == algorithm_name(a)) return a;
  return std::nullopt;
}

struct BenchRow {
  SyntheticCase kind = SyntheticCase::truncated_linear;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::ours;
  double energy = 0.0;
  double seconds = 0.0;
  std::optional<double> distortion;
  Labeling labeling;
  // Re-evaluation of the stored labeling agreed with `energy`.
  bool energy_verified = false;
  long monotonicity_violations = 0;
  std::vector<double> refine_trace;
  std::string error;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  // Mean energy per (case, algorithm) over rows without errors.
  double mean_energy(SyntheticCase c, Algorithm a) const { return mean(c, a, &BenchRow::energy); }
  double mean_seconds(SyntheticCase c, Algorithm a) const { return mean(c, a, &BenchRow::seconds); }

  std::string to_csv() const {
    std::ostringstream os;
    os << "case,seed,algorithm,energy,seconds,distortion\n";
    os << std::setprecision(17);
    for (const BenchRow& r : rows) {
      os << case_name(r.kind) << ',' << r.seed << ',' << algorithm_name(r.algorithm) << ',';
      if (r.error.empty()) os << r.energy;
      os << ',' << std::setprecision(6) << r.seconds << std::setprecision(17) << ',';
      if (r.distortion) os << *r.distortion;
      os << '\n';
    }
    return os.str();
  }

  // Mean energy and time per algorithm (rows) and case (columns).
  std::string to_markdown() const {
    std::vector<SyntheticCase> cases;
    std::vector<Algorithm> algos;
    for (const BenchRow& r : rows) {
      if (std::find(cases.begin(), cases.end(), r.kind) == cases.end()) cases.push_back(r.kind);
      if (std::find(algos.begin(), algos.end(), r.algorithm) == algos.end()) algos.push_back(r.algorithm);
    }
    std::sort(cases.begin(), cases.end());
    std::ostringstream os;
    os << std::fixed;
    for (const bool time : {false, true}) {
      os << (time ? "\n### Mean time (s)\n\n" : "### Mean energy\n\n") << "| algorithm |";
      for (SyntheticCase c : cases) os << " (" << case_name(c) << ") |";
      os << "\n|---|";
      for (std::size_t k = 0; k < cases.size(); ++k) os << "---:|";
      os << '\n';
      for (Algorithm a : algos) {
        os << "| " << algorithm_name(a) << " |";
        for (SyntheticCase c : cases)
          os << ' ' << std::setprecision(time ? 3 : 2) << (time ? mean_seconds(c, a) : mean_energy(c, a)) << " |";
        os << '\n';
      }
    }
    return os.str();
  }

 private:
  double mean(SyntheticCase c, Algorithm a, double BenchRow::*field) const {
    double sum = 0.0;
    int count = 0;
    for (const BenchRow& r : rows)
      if (r.kind == c && r.algorithm == a && r.error.empty()) {
        sum += r.*field;
        ++count;
      }
    return count ? sum / count : std::nan("");
  }
};

struct BenchOptions {
  SolveConfig solver{};
  // Instances solved concurrently; solver-internal parallelism is disabled
  // when this is above one.
  unsigned instance_threads = 1;
};

// Runs every algorithm on every instance. Baselines start from the constant
// labeling 0. When both ours and ours+refine are requested they share one
// pipeline run: the unrefined result and its time are reported for ours.
inline BenchReport run_benchmark(const std::vector<SyntheticSpec>& suite, const std::vector<Algorithm>& algorithms,
                                 const BenchOptions& options = {}) {
  std::vector<std::vector<BenchRow>> per_instance(suite.size());
  const bool want_refine =
      std::find(algorithms.begin(), algorithms.end(), Algorithm::ours_refine) != algorithms.end();

  parallel_for(suite.size(), options.instance_threads, [&](std::size_t s) {
    const SyntheticSpec& spec = suite[s];
    auto& rows = per_instance[s];
    const auto add_row = [&](Algorithm a) -> BenchRow& {
      BenchRow& row = rows.emplace_back();
      row.kind = spec.kind;
      row.seed = spec.seed;
      row.algorithm = a;
      return row;
    };
    std::optional<MrfInstance> inst;
    try {
      inst.emplace(gen_synthetic(spec));
    } catch (const std::exception& e) {
      for (Algorithm a : algorithms) add_row(a).error = e.what();
      return;
    }
    const Labeling start(static_cast<std::size_t>(inst->num_vars()), 0);
    std::optional<SolveReport> pipeline;
    for (Algorithm a : algorithms) {
      BenchRow& row = add_row(a);
      try {
        switch (a) {
          case Algorithm::alpha_expansion:
          case Algorithm::ab_swap: {
            const auto t0 = std::chrono::steady_clock::now();
            MoveResult r = a == Algorithm::alpha_expansion ? alpha_expansion(*inst, start) : ab_swap(*inst, start);
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            row.energy = r.stats.energy_trace.back();
            row.labeling = std::move(r.labeling);
            MoveStats check;
            check.absorb(r.stats);
            row.monotonicity_violations = check.monotonicity_violations;
            break;
          }
          case Algorithm::ours:
          case Algorithm::ours_refine: {
            if (!pipeline) {
              SolveConfig cfg = options.solver;
              cfg.seed = spec.seed;
              cfg.refine = want_refine;
              if (options.instance_threads > 1) cfg.threads = 1;
              pipeline = solve(*inst, cfg);
            }
            const bool refined = a == Algorithm::ours_refine;
            row.labeling = refined ? pipeline->labeling : pipeline->unrefined_labeling;
            row.energy = refined ? pipeline->energy : pipeline->unrefined_energy;
            row.seconds = refined ? pipeline->seconds.total() : pipeline->seconds.total() - pipeline->seconds.refine;
            row.distortion = pipeline->distortion;
            row.monotonicity_violations = pipeline->moves.monotonicity_violations;
            if (refined) {
              row.refine_trace = pipeline->refine_trace;
              for (std::size_t k = 1; k < row.refine_trace.size(); ++k)
                if (row.refine_trace[k] > row.refine_trace[k - 1]) ++row.monotonicity_violations;
            }
            break;
          }
        }
        const double check = energy(*inst, row.labeling);
        row.energy_verified = std::abs(check - row.energy) <= 1e-6 * std::max(1.0, std::abs(check));
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  });

  BenchReport report;
  for (auto& rows : per_instance)
    for (auto& r : rows) report.rows.push_back(std::move(r));
  return report;
}

}  // namespace hstcut
