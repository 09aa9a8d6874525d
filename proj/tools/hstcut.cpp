// hstcut command-line tool: solve instance files, embed distance matrices
// into tree mixtures, denoise PGM images and run synthetic benchmarks.
//
// Exit codes: 0 success, 1 usage error, 2 invalid input, 3 internal failure.

#include <CLI11.hpp>

#include <cstdint>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hstcut/hstcut.hpp"

namespace {

using namespace hstcut;

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

// Input problems (unreadable or malformed files, invalid parameters).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  return out;
}

struct SolverFlags {
  std::string algo = "ours";
  std::size_t trees = 50;
  double lambda = 0.1;
  std::size_t dp_samples = 64;
  std::uint64_t seed = 0;
  bool refine = false;
  int max_refine_iters = 20;
  bool tree_metric_subproblems = false;
  unsigned threads = 0;

  SolveConfig config() const {
    SolveConfig c;
    c.trees = trees;
    c.lambda = lambda;
    c.dp_samples = dp_samples;
    c.seed = seed;
    c.refine = refine;
    c.max_refine_iters = max_refine_iters;
    c.use_original_distance = !tree_metric_subproblems;
    c.threads = threads;
    return c;
  }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f, bool with_algo) {
  if (with_algo)
    cmd->add_option("--algo", f.algo, "Algorithm")
        ->check(CLI::IsMember({"ours", "alpha-exp", "ab-swap"}))
        ->capture_default_str();
  cmd->add_option("--trees", f.trees, "Number of trees in the mixture")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--lambda", f.lambda, "Mixture learning rate in (0, 1)")
      ->check(CLI::Range(1e-12, 1.0 - 1e-12))
      ->capture_default_str();
  cmd->add_option("--dp-samples", f.dp_samples, "Candidate trees per weighted tree fit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads", f.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();
  if (with_algo) {
    cmd->add_flag("--refine", f.refine, "Apply hard-EM refinement to the result");
    cmd->add_option("--max-refine-iters", f.max_refine_iters, "Refinement iteration cap")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_flag("--tree-metric-subproblems", f.tree_metric_subproblems,
                  "Use the tree metric instead of the original distance inside subproblems");
  }
}

struct RunOutcome {
  Labeling labeling;
  double energy = 0.0;
  PhaseSeconds seconds;
  std::optional<double> distortion;
};

RunOutcome run_algorithm(const MrfInstance& inst, const SolverFlags& flags) {
  RunOutcome out;
  if (flags.algo == "ours") {
    SolveReport r = solve(inst, flags.config());
    out.labeling = std::move(r.labeling);
    out.energy = r.energy;
    out.seconds = r.seconds;
    out.distortion = r.distortion;
    return out;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const Labeling start(static_cast<std::size_t>(inst.num_vars()), 0);
  MoveResult r = flags.algo == "alpha-exp" ? alpha_expansion(inst, start) : ab_swap(inst, start);
  out.seconds.combine = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.labeling = std::move(r.labeling);
  out.energy = energy(inst, out.labeling);
  return out;
}

void print_outcome(const std::string& algo, const RunOutcome& r) {
  std::cout << "algorithm " << algo << '\n'
            << "energy " << format_real(r.energy) << '\n'
            << "seconds embed " << r.seconds.embed << " trees " << r.seconds.trees << " combine "
            << r.seconds.combine << " refine " << r.seconds.refine << " total " << r.seconds.total() << '\n';
  if (r.distortion) std::cout << "distortion " << format_real(*r.distortion) << '\n';
}

int cmd_solve(const std::string& path, const std::string& out_path, const SolverFlags& flags) {
  auto in = open_in(path);
  const MrfInstance inst = read_instance(in);
  const RunOutcome r = run_algorithm(inst, flags);
  auto out = open_out(out_path);
  write_labeling(out, r.energy, r.labeling);
  print_outcome(flags.algo, r);
  return 0;
}

int cmd_embed(const std::string& path, const std::string& out_path, const SolverFlags& flags) {
  auto in = open_in(path);
  LabelMatrix m = read_matrix(in);
  if (auto bad = validate_semimetric(m))
    throw InputError("matrix is not a semi-metric: " + bad->reason + " at (" + std::to_string(bad->i) + ", " +
                     std::to_string(bad->j) + ")");
  const DistanceFn d = DistanceFn::matrix(std::move(m));
  MixtureOptions opt;
  opt.trees = flags.trees;
  opt.lambda = flags.lambda;
  opt.dp = DpOptions{flags.dp_samples, kDefaultSeparation, flags.threads};
  const HstMixture mixture = learn_mixture(d, flags.seed, opt);
  auto out = open_out(out_path);
  write_mixture(out, mixture);
  std::cout << "trees " << mixture.size() << '\n'
            << "gamma " << format_real(gamma(d)) << '\n'
            << "distortion " << format_real(distortion(mixture, d)) << '\n'
            << "mean_stretch " << format_real(mean_stretch(mixture, d)) << '\n';
  return 0;
}

int cmd_denoise(const std::string& path, const std::string& mask_path, const std::string& out_path,
                const DenoiseParams& params, const SolverFlags& flags) {
  auto in = open_in(path, true);
  const GrayImage image = read_pgm(in);
  std::optional<GrayImage> mask;
  if (!mask_path.empty()) {
    auto min = open_in(mask_path, true);
    mask = read_pgm(min);
  }
  const DenoiseModel model = build_denoise_model(image, mask ? &*mask : nullptr, params);
  const RunOutcome r = run_algorithm(model.instance, flags);
  auto out = open_out(out_path, true);
  write_pgm(out, labeling_to_image(model, r.labeling, image.binary));
  print_outcome(flags.algo, r);
  return 0;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct BenchFlags {
  std::string cases = "i,ii,iii,iv,v";
  std::string grid = "20";
  int labels = 8;
  int seeds = 20;
  std::string algos = "alpha-exp,ab-swap,ours,ours+refine";
  double edge_weight = 1.0;
  unsigned instance_threads = 1;
  std::string markdown;
};

int cmd_bench(const BenchFlags& b, const SolverFlags& flags, const std::string& out_path) {
  int rows = 0;
  int cols = 0;
  if (const auto x = b.grid.find('x'); x != std::string::npos) {
    rows = std::stoi(b.grid.substr(0, x));
    cols = std::stoi(b.grid.substr(x + 1));
  } else {
    rows = cols = std::stoi(b.grid);
  }
  if (rows < 1 || cols < 1) throw InputError("grid must be positive");
  std::vector<SyntheticSpec> suite;
  for (const std::string& c : split_list(b.cases)) {
    const auto kind = parse_case(c);
    if (!kind) throw InputError("unknown case '" + c + "' (expected i, ii, iii, iv or v)");
    for (int s = 0; s < b.seeds; ++s) {
      SyntheticSpec spec;
      spec.kind = *kind;
      spec.rows = rows;
      spec.cols = cols;
      spec.labels = b.labels;
      spec.edge_weight = b.edge_weight;
      spec.seed = flags.seed + static_cast<std::uint64_t>(s);
      suite.push_back(spec);
    }
  }
  std::vector<Algorithm> algorithms;
  for (const std::string& a : split_list(b.algos)) {
    const auto alg = parse_algorithm(a);
    if (!alg) throw InputError("unknown algorithm '" + a + "'");
    algorithms.push_back(*alg);
  }
  BenchOptions opt;
  opt.solver = flags.config();
  opt.instance_threads = b.instance_threads;
  const BenchReport report = run_benchmark(suite, algorithms, opt);
  auto out = open_out(out_path);
  out << report.to_csv();
  const std::string table = report.to_markdown();
  if (!b.markdown.empty()) {
    auto md = open_out(b.markdown);
    md << table;
  }
  std::cout << table;
  int failures = 0;
  for (const BenchRow& r : report.rows) {
    if (!r.error.empty()) {
      std::cerr << "run failed: case " << case_name(r.kind) << " seed " << r.seed << ' '
                << algorithm_name(r.algorithm) << ": " << r.error << '\n';
      ++failures;
    } else if (!r.energy_verified) {
      std::cerr << "energy mismatch: case " << case_name(r.kind) << " seed " << r.seed << ' '
                << algorithm_name(r.algorithm) << '\n';
      ++failures;
    }
  }
  return failures ? kExitInternal : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MAP inference for semi-metric MRFs with hierarchical graph cuts"};
  app.require_subcommand(1);

  SolverFlags solve_flags;
  std::string solve_in;
  std::string solve_out;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance file and write a labeling file");
  solve_cmd->add_option("instance", solve_in, "Instance file")->required();
  solve_cmd->add_option("--out", solve_out, "Output labeling file")->required();
  add_solver_flags(solve_cmd, solve_flags, true);

  SolverFlags embed_flags;
  std::string embed_in;
  std::string embed_out;
  auto* embed_cmd = app.add_subcommand("embed", "Learn a tree mixture for a distance matrix");
  embed_cmd->add_option("matrix", embed_in, "Distance matrix file (H lines of H reals)")->required();
  embed_cmd->add_option("--out", embed_out, "Output mixture file")->required();
  add_solver_flags(embed_cmd, embed_flags, false);

  SolverFlags denoise_flags;
  DenoiseParams denoise_params;
  std::string denoise_in;
  std::string denoise_mask;
  std::string denoise_out;
  auto* denoise_cmd = app.add_subcommand("denoise", "Denoise / inpaint a grayscale PGM image");
  denoise_cmd->add_option("image", denoise_in, "Input PGM (P2 or P5, maxval <= 255)")->required();
  denoise_cmd->add_option("--out", denoise_out, "Output PGM")->required();
  denoise_cmd->add_option("--mask", denoise_mask, "Mask PGM; nonzero pixels are missing");
  denoise_cmd->add_option("--kappa", denoise_params.kappa, "Pairwise scale")->capture_default_str();
  denoise_cmd->add_option("--trunc", denoise_params.truncation, "Pairwise truncation on intensities")
      ->capture_default_str();
  denoise_cmd->add_option("--label-stride", denoise_params.label_stride, "Intensity step between labels")
      ->check(CLI::Range(1, 255))
      ->capture_default_str();
  add_solver_flags(denoise_cmd, denoise_flags, true);

  SolverFlags bench_flags;
  bench_flags.trees = 16;
  BenchFlags bench;
  std::string bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "Run the synthetic benchmark suite");
  bench_cmd->add_option("--out", bench_out, "Output CSV")->required();
  bench_cmd->add_option("--markdown", bench.markdown, "Also write the summary table to this file");
  bench_cmd->add_option("--cases", bench.cases, "Comma-separated cases among i,ii,iii,iv,v")->capture_default_str();
  bench_cmd->add_option("--grid", bench.grid, "Grid size: N or RxC")->capture_default_str();
  bench_cmd->add_option("--labels", bench.labels, "Labels per variable")->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--seeds", bench.seeds, "Instances per case")->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--algos", bench.algos, "Comma-separated algorithms")->capture_default_str();
  bench_cmd->add_option("--edge-weight", bench.edge_weight, "Weight of every grid edge")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  bench_cmd->add_option("--instance-threads", bench.instance_threads, "Instances solved concurrently")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_solver_flags(bench_cmd, bench_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_in, solve_out, solve_flags);
    if (*embed_cmd) return cmd_embed(embed_in, embed_out, embed_flags);
    if (*denoise_cmd) return cmd_denoise(denoise_in, denoise_mask, denoise_out, denoise_params, denoise_flags);
    if (*bench_cmd) return cmd_bench(bench, bench_flags, bench_out);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}
