#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace hstcut;

namespace {

Labeling random_labeling(int n, int h, std::mt19937_64& rng) {
  Labeling f(static_cast<std::size_t>(n));
  for (Label& l : f) l = static_cast<Label>(rng() % static_cast<std::uint64_t>(h));
  return f;
}

Labeling unary_argmin(const MrfInstance& inst) {
  Labeling f(static_cast<std::size_t>(inst.num_vars()));
  for (int a = 0; a < inst.num_vars(); ++a) {
    const auto row = inst.unary_row(a);
    f[static_cast<std::size_t>(a)] = static_cast<Label>(std::min_element(row.begin(), row.end()) - row.begin());
  }
  return f;
}

MrfInstance without_pairwise(const MrfInstance& inst) {
  std::vector<Edge> edges(inst.edges().begin(), inst.edges().end());
  for (Edge& e : edges) e.w = 0.0;
  return MrfInstance(inst.num_vars(), inst.num_labels(),
                     std::vector<double>(inst.unary_table().begin(), inst.unary_table().end()), std::move(edges),
                     inst.distance());
}

bool non_increasing(const std::vector<double>& trace) {
  for (std::size_t k = 1; k < trace.size(); ++k)
    if (trace[k] > trace[k - 1]) return false;
  return true;
}

}  // namespace

TEST(Expansion, NoopWhenAlphaEverywhere) {
  std::mt19937_64 rng(1);
  const MrfInstance inst = oracle::random_instance(6, DistanceFn::uniform(3), rng);
  const Labeling f(6, 2);
  const MoveResult r = expansion_move(inst, f, 2);
  EXPECT_EQ(r.labeling, f);
  EXPECT_EQ(r.stats.accepted_moves, 0);
}

TEST(Expansion, MatchesExhaustiveMoveOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 11;
    const int h = 2 + trial % 5;
    const DistanceFn d = trial % 3 == 0   ? DistanceFn::truncated_linear(h, 1.5)
                         : trial % 3 == 1 ? DistanceFn::uniform(h)
                                          : DistanceFn::matrix(oracle::random_metric(h, rng));
    const MrfInstance inst = oracle::random_instance(n, d, rng, 0.3);
    const Labeling f = random_labeling(n, h, rng);
    for (Label alpha = 0; alpha < h; ++alpha) {
      const MoveResult r = expansion_move(inst, f, alpha);
      EXPECT_EQ(r.stats.truncated_edges, 0);
      EXPECT_NEAR(energy(inst, r.labeling), oracle::best_expansion(inst, f, alpha), 1e-9)
          << "trial " << trial << " alpha " << alpha;
    }
  }
}

TEST(Expansion, TwoLabelPottsIsExact) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const MrfInstance inst = oracle::random_instance(10, DistanceFn::uniform(2), rng, 0.3);
    const MoveResult r = expansion_move(inst, Labeling(10, 0), 1);
    EXPECT_NEAR(energy(inst, r.labeling), oracle::map_energy(inst), 1e-9);
  }
}

TEST(Expansion, SemimetricNeverIncreasesEnergy) {
  std::mt19937_64 rng(4);
  long truncated = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const MrfInstance inst = oracle::random_instance(8, DistanceFn::truncated_quadratic(5, 20), rng, 0.3);
    const Labeling f = random_labeling(8, 5, rng);
    const double before = energy(inst, f);
    for (Label alpha = 0; alpha < 5; ++alpha) {
      const MoveResult r = expansion_move(inst, f, alpha);
      truncated += r.stats.truncated_edges;
      const double after = energy(inst, r.labeling);
      EXPECT_LE(after, before);
      if (r.labeling != f) {
        EXPECT_LT(after, before - kAcceptTolerance);
      }
    }
  }
  EXPECT_GT(truncated, 0);
}

TEST(AlphaExpansion, ZeroPairwiseGivesUnaryArgmin) {
  std::mt19937_64 rng(5);
  const MrfInstance inst = without_pairwise(oracle::random_instance(9, DistanceFn::truncated_linear(5, 2), rng));
  EXPECT_EQ(alpha_expansion(inst, Labeling(9, 0)).labeling, unary_argmin(inst));
}

TEST(AlphaExpansion, ChainAboveOptimum) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const MrfInstance inst = oracle::random_instance(8, DistanceFn::truncated_linear(4, 2), rng, 0.0);
    const MoveResult r = alpha_expansion(inst, Labeling(8, 0));
    const double opt = oracle::map_energy(inst);
    EXPECT_GE(energy(inst, r.labeling), opt - 1e-9);
    // Expansion is within a factor 2M of the optimum on truncated linear.
    EXPECT_LE(energy(inst, r.labeling), 4.0 * opt + 1e-9);
    EXPECT_TRUE(non_increasing(r.stats.energy_trace));
  }
}

TEST(AlphaExpansion, UniformIsSubmodular) {
  std::mt19937_64 rng(7);
  const MrfInstance inst = oracle::random_instance(12, DistanceFn::uniform(6), rng);
  const MoveResult r = alpha_expansion(inst, Labeling(12, 0));
  EXPECT_EQ(r.stats.truncated_edges, 0);
  EXPECT_GE(r.stats.passes, 1);
}

TEST(AlphaExpansion, LocalMinimumUnderEveryExpansion) {
  std::mt19937_64 rng(8);
  const MrfInstance inst = oracle::random_instance(9, DistanceFn::truncated_linear(4, 3), rng);
  const MoveResult r = alpha_expansion(inst, Labeling(9, 0));
  const double e = energy(inst, r.labeling);
  for (Label alpha = 0; alpha < 4; ++alpha) EXPECT_GE(oracle::best_expansion(inst, r.labeling, alpha), e - 1e-9);
}

TEST(Swap, TwoLabelsExact) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const MrfInstance inst = oracle::random_instance(10, DistanceFn::uniform(2), rng, 0.3);
    const MoveResult r = ab_swap(inst, random_labeling(10, 2, rng));
    EXPECT_NEAR(energy(inst, r.labeling), oracle::map_energy(inst), 1e-9);
  }
}

TEST(Swap, ZeroPairwiseGivesUnaryArgmin) {
  std::mt19937_64 rng(10);
  const MrfInstance inst = without_pairwise(oracle::random_instance(9, DistanceFn::truncated_quadratic(5, 8), rng));
  EXPECT_EQ(ab_swap(inst, Labeling(9, 0)).labeling, unary_argmin(inst));
}

TEST(Swap, SemimetricIsSubmodularAndMonotone) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const MrfInstance inst =
        oracle::random_instance(10, DistanceFn::matrix(oracle::random_symmetric(5, rng)), rng, 0.3);
    const MoveResult r = ab_swap(inst, Labeling(10, 0));
    EXPECT_EQ(r.stats.truncated_edges, 0);
    EXPECT_TRUE(non_increasing(r.stats.energy_trace));
    EXPECT_NEAR(r.stats.energy_trace.back(), energy(inst, r.labeling), 1e-9);
    EXPECT_GE(energy(inst, r.labeling), oracle::map_energy(inst) - 1e-9);
  }
}

TEST(Fuse, SingleProposal) {
  std::mt19937_64 rng(12);
  const MrfInstance inst = oracle::random_instance(7, DistanceFn::uniform(4), rng);
  const std::vector<Labeling> p{random_labeling(7, 4, rng)};
  EXPECT_EQ(fuse(inst, p, inst.distance()).labeling, p[0]);
}

TEST(Fuse, ConstantProposalsZeroWeights) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const MrfInstance inst = without_pairwise(oracle::random_instance(12, DistanceFn::uniform(4), rng));
    const std::vector<Labeling> p{Labeling(12, 1), Labeling(12, 2)};
    const MoveResult r = fuse(inst, p, inst.distance());
    EXPECT_NEAR(energy(inst, r.labeling), oracle::best_fusion(inst, p), 1e-9);
    for (int a = 0; a < 12; ++a) {
      const Label pick = inst.unary(a, 1) <= inst.unary(a, 2) ? 1 : 2;
      EXPECT_EQ(r.labeling[static_cast<std::size_t>(a)], pick);
    }
  }
}

TEST(Fuse, NeverWorseThanBestProposal) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const MrfInstance inst =
        oracle::random_instance(9, DistanceFn::matrix(oracle::random_symmetric(5, rng)), rng, 0.3);
    std::vector<Labeling> p;
    double best = 1e300;
    for (int k = 0; k < 3; ++k) {
      p.push_back(random_labeling(9, 5, rng));
      best = std::min(best, energy(inst, p.back()));
    }
    const MoveResult r = fuse(inst, p, inst.distance());
    EXPECT_LE(energy(inst, r.labeling), best);
    EXPECT_GE(energy(inst, r.labeling), oracle::best_fusion(inst, p) - 1e-9);
  }
}

TEST(Fuse, BestProposalTieGoesToSmallestIndex) {
  std::mt19937_64 rng(15);
  const MrfInstance inst = oracle::random_instance(5, DistanceFn::uniform(3), rng);
  const Labeling f = random_labeling(5, 3, rng);
  const std::vector<Labeling> p{Labeling(5, 0), f, f};
  const std::size_t best = best_proposal(inst, p, inst.distance());
  EXPECT_NE(best, 2u);
}

TEST(Fuse, RejectsEmpty) {
  std::mt19937_64 rng(16);
  const MrfInstance inst = oracle::random_instance(3, DistanceFn::uniform(2), rng);
  EXPECT_THROW(fuse(inst, std::vector<Labeling>{}, inst.distance()), std::invalid_argument);
}
