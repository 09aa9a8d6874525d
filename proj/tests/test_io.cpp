#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"

using namespace hstcut;

namespace {

MrfInstance round_trip(const MrfInstance& inst) {
  std::stringstream ss;
  write_instance(ss, inst);
  return read_instance(ss);
}

void expect_same(const MrfInstance& a, const MrfInstance& b) {
  ASSERT_EQ(a.num_vars(), b.num_vars());
  ASSERT_EQ(a.num_labels(), b.num_labels());
  EXPECT_TRUE(std::equal(a.unary_table().begin(), a.unary_table().end(), b.unary_table().begin(), b.unary_table().end()));
  ASSERT_EQ(a.edges().size(), b.edges().size());
  for (std::size_t k = 0; k < a.edges().size(); ++k) {
    EXPECT_EQ(a.edges()[k].a, b.edges()[k].a);
    EXPECT_EQ(a.edges()[k].b, b.edges()[k].b);
    EXPECT_EQ(a.edges()[k].w, b.edges()[k].w);
  }
  EXPECT_EQ(a.distance().kind(), b.distance().kind());
  EXPECT_EQ(a.distance().table(), b.distance().table());
}

int error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_instance(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(InstanceFile, RoundTripAllKinds) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const int h = 1 + trial % 6;
    std::vector<DistanceFn> kinds{DistanceFn::uniform(h)};
    if (h > 1) {
      std::uniform_real_distribution<double> m(0.1, 10.0);
      kinds.push_back(DistanceFn::truncated_linear(h, m(rng)));
      kinds.push_back(DistanceFn::truncated_quadratic(h, m(rng)));
      kinds.push_back(DistanceFn::matrix(oracle::random_symmetric(h, rng)));
      kinds.push_back(DistanceFn::tree(embed_semimetric(DistanceFn::matrix(oracle::random_symmetric(h, rng)),
                                                        static_cast<std::uint64_t>(trial))));
    }
    for (const DistanceFn& d : kinds) {
      const MrfInstance inst = oracle::random_instance(1 + trial % 9, d, rng, 0.3);
      expect_same(inst, round_trip(inst));
    }
  }
}

TEST(InstanceFile, ExactText) {
  const MrfInstance inst(2, 2, {0, 1.5, 0.25, 3}, {{0, 1, 2}}, DistanceFn::truncated_linear(2, 0.5));
  std::ostringstream os;
  write_instance(os, inst);
  EXPECT_EQ(os.str(), "MRF 2 2 1\n0 1.5\n0.25 3\n0 1 2\nDIST TRUNCLIN 0.5\n");
}

TEST(InstanceFile, ParseErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("MRF 2 2\n"), 1);
  EXPECT_EQ(error_line("MRF 1 2 0\n0 x\nDIST UNIFORM\n"), 2);
  EXPECT_EQ(error_line("MRF 2 2 1\n0 0\n0 0\n1 0 1\nDIST UNIFORM\n"), 4);
  EXPECT_EQ(error_line("MRF 2 2 1\n0 0\n0 0\n0 1 -1\nDIST UNIFORM\n"), 4);
  EXPECT_EQ(error_line("MRF 1 2 0\n0 0\nDIST WHAT\n"), 3);
  EXPECT_EQ(error_line("MRF 1 2 0\n0 0\nDIST MATRIX\n0 1\n2 0\n"), 3);
  EXPECT_EQ(error_line("MRF 1 2 0\n0 0\nDIST TREE\n(1 L0 L0)\n"), 4);
  EXPECT_EQ(error_line("MRF 1 2 0\n0 0\nDIST UNIFORM\nextra\n"), 4);
  EXPECT_EQ(error_line("MRF 1 2 0\n0 0\n"), 3);
}

TEST(InstanceFile, BlankLinesIgnored) {
  std::istringstream in("\nMRF 1 2 0\n\n1 2\n\nDIST UNIFORM\n\n");
  const MrfInstance inst = read_instance(in);
  EXPECT_EQ(inst.unary(0, 1), 2.0);
}

TEST(TreeText, RoundTrip) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int h = 2 + trial % 10;
    const HstTree t = frt_sample(DistanceFn::matrix(oracle::random_metric(h, rng)), static_cast<std::uint64_t>(trial));
    const std::string text = format_tree(t);
    const HstTree back = parse_tree(text, h);
    EXPECT_EQ(format_tree(back), text);
    EXPECT_EQ(back.distance_table(), t.distance_table());
  }
}

TEST(TreeText, Grammar) {
  const HstTree t = parse_tree("( 4 (2 L0 L1 L2) (1 L3 L4 L5) )", 6);
  EXPECT_EQ(tree_distance(t, 0, 1), 4.0);
  EXPECT_EQ(tree_distance(t, 0, 3), 11.0);
  EXPECT_EQ(format_tree(t), "(4 (2 L0 L1 L2) (1 L3 L4 L5))");
  EXPECT_EQ(format_tree(parse_tree("L0", 1)), "L0");
  EXPECT_THROW(parse_tree("(1 L0 L1", 2), ParseError);
  EXPECT_THROW(parse_tree("(1 L0 L2)", 2), std::exception);
  EXPECT_THROW(parse_tree("(1 L0 L1) L0", 2), ParseError);
  EXPECT_THROW(parse_tree("(-1 L0 L1)", 2), std::exception);
}

TEST(LabelingFile, RoundTrip) {
  std::stringstream ss;
  write_labeling(ss, 12.125, Labeling{0, 3, 2, 2});
  EXPECT_EQ(ss.str(), "ENERGY 12.125\n0 3 2 2\n");
  const LabelingFile f = read_labeling(ss);
  EXPECT_EQ(f.energy, 12.125);
  EXPECT_EQ(f.labeling, (Labeling{0, 3, 2, 2}));
  const double awkward = 0.1 + 0.2;
  std::stringstream s2;
  write_labeling(s2, awkward, Labeling{1});
  EXPECT_EQ(read_labeling(s2).energy, awkward);
}

TEST(MixtureFile, RoundTrip) {
  std::mt19937_64 rng(3);
  const DistanceFn d = DistanceFn::matrix(oracle::random_symmetric(7, rng));
  const HstMixture m = learn_mixture(d, 5, MixtureOptions{6, 0.1, {8, 2.0, 1}});
  std::stringstream ss;
  write_mixture(ss, m);
  const HstMixture back = read_mixture(ss);
  ASSERT_EQ(back.size(), m.size());
  EXPECT_EQ(back.rho(), m.rho());
  for (std::size_t t = 0; t < m.size(); ++t) EXPECT_EQ(back.tree(t).distance_table(), m.tree(t).distance_table());
  EXPECT_EQ(distortion(back, d), distortion(m, d));
}

TEST(MatrixFile, RoundTrip) {
  std::mt19937_64 rng(4);
  const LabelMatrix m = oracle::random_symmetric(5, rng);
  std::stringstream ss;
  write_matrix(ss, m);
  EXPECT_EQ(read_matrix(ss), m);
  std::istringstream ragged("0 1\n1 0 3\n");
  EXPECT_THROW(read_matrix(ragged), ParseError);
}

TEST(Pgm, BinaryAndAsciiRoundTrip) {
  GrayImage img;
  img.width = 3;
  img.height = 2;
  img.pixels = {0, 17, 255, 128, 64, 9};
  for (const bool binary : {true, false}) {
    img.binary = binary;
    std::stringstream ss;
    write_pgm(ss, img);
    EXPECT_EQ(read_pgm(ss), img);
  }
}

TEST(Pgm, CommentsAndErrors) {
  std::istringstream in("P2\n# a comment\n2 1\n# another\n255\n7 8\n");
  const GrayImage img = read_pgm(in);
  EXPECT_EQ(img.width, 2);
  EXPECT_EQ(img.at(1, 0), 8);
  EXPECT_FALSE(img.binary);
  std::istringstream bad_magic("P3\n1 1\n255\n0\n");
  EXPECT_THROW(read_pgm(bad_magic), ParseError);
  std::istringstream short_data("P2\n2 2\n255\n1 2 3\n");
  EXPECT_THROW(read_pgm(short_data), ParseError);
  std::istringstream big_max("P2\n1 1\n65535\n0\n");
  EXPECT_THROW(read_pgm(big_max), ParseError);
  std::istringstream over("P2\n1 1\n100\n101\n");
  EXPECT_THROW(read_pgm(over), ParseError);
}
