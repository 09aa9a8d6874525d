#pragma once

// Text formats (all indices 0-based):
//
//   instance   MRF N H E
//              N lines of H unaries
//              E lines "a b w" with a < b
//              DIST TRUNCLIN M | DIST TRUNCQUAD M | DIST UNIFORM
//              | DIST MATRIX + H lines of H reals | DIST TREE + one tree line
//   labeling   ENERGY <real>
//              N labels on one line
//   tree       node := "(" length node+ ")" | "L" label
//   mixture    HSTMIX T H
//              RHO rho_1 .. rho_T
//              T tree lines
//   matrix     H lines of H reals
//
// Reals are written in shortest round-trip form. Blank lines are ignored by
// the readers.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hstcut/distances.hpp"
#include "hstcut/hst.hpp"
#include "hstcut/hst_tree.hpp"
#include "hstcut/mrf.hpp"

namespace hstcut {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

inline std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace io_detail {

struct Line {
  int number;
  std::string text;
};

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline double parse_real(std::string_view tok, int line) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError(line, "expected a real number, got '" + std::string(tok) + "'");
  return v;
}

inline long long parse_int(std::string_view tok, int line) {
  long long v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
  return v;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) {
    std::string text;
    int number = 0;
    while (std::getline(in, text)) {
      ++number;
      if (!split_ws(text).empty()) lines_.push_back({number, std::move(text)});
    }
    last_line_ = number;
  }

  bool done() const { return pos_ == lines_.size(); }
  const Line& next(const char* expecting) {
    if (done()) throw ParseError(last_line_ + 1, std::string("unexpected end of input, expected ") + expecting);
    return lines_[pos_++];
  }

 private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
  int last_line_ = 0;
};

inline std::vector<double> parse_reals(const Line& line, std::size_t count) {
  const auto toks = split_ws(line.text);
  if (toks.size() != count)
    throw ParseError(line.number, "expected " + std::to_string(count) + " values, got " + std::to_string(toks.size()));
  std::vector<double> out;
  out.reserve(count);
  for (auto t : toks) out.push_back(parse_real(t, line.number));
  return out;
}

class TreeParser {
 public:
  TreeParser(std::string_view text, int line, int num_labels) : s_(text), line_(line), num_labels_(num_labels) {}

  HstTree parse() {
    const int root = node();
    skip();
    if (pos_ != s_.size()) fail("trailing characters after tree");
    try {
      return HstTree(std::move(nodes_), root, num_labels_);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(line_, what + " (column " + std::to_string(pos_ + 1) + ")");
  }
  void skip() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }
  std::string_view token() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ' ' && s_[pos_] != '\t' && s_[pos_] != '(' && s_[pos_] != ')' &&
           s_[pos_] != '\r')
      ++pos_;
    return s_.substr(start, pos_ - start);
  }

  int node() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of tree");
    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    if (s_[pos_] == 'L') {
      ++pos_;
      const auto tok = token();
      const long long label = parse_int(tok, line_);
      if (label < 0 || label >= num_labels_) fail("leaf label " + std::string(tok) + " out of range");
      nodes_[static_cast<std::size_t>(index)].label = static_cast<int>(label);
      return index;
    }
    if (s_[pos_] != '(') fail("expected '(' or a leaf 'L<k>'");
    ++pos_;
    const auto len_tok = token();
    if (len_tok.empty()) fail("missing edge length");
    nodes_[static_cast<std::size_t>(index)].child_edge_length = parse_real(len_tok, line_);
    for (;;) {
      skip();
      if (pos_ >= s_.size()) fail("unterminated node");
      if (s_[pos_] == ')') {
        ++pos_;
        break;
      }
      const int child = node();
      nodes_[static_cast<std::size_t>(index)].children.push_back(child);
    }
    if (nodes_[static_cast<std::size_t>(index)].children.empty()) fail("internal node without children");
    return index;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
  int num_labels_;
  std::vector<HstNode> nodes_;
};

inline void emit_node(std::ostream& os, const HstTree& t, int v) {
  const HstNode& n = t.node(v);
  if (n.children.empty()) {
    os << 'L' << n.label;
    return;
  }
  os << '(' << format_real(n.child_edge_length);
  for (int c : n.children) {
    os << ' ';
    emit_node(os, t, c);
  }
  os << ')';
}

}  // namespace io_detail

inline std::string format_tree(const HstTree& t) {
  std::ostringstream os;
  io_detail::emit_node(os, t, t.root());
  return os.str();
}

inline HstTree parse_tree(std::string_view text, int num_labels, int line = 0) {
  return io_detail::TreeParser(text, line, num_labels).parse();
}

inline void write_instance(std::ostream& os, const MrfInstance& inst) {
  const int n = inst.num_vars();
  const int h = inst.num_labels();
  os << "MRF " << n << ' ' << h << ' ' << inst.edges().size() << '\n';
  for (int a = 0; a < n; ++a) {
    for (int i = 0; i < h; ++i) os << (i ? " " : "") << format_real(inst.unary(a, i));
    os << '\n';
  }
  for (const Edge& e : inst.edges()) os << e.a << ' ' << e.b << ' ' << format_real(e.w) << '\n';
  const DistanceFn& d = inst.distance();
  switch (d.kind()) {
    case DistanceKind::truncated_linear:
    case DistanceKind::truncated_quadratic:
      os << "DIST " << to_string(d.kind()) << ' ' << format_real(d.truncation()) << '\n';
      break;
    case DistanceKind::uniform:
      os << "DIST UNIFORM\n";
      break;
    case DistanceKind::matrix:
      os << "DIST MATRIX\n";
      for (int i = 0; i < h; ++i) {
        for (int j = 0; j < h; ++j) os << (j ? " " : "") << format_real(d(i, j));
        os << '\n';
      }
      break;
    case DistanceKind::tree:
      os << "DIST TREE\n" << format_tree(*d.tree_ptr()) << '\n';
      break;
  }
}

inline MrfInstance read_instance(std::istream& in) {
  io_detail::LineReader reader(in);
  const auto& header = reader.next("header 'MRF N H E'");
  const auto toks = io_detail::split_ws(header.text);
  if (toks.size() != 4 || toks[0] != "MRF") throw ParseError(header.number, "expected header 'MRF N H E'");
  const long long n = io_detail::parse_int(toks[1], header.number);
  const long long h = io_detail::parse_int(toks[2], header.number);
  const long long m = io_detail::parse_int(toks[3], header.number);
  if (n < 0 || h < 1 || m < 0) throw ParseError(header.number, "invalid sizes in header");

  std::vector<double> unary;
  unary.reserve(static_cast<std::size_t>(n * h));
  for (long long a = 0; a < n; ++a) {
    const auto row = io_detail::parse_reals(reader.next("unary row"), static_cast<std::size_t>(h));
    unary.insert(unary.end(), row.begin(), row.end());
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long k = 0; k < m; ++k) {
    const auto& line = reader.next("edge 'a b w'");
    const auto t = io_detail::split_ws(line.text);
    if (t.size() != 3) throw ParseError(line.number, "expected edge 'a b w'");
    const long long a = io_detail::parse_int(t[0], line.number);
    const long long b = io_detail::parse_int(t[1], line.number);
    const double w = io_detail::parse_real(t[2], line.number);
    if (a < 0 || b >= n || a >= b) throw ParseError(line.number, "edge endpoints must satisfy 0 <= a < b < N");
    if (!(w >= 0.0)) throw ParseError(line.number, "edge weight must be non-negative");
    edges.push_back({static_cast<int>(a), static_cast<int>(b), w});
  }

  const auto& dist_line = reader.next("distance block 'DIST ...'");
  const auto dt = io_detail::split_ws(dist_line.text);
  if (dt.size() < 2 || dt[0] != "DIST") throw ParseError(dist_line.number, "expected 'DIST <kind>'");
  const int hh = static_cast<int>(h);
  std::optional<DistanceFn> d;
  try {
    if (dt[1] == "TRUNCLIN" || dt[1] == "TRUNCQUAD") {
      if (dt.size() != 3) throw ParseError(dist_line.number, "expected truncation factor");
      const double trunc = io_detail::parse_real(dt[2], dist_line.number);
      d = dt[1] == "TRUNCLIN" ? DistanceFn::truncated_linear(hh, trunc) : DistanceFn::truncated_quadratic(hh, trunc);
    } else if (dt[1] == "UNIFORM" && dt.size() == 2) {
      d = DistanceFn::uniform(hh);
    } else if (dt[1] == "MATRIX" && dt.size() == 2) {
      LabelMatrix mat(hh);
      for (int i = 0; i < hh; ++i) {
        const auto row = io_detail::parse_reals(reader.next("distance matrix row"), static_cast<std::size_t>(h));
        for (int j = 0; j < hh; ++j) mat(i, j) = row[static_cast<std::size_t>(j)];
      }
      d = DistanceFn::matrix(std::move(mat));
    } else if (dt[1] == "TREE" && dt.size() == 2) {
      const auto& tl = reader.next("tree line");
      d = DistanceFn::tree(parse_tree(tl.text, hh, tl.number));
    } else {
      throw ParseError(dist_line.number, "unknown distance kind '" + std::string(dt[1]) + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(dist_line.number, e.what());
  }
  if (!reader.done()) {
    const auto& extra = reader.next("");
    throw ParseError(extra.number, "unexpected trailing content");
  }
  try {
    return MrfInstance(static_cast<int>(n), hh, std::move(unary), std::move(edges), std::move(*d));
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
}

inline void write_labeling(std::ostream& os, double energy_value, std::span<const Label> f) {
  os << "ENERGY " << format_real(energy_value) << '\n';
  for (std::size_t a = 0; a < f.size(); ++a) os << (a ? " " : "") << f[a];
  os << '\n';
}

struct LabelingFile {
  double energy;
  Labeling labeling;
};

inline LabelingFile read_labeling(std::istream& in) {
  std::string first;
  std::string second;
  int line = 1;
  if (!std::getline(in, first)) throw ParseError(1, "missing ENERGY line");
  const auto t = io_detail::split_ws(first);
  if (t.size() != 2 || t[0] != "ENERGY") throw ParseError(line, "expected 'ENERGY <real>'");
  LabelingFile out{io_detail::parse_real(t[1], line), {}};
  ++line;
  if (std::getline(in, second)) {
    for (auto tok : io_detail::split_ws(second))
      out.labeling.push_back(static_cast<Label>(io_detail::parse_int(tok, line)));
  }
  return out;
}

inline void write_mixture(std::ostream& os, const HstMixture& m) {
  os << "HSTMIX " << m.size() << ' ' << m.num_labels() << '\n' << "RHO";
  for (double r : m.rho()) os << ' ' << format_real(r);
  os << '\n';
  for (const TreePtr& t : m.trees()) os << format_tree(*t) << '\n';
}

inline HstMixture read_mixture(std::istream& in) {
  io_detail::LineReader reader(in);
  const auto& header = reader.next("header 'HSTMIX T H'");
  const auto toks = io_detail::split_ws(header.text);
  if (toks.size() != 3 || toks[0] != "HSTMIX") throw ParseError(header.number, "expected header 'HSTMIX T H'");
  const long long count = io_detail::parse_int(toks[1], header.number);
  const long long h = io_detail::parse_int(toks[2], header.number);
  if (count < 1 || h < 1) throw ParseError(header.number, "invalid sizes in header");
  const auto& rho_line = reader.next("RHO line");
  auto rt = io_detail::split_ws(rho_line.text);
  if (rt.empty() || rt[0] != "RHO" || rt.size() != static_cast<std::size_t>(count) + 1)
    throw ParseError(rho_line.number, "expected 'RHO' followed by T weights");
  std::vector<double> rho;
  for (std::size_t k = 1; k < rt.size(); ++k) rho.push_back(io_detail::parse_real(rt[k], rho_line.number));
  std::vector<TreePtr> trees;
  for (long long k = 0; k < count; ++k) {
    const auto& tl = reader.next("tree line");
    trees.push_back(std::make_shared<const HstTree>(parse_tree(tl.text, static_cast<int>(h), tl.number)));
  }
  try {
    return HstMixture(std::move(trees), std::move(rho));
  } catch (const std::invalid_argument& e) {
    throw ParseError(rho_line.number, e.what());
  }
}

inline LabelMatrix read_matrix(std::istream& in) {
  io_detail::LineReader reader(in);
  std::vector<io_detail::Line> lines;
  while (!reader.done()) lines.push_back(reader.next(""));
  const auto h = lines.size();
  if (h == 0) throw ParseError(1, "empty matrix");
  LabelMatrix m(static_cast<int>(h));
  for (std::size_t i = 0; i < h; ++i) {
    const auto row = io_detail::parse_reals(lines[i], h);
    for (std::size_t j = 0; j < h; ++j) m(static_cast<int>(i), static_cast<int>(j)) = row[j];
  }
  return m;
}

inline void write_matrix(std::ostream& os, const LabelMatrix& m) {
  for (int i = 0; i < m.size(); ++i) {
    for (int j = 0; j < m.size(); ++j) os << (j ? " " : "") << format_real(m(i, j));
    os << '\n';
  }
}

// 8-bit grayscale image.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  bool binary = true;

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const GrayImage&) const = default;
};

// Reads P2 or P5. The image maxval must not exceed 255.
inline GrayImage read_pgm(std::istream& in) {
  auto fail = [](const std::string& why) -> ParseError { return ParseError(0, "malformed PGM: " + why); };
  auto next_token = [&]() {
    std::string tok;
    for (;;) {
      const int c = in.get();
      if (c == EOF) break;
      if (c == '#') {
        std::string rest;
        std::getline(in, rest);
        if (!tok.empty()) break;
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(static_cast<char>(c));
    }
    return tok;
  };
  const std::string magic = next_token();
  if (magic != "P2" && magic != "P5") throw fail("magic must be P2 or P5, got '" + magic + "'");
  auto number = [&](const char* what) {
    const std::string tok = next_token();
    long long v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v < 0)
      throw fail(std::string("bad ") + what);
    return v;
  };
  GrayImage img;
  img.binary = magic == "P5";
  const long long w = number("width");
  const long long h = number("height");
  const long long maxval = number("maxval");
  if (w < 1 || h < 1 || w * h > (1ll << 30)) throw fail("bad dimensions");
  if (maxval < 1 || maxval > 255) throw fail("maxval must be in [1, 255]");
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.pixels.resize(static_cast<std::size_t>(w * h));
  if (img.binary) {
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) throw fail("truncated pixel data");
    for (auto p : img.pixels)
      if (p > maxval) throw fail("pixel exceeds maxval");
  } else {
    for (auto& p : img.pixels) {
      const long long v = number("pixel");
      if (v > maxval) throw fail("pixel exceeds maxval");
      p = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

inline void write_pgm(std::ostream& os, const GrayImage& img) {
  os << (img.binary ? "P5" : "P2") << '\n' << img.width << ' ' << img.height << "\n255\n";
  if (img.binary) {
    os.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    return;
  }
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) os << (x ? " " : "") << static_cast<int>(img.at(x, y));
    os << '\n';
  }
}

}  // namespace hstcut
