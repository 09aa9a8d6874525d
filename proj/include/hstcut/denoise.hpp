#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hstcut/distances.hpp"
#include "hstcut/io.hpp"
#include "hstcut/mrf.hpp"

namespace hstcut {

struct DenoiseParams {
  double kappa = 30.0;
  double truncation = 50.0;
  int label_stride = 1;
};

struct DenoiseModel {
  MrfInstance instance;
  // Intensity represented by each label.
  std::vector<int> label_values;
  int width;
  int height;
};

// 4-connected grid over the pixels. Labels are the intensities
// 0, stride, 2*stride, ... <= 255; unaries are squared differences to the
// observed intensity and 0 for masked (missing) pixels; pairwise costs are
// kappa * min(|v_i - v_j|, truncation) on label intensities.
//
// With v = stride * k the pairwise term equals
// (kappa * stride) * min(|k - k'|, truncation / stride), so the instance
// uses a truncated-linear distance on label indices.
inline DenoiseModel build_denoise_model(const GrayImage& image, const GrayImage* mask, const DenoiseParams& p) {
  if (p.label_stride < 1 || p.label_stride > 255) throw std::invalid_argument("label stride must be in [1, 255]");
  if (!(p.kappa >= 0.0) || !(p.truncation > 0.0)) throw std::invalid_argument("kappa must be >= 0, truncation > 0");
  if (mask && (mask->width != image.width || mask->height != image.height))
    throw std::invalid_argument("mask size differs from image size");
  std::vector<int> values;
  for (int v = 0; v <= 255; v += p.label_stride) values.push_back(v);
  const int h = static_cast<int>(values.size());
  const int n = image.width * image.height;
  std::vector<double> unary(static_cast<std::size_t>(n) * h, 0.0);
  for (int a = 0; a < n; ++a) {
    if (mask && mask->pixels[static_cast<std::size_t>(a)] != 0) continue;
    const double observed = image.pixels[static_cast<std::size_t>(a)];
    for (int i = 0; i < h; ++i) {
      const double diff = values[static_cast<std::size_t>(i)] - observed;
      unary[static_cast<std::size_t>(a) * h + i] = diff * diff;
    }
  }
  const double stride = p.label_stride;
  DistanceFn d = h > 1 ? DistanceFn::truncated_linear(h, p.truncation / stride) : DistanceFn::uniform(1);
  return DenoiseModel{
      MrfInstance(n, h, std::move(unary), grid_edges(image.height, image.width, p.kappa * stride), std::move(d)),
      std::move(values), image.width, image.height};
}

inline GrayImage labeling_to_image(const DenoiseModel& model, std::span<const Label> f, bool binary = true) {
  GrayImage out;
  out.width = model.width;
  out.height = model.height;
  out.binary = binary;
  out.pixels.resize(f.size());
  for (std::size_t a = 0; a < f.size(); ++a)
    out.pixels[a] = static_cast<std::uint8_t>(model.label_values[static_cast<std::size_t>(f[a])]);
  return out;
}

}  // namespace hstcut
