#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hstcut {

// Dense row-major H x H table indexed by label pairs.
class LabelMatrix {
 public:
  LabelMatrix() = default;
  explicit LabelMatrix(int size, double fill = 0.0)
      : size_(size), data_(static_cast<std::size_t>(size) * size, fill) {
    if (size < 0) throw std::invalid_argument("LabelMatrix: negative size");
  }
  LabelMatrix(int size, std::vector<double> data) : size_(size), data_(std::move(data)) {
    if (size < 0 || data_.size() != static_cast<std::size_t>(size) * size)
      throw std::invalid_argument("LabelMatrix: data is not size x size");
  }

  int size() const { return size_; }

  double operator()(int i, int j) const { return data_[index(i, j)]; }
  double& operator()(int i, int j) { return data_[index(i, j)]; }

  std::span<const double> row(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * size_, static_cast<std::size_t>(size_)};
  }
  std::span<const double> data() const { return data_; }

  bool operator==(const LabelMatrix&) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * size_ + static_cast<std::size_t>(j);
  }

  int size_ = 0;
  std::vector<double> data_;
};

}  // namespace hstcut
