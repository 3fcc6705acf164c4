#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bcosfire {

/// Row-major scalar image. Every stage of the pipeline (input, DoG map,
/// filter response) is a GrayImage.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);
  GrayImage(int width, int height, std::vector<double> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  double& at(int x, int y) { return pixels_[index(x, y)]; }
  double at(int x, int y) const { return pixels_[index(x, y)]; }

  std::span<double> row(int y) {
    return {pixels_.data() + static_cast<std::size_t>(y) * width_,
            static_cast<std::size_t>(width_)};
  }
  std::span<const double> row(int y) const {
    return {pixels_.data() + static_cast<std::size_t>(y) * width_,
            static_cast<std::size_t>(width_)};
  }

  std::span<double> pixels() { return pixels_; }
  std::span<const double> pixels() const { return pixels_; }

  bool operator==(const GrayImage&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }

  bool at(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool v) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
  }

  // Stored as bytes so spans and raw loops work.
  std::span<std::uint8_t> bits() { return bits_; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t count() const;

  bool operator==(const BinaryMask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Min-max rescale to [0, 1]. A constant image maps to all zeros.
GrayImage normalize(const GrayImage& img);

/// 90 degree counter-clockwise rotation (as displayed, rows top to bottom).
GrayImage rot90(const GrayImage& img);
BinaryMask rot90(const BinaryMask& mask);

double max_value(const GrayImage& img);

bool same_shape(const GrayImage& a, const GrayImage& b);
bool same_shape(const GrayImage& a, const BinaryMask& b);
bool same_shape(const BinaryMask& a, const BinaryMask& b);

}  // namespace bcosfire
