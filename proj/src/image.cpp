#include "bcosfire/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bcosfire/error.hpp"

namespace bcosfire {

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw SizeError("image dimensions must be positive, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

GrayImage::GrayImage(int width, int height, double fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw SizeError("pixel count " + std::to_string(pixels_.size()) +
                    " does not match " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
  for (double v : pixels_) {
    if (!std::isfinite(v)) throw ParameterError("non-finite pixel value");
  }
}

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

GrayImage normalize(const GrayImage& img) {
  if (img.empty()) return img;
  auto px = img.pixels();
  auto [lo, hi] = std::minmax_element(px.begin(), px.end());
  GrayImage out(img.width(), img.height());
  if (*hi == *lo) return out;
  const double lo_v = *lo;
  const double range = *hi - *lo;
  auto dst = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    dst[i] = (px[i] - lo_v) / range;
  }
  return out;
}

GrayImage rot90(const GrayImage& img) {
  const int w = img.width(), h = img.height();
  GrayImage out(h, w);
  // (x, y) -> (y, w - 1 - x)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.at(y, w - 1 - x) = img.at(x, y);
  }
  return out;
}

BinaryMask rot90(const BinaryMask& mask) {
  const int w = mask.width(), h = mask.height();
  BinaryMask out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.set(y, w - 1 - x, mask.at(x, y));
  }
  return out;
}

double max_value(const GrayImage& img) {
  auto px = img.pixels();
  if (px.empty()) return 0.0;
  return *std::max_element(px.begin(), px.end());
}

bool same_shape(const GrayImage& a, const GrayImage& b) {
  return a.width() == b.width() && a.height() == b.height();
}
bool same_shape(const GrayImage& a, const BinaryMask& b) {
  return a.width() == b.width() && a.height() == b.height();
}
bool same_shape(const BinaryMask& a, const BinaryMask& b) {
  return a.width() == b.width() && a.height() == b.height();
}

}  // namespace bcosfire
