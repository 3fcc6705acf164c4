#pragma once

#include <string_view>
#include <vector>

#include "bcosfire/image.hpp"

namespace bcosfire {

/// center-on responds positively to a bright blob on a dark surround;
/// center-off is its negation.
enum class Polarity { CenterOn, CenterOff };

std::string_view polarity_name(Polarity p);
Polarity parse_polarity(std::string_view name);

/// Truncated, zero-sum difference-of-Gaussians kernel. The outer Gaussian
/// has standard deviation sigma, the inner one 0.5 * sigma; support is
/// [-radius, radius]^2 with radius = ceil(3 * sigma).
class DogKernel {
 public:
  double sigma() const { return sigma_; }
  Polarity polarity() const { return polarity_; }
  int radius() const { return radius_; }
  int side() const { return 2 * radius_ + 1; }

  /// Row-major (2r+1)^2 weights, index (y + r) * side + (x + r).
  const std::vector<double>& weights() const { return weights_; }
  double weight(int x, int y) const {
    return weights_[static_cast<std::size_t>(y + radius_) * side() + (x + radius_)];
  }

  friend DogKernel make_dog(double sigma, Polarity polarity);

 private:
  double sigma_ = 0.0;
  Polarity polarity_ = Polarity::CenterOn;
  int radius_ = 0;
  std::vector<double> weights_;
};

DogKernel make_dog(double sigma, Polarity polarity);

/// Rectified correlation |I * DoG|^+ with mirror-reflect borders. Output has
/// the input's dimensions. Throws SizeError if the kernel does not fit.
GrayImage dog_response(const GrayImage& img, const DogKernel& kernel);

/// Reflect-101 index into [0, n): -1 -> 1, n -> n - 2.
int reflect_index(int i, int n);

}  // namespace bcosfire
