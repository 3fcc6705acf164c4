#include "bcosfire/dog.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bcosfire/error.hpp"
#include "kernels/kernels.hpp"

namespace bcosfire {

std::string_view polarity_name(Polarity p) {
  return p == Polarity::CenterOn ? "center-on" : "center-off";
}

Polarity parse_polarity(std::string_view name) {
  if (name == "center-on" || name == "on") return Polarity::CenterOn;
  if (name == "center-off" || name == "off") return Polarity::CenterOff;
  throw ParameterError("unknown polarity '" + std::string(name) + "'");
}

namespace {

double gaussian_2d(double r2, double s) {
  return std::exp(-r2 / (2.0 * s * s)) / (2.0 * std::numbers::pi * s * s);
}

// Canonical orbit list (a >= b >= 0, excluding the origin) in ascending
// (a, b) order. The summation order of the correlation follows this list.
std::vector<kernels::Orbit> orbits_of(const DogKernel& k) {
  std::vector<kernels::Orbit> orbits;
  const int r = k.radius();
  for (int a = 1; a <= r; ++a) {
    for (int b = 0; b <= a; ++b) {
      const int cycles = (b == 0 || b == a) ? 1 : 2;
      orbits.push_back({a, b, cycles, k.weight(a, b)});
    }
  }
  return orbits;
}

}  // namespace

DogKernel make_dog(double sigma, Polarity polarity) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("DoG sigma must be positive, got " + std::to_string(sigma));
  }
  DogKernel k;
  k.sigma_ = sigma;
  k.polarity_ = polarity;
  k.radius_ = static_cast<int>(std::ceil(3.0 * sigma));
  const int r = k.radius_;
  const int side = 2 * r + 1;
  const double inner = 0.5 * sigma;
  const double sign = polarity == Polarity::CenterOn ? 1.0 : -1.0;

  // Weights depend on x^2 + y^2 only, so the 8-fold symmetry is exact.
  std::vector<double> radial(static_cast<std::size_t>(2 * r * r) + 1);
  for (std::size_t r2 = 0; r2 < radial.size(); ++r2) {
    const double d = static_cast<double>(r2);
    radial[r2] = sign * (gaussian_2d(d, inner) - gaussian_2d(d, sigma));
  }
  double sum = 0.0;
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) sum += radial[x * x + y * y];
  }
  const double mean = sum / (static_cast<double>(side) * side);
  for (double& v : radial) v -= mean;

  // The centre weight is whatever makes the orbit-weighted sum vanish; the
  // correlation uses exactly this identity.
  double off_center = 0.0;
  for (int a = 1; a <= r; ++a) {
    for (int b = 0; b <= a; ++b) {
      const double n = (b == 0 || b == a) ? 4.0 : 8.0;
      off_center += n * radial[a * a + b * b];
    }
  }
  radial[0] = -off_center;

  k.weights_.resize(static_cast<std::size_t>(side) * side);
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      k.weights_[static_cast<std::size_t>(y + r) * side + (x + r)] = radial[x * x + y * y];
    }
  }
  return k;
}

int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

GrayImage dog_response(const GrayImage& img, const DogKernel& kernel) {
  const int r = kernel.radius();
  const int w = img.width();
  const int h = img.height();
  if (kernel.side() > w || kernel.side() > h) {
    throw SizeError("DoG kernel " + std::to_string(kernel.side()) + "x" +
                    std::to_string(kernel.side()) + " exceeds image " +
                    std::to_string(w) + "x" + std::to_string(h));
  }

  const std::ptrdiff_t stride = w + 2 * r;
  std::vector<double> padded(static_cast<std::size_t>(stride) * (h + 2 * r));
  for (int py = 0; py < h + 2 * r; ++py) {
    const auto src = img.row(reflect_index(py - r, h));
    double* dst = padded.data() + py * stride;
    for (int px = 0; px < stride; ++px) dst[px] = src[reflect_index(px - r, w)];
  }

  const auto orbits = orbits_of(kernel);
  const auto& k = kernels::active();
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const double* origin = padded.data() + (y + r) * stride + r;
    k.dog_row(origin, stride, orbits.data(), orbits.size(), out.row(y).data(),
              static_cast<std::size_t>(w));
  }
  return out;
}

}  // namespace bcosfire
