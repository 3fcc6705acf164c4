#pragma once

#include <string>

#include "bcosfire/configure.hpp"
#include "bcosfire/image.hpp"

namespace bcosfire {

struct ResponseMap {
  GrayImage image;       // nonnegative filter response per pixel
  std::string model_id;  // fingerprint of the model's text form
  int n_rot = 1;
};

struct ResponseOptions {
  int workers = 1;  // threads for the blur and orientation stages
};

/// Blurred and shifted sub-unit response:
///   s(x, y) = max_{|x'|,|y'| <= 3 s'} dog(x - dx - x', y - dy - y') * G(x', y')
/// with s' = sigma0 + alpha * rho, G a unit-peak Gaussian of std s' and
/// (dx, dy) rounded to whole pixels. Reads outside dog_map are 0.
GrayImage subunit_response(const GrayImage& dog_map, const SubUnit& su,
                           double sigma0, double alpha);

/// Unit-peak Gaussian weights on [-r, r]^2, r = floor(3 * s); s = 0 gives
/// the single weight 1.
std::vector<double> tolerance_weights(double blur_sigma, int& radius);

/// Pixelwise geometric mean (prod maps)^(1/n), computed as exp(mean log);
/// any zero input gives 0. Maps are combined in the given order.
GrayImage geometric_mean(const std::vector<GrayImage>& maps);

/// Geometric mean of the sub-unit responses of `model`.
ResponseMap filter_response(const GrayImage& img, const CosfireModel& model,
                            const ResponseOptions& opts = {});

/// Pointwise max of filter_response over the rotated models R_psi(model),
/// psi = k * pi / n_rot for k = 0..n_rot-1.
ResponseMap rotation_tolerant_response(const GrayImage& img,
                                       const CosfireModel& model, int n_rot,
                                       const ResponseOptions& opts = {});

/// Divides by the global max when positive.
ResponseMap normalize_response(const ResponseMap& resp);

std::string model_fingerprint(const CosfireModel& model);

}  // namespace bcosfire
