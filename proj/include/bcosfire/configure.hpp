#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bcosfire/dog.hpp"
#include "bcosfire/image.hpp"

namespace bcosfire {

struct FilterParams {
  double sigma = 2.4;          // outer DoG std, pixels
  std::vector<double> radii;   // circle radii, strictly increasing, >= 0
  double sigma0 = 0.0;         // blur std at rho = 0
  double alpha = 0.0;          // blur growth per pixel of rho
  int n_rot = 12;
  Polarity polarity = Polarity::CenterOn;

  /// Throws ParameterError on an invalid combination.
  void validate() const;
};

/// Parses "start:step:end" (inclusive) or a comma list "0,2,4".
std::vector<double> parse_radii(const std::string& text);

struct SubUnit {
  double sigma = 0.0;
  double rho = 0.0;
  double phi = 0.0;  // [0, 2pi)
  double dx = 0.0;   // rho * cos(phi), x to the right
  double dy = 0.0;   // rho * sin(phi), y downward

  static SubUnit make(double sigma, double rho, double phi);

  /// Integer pixel offset used when reading the shifted response.
  int shift_x() const;
  int shift_y() const;
};

struct CosfireModel {
  std::vector<SubUnit> subunits;
  double sigma0 = 0.0;
  double alpha = 0.0;
  Polarity polarity = Polarity::CenterOn;
  std::string prototype_descr;

  /// Blur std for a sub-unit at distance rho: sigma0 + alpha * rho.
  double blur_sigma(double rho) const { return sigma0 + alpha * rho; }
};

/// Synthetic bar: 1 on pixels whose distance to the line through the image
/// centre with direction (cos t, sin t) is at most width/2, 0 elsewhere.
GrayImage make_prototype_bar(double width, double orientation, int size);

/// Angular samples and the relative threshold used to keep circle maxima.
inline constexpr int kCircleSamples = 360;
inline constexpr double kKeepRatio = 0.75;

CosfireModel configure_filter(const GrayImage& prototype, const FilterParams& params);

/// Configures on a vertical bar of the given width (default 2 * sigma) sized
/// to contain every circle plus the DoG support.
CosfireModel configure_from_bar(const FilterParams& params, double bar_width = 0.0);

CosfireModel rotate_model(const CosfireModel& model, double psi);

void save_model(const CosfireModel& model, const std::filesystem::path& path);
CosfireModel load_model(const std::filesystem::path& path);

std::string format_model(const CosfireModel& model);
CosfireModel parse_model(const std::string& text);

}  // namespace bcosfire
