#include "bcosfire/configure.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "bcosfire/error.hpp"

namespace bcosfire {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double phi) {
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

std::string fmt_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double parse_double(std::string_view tok, const std::string& where) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw FormatError(where + ": bad number '" + std::string(tok) + "'");
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double bilinear(const GrayImage& img, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
  const double bot = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
  return top * (1.0 - fy) + bot * fy;
}

// Circular local maxima: a run of equal samples counts as one maximum at
// its midpoint when both neighbouring samples are strictly lower. Returns
// fractional sample indices.
std::vector<double> circular_maxima(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  auto at = [&](int i) { return v[((i % n) + n) % n]; };
  int start = -1;
  for (int i = 0; i < n; ++i) {
    if (at(i) != at(i - 1)) {
      start = i;
      break;
    }
  }
  std::vector<double> peaks;
  if (start < 0) return peaks;  // constant circle
  int i = start;
  while (i < start + n) {
    int e = i;
    while (e + 1 < start + n && at(e + 1) == at(i)) ++e;
    if (at(i - 1) < at(i) && at(e + 1) < at(i)) {
      double mid = 0.5 * (i + e);
      if (mid >= n) mid -= n;
      peaks.push_back(mid);
    }
    i = e + 1;
  }
  return peaks;
}

}  // namespace

void FilterParams::validate() const {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  if (radii.empty()) throw ParameterError("radii must be nonempty");
  if (radii.front() < 0.0) throw ParameterError("radii must be nonnegative");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) {
      throw ParameterError("radii must be strictly increasing");
    }
  }
  if (sigma0 < 0.0) throw ParameterError("sigma0 must be nonnegative");
  if (alpha < 0.0) throw ParameterError("alpha must be nonnegative");
  if (n_rot < 1) throw ParameterError("n_rot must be at least 1");
}

std::vector<double> parse_radii(const std::string& text) {
  const std::string where = "radii '" + text + "'";
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string_view> parts;
    std::string_view s = text;
    std::size_t pos;
    while ((pos = s.find(':')) != std::string_view::npos) {
      parts.push_back(s.substr(0, pos));
      s.remove_prefix(pos + 1);
    }
    parts.push_back(s);
    if (parts.size() != 3) throw ParameterError(where + ": expected start:step:end");
    double start, step, end;
    try {
      start = parse_double(parts[0], where);
      step = parse_double(parts[1], where);
      end = parse_double(parts[2], where);
    } catch (const FormatError& e) {
      throw ParameterError(e.what());
    }
    if (!(step > 0.0)) throw ParameterError(where + ": step must be positive");
    // Integer stepping avoids accumulated drift; tolerate rounding at `end`.
    for (int k = 0;; ++k) {
      const double v = start + k * step;
      if (v > end + 1e-9 * std::max(1.0, std::abs(end))) break;
      out.push_back(v);
    }
  } else {
    std::string_view s = text;
    while (!s.empty()) {
      const std::size_t pos = s.find(',');
      try {
        out.push_back(parse_double(s.substr(0, pos), where));
      } catch (const FormatError& e) {
        throw ParameterError(e.what());
      }
      if (pos == std::string_view::npos) break;
      s.remove_prefix(pos + 1);
    }
  }
  if (out.empty()) throw ParameterError(where + ": empty");
  return out;
}

SubUnit SubUnit::make(double sigma, double rho, double phi) {
  SubUnit s;
  s.sigma = sigma;
  s.rho = rho;
  s.phi = wrap_angle(phi);
  s.dx = rho * std::cos(s.phi);
  s.dy = rho * std::sin(s.phi);
  return s;
}

int SubUnit::shift_x() const { return static_cast<int>(std::lround(dx)); }
int SubUnit::shift_y() const { return static_cast<int>(std::lround(dy)); }

GrayImage make_prototype_bar(double width, double orientation, int size) {
  if (size <= 0) throw ParameterError("prototype size must be positive");
  if (!(width > 0.0) || !(width < size / 2.0)) {
    throw ParameterError("bar width must satisfy 0 < width < size/2");
  }
  GrayImage img(size, size);
  const double c = (size - 1) / 2.0;
  // Unit normal of the bar axis.
  const double nx = -std::sin(orientation);
  const double ny = std::cos(orientation);
  const double half = width / 2.0;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double d = std::abs((x - c) * nx + (y - c) * ny);
      if (d <= half + 1e-9) img.at(x, y) = 1.0;
    }
  }
  return img;
}

CosfireModel configure_filter(const GrayImage& prototype, const FilterParams& params) {
  params.validate();
  const GrayImage dog = dog_response(prototype, make_dog(params.sigma, params.polarity));

  const double cx = (prototype.width() - 1) / 2.0;
  const double cy = (prototype.height() - 1) / 2.0;
  if (bilinear(dog, cx, cy) <= 0.0) {
    throw ConfigurationError("prototype centre has no DoG response for polarity " +
                             std::string(polarity_name(params.polarity)));
  }

  CosfireModel model;
  model.sigma0 = params.sigma0;
  model.alpha = params.alpha;
  model.polarity = params.polarity;

  const double limit = std::min(cx, cy) - 1.0;
  for (double rho : params.radii) {
    if (rho == 0.0) {
      model.subunits.push_back(SubUnit::make(params.sigma, 0.0, 0.0));
      continue;
    }
    if (rho > limit) {
      throw ParameterError("radius " + fmt_g9(rho) + " does not fit in the " +
                           std::to_string(prototype.width()) + "x" +
                           std::to_string(prototype.height()) + " prototype");
    }
    std::vector<double> samples(kCircleSamples);
    for (int k = 0; k < kCircleSamples; ++k) {
      const double t = kTwoPi * k / kCircleSamples;
      samples[k] = bilinear(dog, cx + rho * std::cos(t), cy + rho * std::sin(t));
    }
    const double peak = *std::max_element(samples.begin(), samples.end());
    if (peak <= 0.0) {
      throw ConfigurationError("no DoG response on the circle of radius " + fmt_g9(rho));
    }
    std::size_t kept = 0;
    for (double idx : circular_maxima(samples)) {
      // Plateau midpoints may fall between samples; both ends share the value.
      const double value = samples[static_cast<std::size_t>(std::floor(idx))];
      if (value >= kKeepRatio * peak) {
        model.subunits.push_back(
            SubUnit::make(params.sigma, rho, kTwoPi * idx / kCircleSamples));
        ++kept;
      }
    }
    if (kept == 0) {
      throw ConfigurationError("no angular maximum on the circle of radius " + fmt_g9(rho));
    }
  }

  std::stable_sort(model.subunits.begin(), model.subunits.end(),
                   [](const SubUnit& a, const SubUnit& b) {
                     if (a.rho != b.rho) return a.rho < b.rho;
                     return a.phi < b.phi;
                   });
  return model;
}

CosfireModel configure_from_bar(const FilterParams& params, double bar_width) {
  params.validate();
  const double width = bar_width > 0.0 ? bar_width : 2.0 * params.sigma;
  const int half = static_cast<int>(std::ceil(params.radii.back())) +
                   static_cast<int>(std::ceil(3.0 * params.sigma)) + 2;
  int size = 2 * half + 1;
  while (!(width < size / 2.0)) size += 2;
  const double orientation = std::numbers::pi / 2.0;
  CosfireModel model =
      configure_filter(make_prototype_bar(width, orientation, size), params);
  model.prototype_descr = "vertical bar width " + fmt_g9(width) + " size " +
                          std::to_string(size);
  return model;
}

CosfireModel rotate_model(const CosfireModel& model, double psi) {
  CosfireModel out = model;
  for (SubUnit& s : out.subunits) s = SubUnit::make(s.sigma, s.rho, s.phi + psi);
  return out;
}

std::string format_model(const CosfireModel& model) {
  std::string out = "BCOSFIRE 1 " + fmt_g9(model.sigma0) + " " + fmt_g9(model.alpha) +
                    " " + std::string(polarity_name(model.polarity)) + "\n";
  if (!model.prototype_descr.empty()) {
    out += "# prototype: " + model.prototype_descr + "\n";
  }
  for (const SubUnit& s : model.subunits) {
    out += fmt_g9(s.sigma) + " " + fmt_g9(s.rho) + " " + fmt_g9(s.phi) + "\n";
  }
  return out;
}

CosfireModel parse_model(const std::string& text) {
  CosfireModel model;
  bool have_header = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = "model line " + std::to_string(lineno);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      constexpr std::string_view tag = "# prototype: ";
      if (line.compare(first, tag.size(), tag) == 0) {
        model.prototype_descr = line.substr(first + tag.size());
      }
      continue;
    }
    const auto tok = split_ws(line);
    if (!have_header) {
      if (tok.size() != 5 || tok[0] != "BCOSFIRE") {
        throw FormatError(where + ": expected header 'BCOSFIRE 1 <sigma0> <alpha> <polarity>'");
      }
      if (tok[1] != "1") throw FormatError(where + ": unsupported version " + std::string(tok[1]));
      model.sigma0 = parse_double(tok[2], where);
      model.alpha = parse_double(tok[3], where);
      try {
        model.polarity = parse_polarity(tok[4]);
      } catch (const ParameterError&) {
        throw FormatError(where + ": bad polarity '" + std::string(tok[4]) + "'");
      }
      if (model.sigma0 < 0.0 || model.alpha < 0.0) {
        throw FormatError(where + ": sigma0 and alpha must be nonnegative");
      }
      have_header = true;
      continue;
    }
    if (tok.size() != 3) throw FormatError(where + ": expected '<sigma> <rho> <phi>'");
    const double sigma = parse_double(tok[0], where);
    const double rho = parse_double(tok[1], where);
    const double phi = parse_double(tok[2], where);
    if (!(sigma > 0.0) || rho < 0.0) {
      throw FormatError(where + ": sigma must be positive and rho nonnegative");
    }
    model.subunits.push_back(SubUnit::make(sigma, rho, phi));
  }
  if (!have_header) throw FormatError("model line " + std::to_string(lineno + 1) + ": missing header");
  if (model.subunits.empty()) throw FormatError("model has no sub-units");
  return model;
}

void save_model(const CosfireModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << format_model(model);
  if (!out) throw IoError("write failed: " + path.string());
}

CosfireModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_model(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace bcosfire
