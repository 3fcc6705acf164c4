#include "bcosfire/respond.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <exception>
#include <numbers>
#include <thread>
#include <tuple>

#include "bcosfire/error.hpp"
#include "kernels/kernels.hpp"

namespace bcosfire {

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
// handled by exactly one call, so results that depend only on i are
// independent of the split.
template <typename Fn>
void parallel_for(int n, int workers, Fn&& fn) {
  workers = std::clamp(workers, 1, std::max(n, 1));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::exception_ptr error;
  std::mutex error_mu;
  for (int t = 0; t < workers; ++t) {
    threads.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

// A map defined on [-pad, W + pad) x [-pad, H + pad).
struct PaddedMap {
  int width = 0;
  int height = 0;
  int pad = 0;
  std::vector<double> data;

  std::ptrdiff_t stride() const { return width + 2 * pad; }
  const double* at(int x, int y) const {
    return data.data() + (y + pad) * stride() + (x + pad);
  }
  double* at(int x, int y) { return data.data() + (y + pad) * stride() + (x + pad); }
};

PaddedMap empty_like(const GrayImage& img, int pad) {
  PaddedMap m{img.width(), img.height(), pad, {}};
  m.data.assign(static_cast<std::size_t>(m.stride()) * (img.height() + 2 * pad), 0.0);
  return m;
}

PaddedMap zero_padded(const GrayImage& img, int pad) {
  PaddedMap m{img.width(), img.height(), pad, {}};
  m.data.assign(static_cast<std::size_t>(m.stride()) * (img.height() + 2 * pad), 0.0);
  for (int y = 0; y < img.height(); ++y) {
    const auto src = img.row(y);
    std::copy(src.begin(), src.end(),
              m.data.begin() + (y + pad) * m.stride() + pad);
  }
  return m;
}

// 1-D factor of the tolerance window, indexed -radius..radius.
std::vector<double> line_weights(double blur_sigma, int& radius) {
  if (!(blur_sigma >= 0.0) || !std::isfinite(blur_sigma)) {
    throw ParameterError("blur sigma must be nonnegative");
  }
  radius = static_cast<int>(std::floor(3.0 * blur_sigma));
  std::vector<double> g(static_cast<std::size_t>(2 * radius + 1), 1.0);
  if (radius == 0) return g;
  const double denom = 2.0 * blur_sigma * blur_sigma;
  for (int i = -radius; i <= radius; ++i) {
    g[static_cast<std::size_t>(i + radius)] = std::exp(-static_cast<double>(i * i) / denom);
  }
  return g;
}

// Weighted max of `dog` on the domain extended by `reach` pixels. The window
// is the product g(i) g(j), so the max separates into a row and a column
// pass. Both pass orders are taken and merged by max; a quarter turn swaps
// them, which keeps the result exactly rotation-equivariant.
PaddedMap blurred_extended(const GrayImage& dog, double blur_sigma, int reach) {
  int radius = 0;
  const std::vector<double> g = line_weights(blur_sigma, radius);
  const double* w = g.data() + radius;
  const int big = radius + reach;
  const int w_out = dog.width() + 2 * reach;
  const int w_big = dog.width() + 2 * big;
  const PaddedMap src = zero_padded(dog, big);
  const auto& k = kernels::active();

  PaddedMap tmp = empty_like(dog, big);
  PaddedMap out = empty_like(dog, reach);
  for (int y = -big; y < dog.height() + big; ++y) {
    k.line_max_row(src.at(-reach, y), 1, w, radius, tmp.at(-reach, y), w_out);
  }
  for (int y = -reach; y < dog.height() + reach; ++y) {
    k.line_max_row(tmp.at(-reach, y), tmp.stride(), w, radius, out.at(-reach, y), w_out);
  }

  std::vector<double> line(static_cast<std::size_t>(w_out));
  for (int y = -reach; y < dog.height() + reach; ++y) {
    k.line_max_row(src.at(-big, y), src.stride(), w, radius, tmp.at(-big, y), w_big);
  }
  for (int y = -reach; y < dog.height() + reach; ++y) {
    k.line_max_row(tmp.at(-reach, y), 1, w, radius, line.data(), w_out);
    k.max_row(out.at(-reach, y), line.data(), w_out);
  }
  return out;
}

struct Group {
  std::size_t begin;
  std::size_t end;
  std::size_t blur;  // index into the blurred-map table
};

}  // namespace

std::vector<double> tolerance_weights(double blur_sigma, int& radius) {
  if (!(blur_sigma >= 0.0) || !std::isfinite(blur_sigma)) {
    throw ParameterError("blur sigma must be nonnegative");
  }
  radius = static_cast<int>(std::floor(3.0 * blur_sigma));
  const int side = 2 * radius + 1;
  std::vector<double> w(static_cast<std::size_t>(side) * side, 1.0);
  if (radius == 0) return w;
  const double denom = 2.0 * blur_sigma * blur_sigma;
  for (int j = -radius; j <= radius; ++j) {
    for (int i = -radius; i <= radius; ++i) {
      w[static_cast<std::size_t>(j + radius) * side + (i + radius)] =
          std::exp(-static_cast<double>(i * i + j * j) / denom);
    }
  }
  return w;
}

GrayImage subunit_response(const GrayImage& dog_map, const SubUnit& su,
                           double sigma0, double alpha) {
  const int sx = su.shift_x();
  const int sy = su.shift_y();
  const PaddedMap blurred = blurred_extended(dog_map, sigma0 + alpha * su.rho,
                                             std::max(std::abs(sx), std::abs(sy)));
  GrayImage out(dog_map.width(), dog_map.height());
  for (int y = 0; y < dog_map.height(); ++y) {
    const double* src = blurred.at(-sx, y - sy);
    std::copy(src, src + dog_map.width(), out.row(y).begin());
  }
  return out;
}

GrayImage geometric_mean(const std::vector<GrayImage>& maps) {
  if (maps.empty()) throw ParameterError("geometric mean of no maps");
  const int w = maps.front().width();
  const int h = maps.front().height();
  for (const auto& m : maps) {
    if (!same_shape(m, maps.front())) throw SizeError("geometric mean: shape mismatch");
  }
  if (maps.size() == 1) return maps.front();
  const auto& k = kernels::active();
  std::vector<double> acc(static_cast<std::size_t>(w) * h, 0.0);
  std::vector<double> logs(acc.size());
  for (const auto& m : maps) {
    auto px = m.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) logs[i] = std::log(px[i]);
    k.accumulate_row(acc.data(), logs.data(), acc.size());
  }
  const double n = static_cast<double>(maps.size());
  GrayImage out(w, h);
  auto dst = out.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::exp(acc[i] / n);
  return out;
}

ResponseMap filter_response(const GrayImage& img, const CosfireModel& model,
                            const ResponseOptions& opts) {
  return rotation_tolerant_response(img, model, 1, opts);
}

ResponseMap rotation_tolerant_response(const GrayImage& img,
                                       const CosfireModel& model, int n_rot,
                                       const ResponseOptions& opts) {
  if (model.subunits.empty()) throw ParameterError("model has no sub-units");
  if (n_rot < 1) throw ParameterError("n_rot must be at least 1");
  const int w = img.width();
  const int h = img.height();

  // One DoG map per distinct sigma.
  std::map<double, GrayImage> dogs;
  for (const SubUnit& s : model.subunits) {
    if (!dogs.count(s.sigma)) {
      dogs.emplace(s.sigma, dog_response(img, make_dog(s.sigma, model.polarity)));
    }
  }

  // One blurred log map per distinct (sigma, rho); the shift for every
  // orientation is read from the extended domain.
  std::map<std::pair<double, double>, std::size_t> blur_index;
  std::vector<std::pair<double, double>> blur_keys;
  std::vector<Group> groups;
  for (std::size_t i = 0; i < model.subunits.size();) {
    const SubUnit& s = model.subunits[i];
    std::size_t j = i + 1;
    while (j < model.subunits.size() && model.subunits[j].sigma == s.sigma &&
           model.subunits[j].rho == s.rho) {
      ++j;
    }
    const auto key = std::make_pair(s.sigma, s.rho);
    auto [it, inserted] = blur_index.emplace(key, blur_keys.size());
    if (inserted) blur_keys.push_back(key);
    groups.push_back({i, j, it->second});
    i = j;
  }

  std::vector<PaddedMap> logs(blur_keys.size());
  parallel_for(static_cast<int>(blur_keys.size()), opts.workers, [&](int b) {
    const auto [sigma, rho] = blur_keys[b];
    const int reach = static_cast<int>(std::ceil(rho));
    PaddedMap m = blurred_extended(dogs.at(sigma), model.blur_sigma(rho), reach);
    // log(0) = -inf annihilates. A lone sub-unit is its own mean; keeping
    // raw values avoids the exp(log v) round trip.
    if (model.subunits.size() > 1) {
      for (double& v : m.data) v = std::log(v);
    }
    logs[b] = std::move(m);
  });

  // Per orientation: sum of log responses, each rho group summed first so a
  // group whose members swap (phi <-> phi + pi) gives the same bits.
  const double neg_inf = -std::numeric_limits<double>::infinity();
  const int workers = std::clamp(opts.workers, 1, n_rot);
  std::vector<std::vector<double>> best(workers,
                                        std::vector<double>(static_cast<std::size_t>(w) * h, neg_inf));
  const auto& k = kernels::active();
  parallel_for(workers, workers, [&](int t) {
    std::vector<double> acc(w);
    std::vector<double> tmp(w);
    std::vector<SubUnit> rotated(model.subunits.size());
    for (int r = t; r < n_rot; r += workers) {
      const double psi = std::numbers::pi * r / n_rot;
      for (std::size_t i = 0; i < rotated.size(); ++i) {
        const SubUnit& s = model.subunits[i];
        rotated[i] = r == 0 ? s : SubUnit::make(s.sigma, s.rho, s.phi + psi);
      }
      for (int y = 0; y < h; ++y) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (const Group& g : groups) {
          const PaddedMap& m = logs[g.blur];
          auto src = [&](std::size_t i) {
            return m.at(-rotated[i].shift_x(), y - rotated[i].shift_y());
          };
          if (g.end - g.begin == 1) {
            k.accumulate_row(acc.data(), src(g.begin), w);
            continue;
          }
          k.add_row(src(g.begin), src(g.begin + 1), tmp.data(), w);
          for (std::size_t i = g.begin + 2; i < g.end; ++i) {
            k.accumulate_row(tmp.data(), src(i), w);
          }
          k.accumulate_row(acc.data(), tmp.data(), w);
        }
        k.max_row(best[t].data() + static_cast<std::size_t>(y) * w, acc.data(), w);
      }
    }
  });
  for (int t = 1; t < workers; ++t) {
    for (int y = 0; y < h; ++y) {
      const std::size_t off = static_cast<std::size_t>(y) * w;
      k.max_row(best[0].data() + off, best[t].data() + off, w);
    }
  }

  // max commutes with the monotone map v -> exp(v / n).
  const double n = static_cast<double>(model.subunits.size());
  ResponseMap out{GrayImage(w, h), model_fingerprint(model), n_rot};
  auto px = out.image.pixels();
  if (model.subunits.size() == 1) {
    std::copy(best[0].begin(), best[0].end(), px.begin());
  } else {
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = std::exp(best[0][i] / n);
  }
  return out;
}

ResponseMap normalize_response(const ResponseMap& resp) {
  const double m = max_value(resp.image);
  if (!(m > 0.0)) return resp;
  ResponseMap out = resp;
  for (double& v : out.image.pixels()) v /= m;
  return out;
}

std::string model_fingerprint(const CosfireModel& model) {
  // FNV-1a over the canonical text form.
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : format_model(model)) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace bcosfire
