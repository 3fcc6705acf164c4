#include "kernels/kernels.hpp"

namespace bcosfire::kernels {

namespace {

// Sum over one 4-cycle of offsets {(a,b), (-b,a), (-a,-b), (b,-a)} paired as
// (p0 + p2) + (p1 + p3). A 90 degree rotation of the image permutes the
// cycle cyclically, which leaves this expression bitwise unchanged.
inline double cycle_sum(const double* c, std::ptrdiff_t stride, int a, int b) {
  const double p0 = c[b * stride + a];
  const double p1 = c[a * stride - b];
  const double p2 = c[-b * stride - a];
  const double p3 = c[-a * stride + b];
  return (p0 + p2) + (p1 + p3);
}

void dog_row(const double* src, std::ptrdiff_t stride, const Orbit* orbits,
             std::size_t n_orbits, double* out, std::size_t width) {
  for (std::size_t x = 0; x < width; ++x) {
    const double* c = src + x;
    const double center = *c;
    double acc = 0.0;
    for (std::size_t k = 0; k < n_orbits; ++k) {
      const Orbit& o = orbits[k];
      double s = cycle_sum(c, stride, o.a, o.b);
      double n = 4.0;
      if (o.cycles == 2) {
        s = s + cycle_sum(c, stride, o.b, o.a);
        n = 8.0;
      }
      acc = acc + o.weight * (s - n * center);
    }
    out[x] = acc > 0.0 ? acc : 0.0;
  }
}

void line_max_row(const double* src, std::ptrdiff_t step, const double* w,
                  int radius, double* out, std::size_t width) {
  for (std::size_t x = 0; x < width; ++x) {
    const double* c = src + x;
    double best = 0.0;
    for (int i = -radius; i <= radius; ++i) {
      const double p = c[i * step] * w[i];
      best = p > best ? p : best;
    }
    out[x] = best;
  }
}

void add_row(const double* a, const double* b, double* out, std::size_t width) {
  for (std::size_t x = 0; x < width; ++x) out[x] = a[x] + b[x];
}

void accumulate_row(double* acc, const double* v, std::size_t width) {
  for (std::size_t x = 0; x < width; ++x) acc[x] = acc[x] + v[x];
}

void max_row(double* best, const double* v, std::size_t width) {
  for (std::size_t x = 0; x < width; ++x) best[x] = best[x] > v[x] ? best[x] : v[x];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{dog_row, line_max_row, add_row,
                                 accumulate_row, max_row};
  return table;
}

}  // namespace bcosfire::kernels
