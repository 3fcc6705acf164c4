#include <immintrin.h>

#include "kernels/kernels.hpp"

// Compiled with -mavx2 only (no FMA) so every lane rounds exactly like the
// scalar reference.

namespace bcosfire::kernels {

namespace {

inline __m256d load(const double* p) { return _mm256_loadu_pd(p); }

inline __m256d cycle_sum4(const double* c, std::ptrdiff_t stride, int a, int b) {
  const __m256d p0 = load(c + b * stride + a);
  const __m256d p1 = load(c + a * stride - b);
  const __m256d p2 = load(c - b * stride - a);
  const __m256d p3 = load(c - a * stride + b);
  return _mm256_add_pd(_mm256_add_pd(p0, p2), _mm256_add_pd(p1, p3));
}

inline double cycle_sum1(const double* c, std::ptrdiff_t stride, int a, int b) {
  const double p0 = c[b * stride + a];
  const double p1 = c[a * stride - b];
  const double p2 = c[-b * stride - a];
  const double p3 = c[-a * stride + b];
  return (p0 + p2) + (p1 + p3);
}

void dog_row(const double* src, std::ptrdiff_t stride, const Orbit* orbits,
             std::size_t n_orbits, double* out, std::size_t width) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d four = _mm256_set1_pd(4.0);
  const __m256d eight = _mm256_set1_pd(8.0);
  std::size_t x = 0;
  for (; x + 4 <= width; x += 4) {
    const double* c = src + x;
    const __m256d center = load(c);
    __m256d acc = zero;
    for (std::size_t k = 0; k < n_orbits; ++k) {
      const Orbit& o = orbits[k];
      __m256d s = cycle_sum4(c, stride, o.a, o.b);
      __m256d n = four;
      if (o.cycles == 2) {
        s = _mm256_add_pd(s, cycle_sum4(c, stride, o.b, o.a));
        n = eight;
      }
      const __m256d d = _mm256_sub_pd(s, _mm256_mul_pd(n, center));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(o.weight), d));
    }
    // max_pd(a, b) yields a only when a > b, matching `acc > 0 ? acc : 0`.
    _mm256_storeu_pd(out + x, _mm256_max_pd(acc, zero));
  }
  for (; x < width; ++x) {
    const double* c = src + x;
    const double center = *c;
    double acc = 0.0;
    for (std::size_t k = 0; k < n_orbits; ++k) {
      const Orbit& o = orbits[k];
      double s = cycle_sum1(c, stride, o.a, o.b);
      double n = 4.0;
      if (o.cycles == 2) {
        s = s + cycle_sum1(c, stride, o.b, o.a);
        n = 8.0;
      }
      acc = acc + o.weight * (s - n * center);
    }
    out[x] = acc > 0.0 ? acc : 0.0;
  }
}

void line_max_row(const double* src, std::ptrdiff_t step, const double* w,
                  int radius, double* out, std::size_t width) {
  std::size_t x = 0;
  for (; x + 8 <= width; x += 8) {
    const double* c = src + x;
    __m256d best0 = _mm256_setzero_pd();
    __m256d best1 = _mm256_setzero_pd();
    for (int i = -radius; i <= radius; ++i) {
      const __m256d wv = _mm256_set1_pd(w[i]);
      best0 = _mm256_max_pd(_mm256_mul_pd(load(c + i * step), wv), best0);
      best1 = _mm256_max_pd(_mm256_mul_pd(load(c + i * step + 4), wv), best1);
    }
    _mm256_storeu_pd(out + x, best0);
    _mm256_storeu_pd(out + x + 4, best1);
  }
  for (; x < width; ++x) {
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
  std::size_t x = 0;
  for (; x + 4 <= width; x += 4) {
    _mm256_storeu_pd(out + x, _mm256_add_pd(load(a + x), load(b + x)));
  }
  for (; x < width; ++x) out[x] = a[x] + b[x];
}

void accumulate_row(double* acc, const double* v, std::size_t width) {
  std::size_t x = 0;
  for (; x + 4 <= width; x += 4) {
    _mm256_storeu_pd(acc + x, _mm256_add_pd(load(acc + x), load(v + x)));
  }
  for (; x < width; ++x) acc[x] = acc[x] + v[x];
}

void max_row(double* best, const double* v, std::size_t width) {
  std::size_t x = 0;
  for (; x + 4 <= width; x += 4) {
    _mm256_storeu_pd(best + x, _mm256_max_pd(load(best + x), load(v + x)));
  }
  for (; x < width; ++x) best[x] = best[x] > v[x] ? best[x] : v[x];
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{dog_row, line_max_row, add_row,
                                 accumulate_row, max_row};
  return table;
}

}  // namespace bcosfire::kernels
