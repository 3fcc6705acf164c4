#pragma once

// Row kernels shared by the scalar and vector paths. Each kernel fills one
// output row; callers loop over rows (and may split rows across threads).
//
// All variants must perform the same IEEE operations in the same order per
// output element, so results are bitwise identical across ISAs.

#include <cstddef>
#include <cstdint>

#include "bcosfire/simd.hpp"

namespace bcosfire::kernels {

/// One symmetry orbit of an 8-fold symmetric kernel: offsets (a, b) with
/// a >= b >= 0, (a, b) != (0, 0). `cycles` is 1 when b == 0 or a == b,
/// otherwise 2 (the orbit splits into two 4-cycles under rotation).
struct Orbit {
  int a;
  int b;
  int cycles;
  double weight;
};

/// Zero-sum DoG correlation for one row with rectification:
///   out[x] = max(0, sum_o w_o * (orbitsum_o(x) - n_o * center(x)))
/// `rows` points at the padded source row of the output row; `stride` is the
/// padded row length and the pointer is already offset by the padding so that
/// rows[dy * stride + dx] addresses offset (dx, dy) for x = 0.
using DogRowFn = void (*)(const double* src, std::ptrdiff_t stride,
                          const Orbit* orbits, std::size_t n_orbits,
                          double* out, std::size_t width);

/// Weighted max along a line, starting from 0:
///   out[x] = max(0, max_{|i|<=r} src[x + i*step] * w[i])
/// `w` points at the centre weight; step 1 runs along the row, step = row
/// stride along the column. src must be readable r steps on both sides.
using LineMaxRowFn = void (*)(const double* src, std::ptrdiff_t step,
                              const double* w, int radius, double* out,
                              std::size_t width);

/// out[x] = a[x] + b[x]
using AddRowFn = void (*)(const double* a, const double* b, double* out,
                          std::size_t width);

/// acc[x] += v[x]
using AccumulateRowFn = void (*)(double* acc, const double* v,
                                 std::size_t width);

/// best[x] = max(best[x], v[x])
using MaxRowFn = void (*)(double* best, const double* v, std::size_t width);

struct KernelTable {
  DogRowFn dog_row;
  LineMaxRowFn line_max_row;
  AddRowFn add_row;
  AccumulateRowFn accumulate_row;
  MaxRowFn max_row;
};

const KernelTable& scalar_table();
#if defined(BCOSFIRE_WITH_AVX2)
const KernelTable& avx2_table();
#endif

/// Table for the currently active ISA.
const KernelTable& active();

}  // namespace bcosfire::kernels
