#include "bcosfire/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "bcosfire/error.hpp"

namespace bcosfire {

namespace {

void check_same(int w1, int h1, int w2, int h2, const char* what) {
  if (w1 != w2 || h1 != h2) {
    throw SizeError(std::string(what) + ": dimension mismatch " + std::to_string(w1) +
                    "x" + std::to_string(h1) + " vs " + std::to_string(w2) + "x" +
                    std::to_string(h2));
  }
}

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// Largest k with threshold_at(k) <= v, or -1 if v < 0.
int grid_index(double v) {
  if (!(v >= 0.0)) return -1;
  int k = static_cast<int>(std::floor(v * kThresholdSteps));
  k = std::min(k, kThresholdSteps);
  while (k < kThresholdSteps && v >= threshold_at(k + 1)) ++k;
  while (k >= 0 && v < threshold_at(k)) --k;
  return k;
}

}  // namespace

double threshold_at(int k) { return static_cast<double>(k) / kThresholdSteps; }

BinaryMask threshold(const GrayImage& resp, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw ParameterError("threshold must lie in [0, 1], got " + std::to_string(t));
  }
  BinaryMask out(resp.width(), resp.height());
  auto px = resp.pixels();
  auto bits = out.bits();
  for (std::size_t i = 0; i < px.size(); ++i) bits[i] = px[i] >= t ? 1 : 0;
  return out;
}

ConfusionCounts confusion(const BinaryMask& seg, const BinaryMask& gt,
                          const BinaryMask* mask) {
  check_same(seg.width(), seg.height(), gt.width(), gt.height(), "confusion");
  if (mask) check_same(seg.width(), seg.height(), mask->width(), mask->height(), "confusion mask");
  ConfusionCounts c;
  auto s = seg.bits();
  auto g = gt.bits();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (mask && !mask->bits()[i]) continue;
    if (g[i]) {
      (s[i] ? c.tp : c.fn)++;
    } else {
      (s[i] ? c.fp : c.tn)++;
    }
  }
  return c;
}

MetricSet metrics(const ConfusionCounts& c) {
  const std::int64_t n = c.total();
  if (n <= 0) throw ParameterError("metrics: no evaluated pixels");
  MetricSet m;
  m.tpr = ratio(c.tp, c.tp + c.fn);
  m.se = m.tpr;
  m.fpr = ratio(c.fp, c.fp + c.tn);
  m.sp = ratio(c.tn, c.tn + c.fp);
  m.acc = ratio(c.tp + c.tn, n);
  const double N = static_cast<double>(n);
  const double S = static_cast<double>(c.tp + c.fn) / N;
  const double P = static_cast<double>(c.tp + c.fp) / N;
  const bool degenerate = c.tp + c.fn == 0 || c.tp + c.fn == n ||
                          c.tp + c.fp == 0 || c.tp + c.fp == n;
  if (!degenerate) {
    m.mcc = (static_cast<double>(c.tp) / N - S * P) /
            std::sqrt(P * S * (1.0 - S) * (1.0 - P));
    m.mcc = std::clamp(m.mcc, -1.0, 1.0);
  }
  return m;
}

std::vector<ConfusionCounts> sweep_counts(const GrayImage& resp, const BinaryMask& gt,
                                          const BinaryMask* mask) {
  check_same(resp.width(), resp.height(), gt.width(), gt.height(), "sweep");
  if (mask) check_same(resp.width(), resp.height(), mask->width(), mask->height(), "sweep mask");
  // hist_*[k]: pixels whose largest passed grid threshold is k.
  std::vector<std::int64_t> hist_pos(kThresholdSteps + 1, 0);
  std::vector<std::int64_t> hist_neg(kThresholdSteps + 1, 0);
  std::int64_t n_pos = 0, n_neg = 0;
  auto px = resp.pixels();
  auto g = gt.bits();
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (mask && !mask->bits()[i]) continue;
    const int k = grid_index(px[i]);
    if (g[i]) {
      ++n_pos;
      if (k >= 0) ++hist_pos[k];
    } else {
      ++n_neg;
      if (k >= 0) ++hist_neg[k];
    }
  }
  std::vector<ConfusionCounts> out(kThresholdSteps + 1);
  std::int64_t above_pos = 0, above_neg = 0;
  for (int k = kThresholdSteps; k >= 0; --k) {
    above_pos += hist_pos[k];
    above_neg += hist_neg[k];
    out[k] = {above_pos, above_neg, n_neg - above_neg, n_pos - above_pos};
  }
  return out;
}

ThresholdChoice best_threshold_per_image(const GrayImage& resp, const BinaryMask& gt,
                                         const BinaryMask* mask) {
  return best_threshold_per_dataset({EvalItem{&resp, &gt, mask}});
}

ThresholdChoice best_threshold_per_dataset(const std::vector<EvalItem>& items) {
  if (items.empty()) throw ParameterError("threshold selection needs at least one image");
  std::vector<std::vector<ConfusionCounts>> sweeps;
  sweeps.reserve(items.size());
  for (const EvalItem& it : items) sweeps.push_back(sweep_counts(*it.resp, *it.gt, it.mask));
  return best_threshold_from_sweeps(sweeps);
}

ThresholdChoice best_threshold_from_sweeps(
    const std::vector<std::vector<ConfusionCounts>>& sweeps) {
  if (sweeps.empty()) throw ParameterError("threshold selection needs at least one image");
  std::vector<std::vector<MetricSet>> table;  // [image][k]
  table.reserve(sweeps.size());
  for (const auto& counts : sweeps) {
    if (counts.size() != kThresholdSteps + 1) throw ParameterError("sweep has wrong length");
    std::vector<MetricSet> row;
    row.reserve(counts.size());
    for (const auto& c : counts) row.push_back(metrics(c));
    table.push_back(std::move(row));
  }
  int best_k = 0;
  double best_mcc = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kThresholdSteps; ++k) {
    double sum = 0.0;
    for (const auto& row : table) sum += row[k].mcc;
    const double mean = sum / static_cast<double>(table.size());
    if (mean > best_mcc) {
      best_mcc = mean;
      best_k = k;
    }
  }
  ThresholdChoice choice;
  choice.index = best_k;
  choice.threshold = threshold_at(best_k);
  for (const auto& row : table) choice.per_image.push_back(row[best_k]);
  choice.mean = mean_metrics(choice.per_image);
  return choice;
}

MetricSet mean_metrics(const std::vector<MetricSet>& ms) {
  MetricSet m;
  if (ms.empty()) return m;
  for (const auto& x : ms) {
    m.tpr += x.tpr;
    m.fpr += x.fpr;
    m.se += x.se;
    m.sp += x.sp;
    m.acc += x.acc;
    m.mcc += x.mcc;
  }
  const double n = static_cast<double>(ms.size());
  m.tpr /= n;
  m.fpr /= n;
  m.se /= n;
  m.sp /= n;
  m.acc /= n;
  m.mcc /= n;
  return m;
}

std::string csv_header() { return "image,threshold,tpr,fpr,se,sp,acc,mcc"; }

std::string csv_row(const std::string& image, double threshold, const MetricSet& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f", threshold, m.tpr,
                m.fpr, m.se, m.sp, m.acc, m.mcc);
  return image + "," + buf;
}

}  // namespace bcosfire
