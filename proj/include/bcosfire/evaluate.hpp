#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bcosfire/image.hpp"
#include "bcosfire/respond.hpp"

namespace bcosfire {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

struct MetricSet {
  double tpr = 0.0;
  double fpr = 0.0;
  double se = 0.0;
  double sp = 0.0;
  double acc = 0.0;
  double mcc = 0.0;
};

/// Threshold grid: t_k = k / 100, k = 0..100.
inline constexpr int kThresholdSteps = 100;
double threshold_at(int k);

/// true iff resp >= t. t must lie in [0, 1].
BinaryMask threshold(const GrayImage& resp, double t);

/// Counts over pixels where `mask` is set (all pixels without a mask).
ConfusionCounts confusion(const BinaryMask& seg, const BinaryMask& gt,
                          const BinaryMask* mask = nullptr);

/// TPR/FPR/Se/Sp/Acc and MCC = (TP/N - S*P) / sqrt(P*S*(1-S)*(1-P)),
/// S = (TP+FN)/N, P = (TP+FP)/N. Degenerate S or P in {0, 1} gives MCC 0;
/// zero-denominator rates are 0. Throws ParameterError if N == 0.
MetricSet metrics(const ConfusionCounts& c);

/// Confusion counts at every grid threshold, index k <-> threshold_at(k).
std::vector<ConfusionCounts> sweep_counts(const GrayImage& resp, const BinaryMask& gt,
                                          const BinaryMask* mask = nullptr);

struct ThresholdChoice {
  double threshold = 0.0;
  int index = 0;
  MetricSet mean;                 // mean over images (the image itself for one)
  std::vector<MetricSet> per_image;
};

/// Grid threshold with maximal MCC; ties go to the smallest threshold.
ThresholdChoice best_threshold_per_image(const GrayImage& resp, const BinaryMask& gt,
                                         const BinaryMask* mask = nullptr);

struct EvalItem {
  const GrayImage* resp;
  const BinaryMask* gt;
  const BinaryMask* mask;  // may be null
};

/// Single grid threshold maximizing the mean MCC over the items.
ThresholdChoice best_threshold_per_dataset(const std::vector<EvalItem>& items);

/// Same selection from precomputed sweep_counts() results, one per image.
ThresholdChoice best_threshold_from_sweeps(
    const std::vector<std::vector<ConfusionCounts>>& sweeps);

MetricSet mean_metrics(const std::vector<MetricSet>& ms);

/// "image,threshold,tpr,fpr,se,sp,acc,mcc"
std::string csv_header();
/// One CSV row, six decimals.
std::string csv_row(const std::string& image, double threshold, const MetricSet& m);

}  // namespace bcosfire
