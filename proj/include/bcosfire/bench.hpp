#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bcosfire/configure.hpp"
#include "bcosfire/evaluate.hpp"
#include "bcosfire/imgio.hpp"

namespace bcosfire {

enum class ThresholdMode { PerImage, PerDataset };

ThresholdMode parse_threshold_mode(std::string_view name);
std::string_view threshold_mode_name(ThresholdMode mode);

struct DatasetEntry {
  std::filesystem::path image;
  std::filesystem::path ground_truth;
  std::optional<std::filesystem::path> mask;
};

struct DatasetSpec {
  std::string name;
  std::vector<DatasetEntry> entries;
  FilterParams params;
  ThresholdMode threshold_mode = ThresholdMode::PerImage;
  bool invert_input = false;
  ChannelPolicy channel = ChannelPolicy::Green;
  double bar_width = 0.0;  // 0 selects 2 * sigma
};

/// Reads the dataset file format:
///   @name <text>
///   @invert [true|false]      (bare @invert means true)
///   @mode per-image|per-dataset
///   <image> <gt> [mask]       (paths relative to the file's directory)
/// Blank lines and comments ('#' starting a word) are ignored. Parameters are not part of the
/// file; `params` is copied into the result. Without @invert, datasets whose
/// name mentions IOSTAR are inverted (dark vessels on a bright fundus).
DatasetSpec load_dataset_spec(const std::filesystem::path& path, const FilterParams& params);

struct EntryResult {
  std::string image;  // as written in the dataset file
  bool ok = false;
  std::string error;
  double threshold = 0.0;
  MetricSet metrics;
  double seconds = 0.0;  // response stage wall clock
};

struct BenchReport {
  std::string name;
  ThresholdMode mode = ThresholdMode::PerImage;
  std::vector<EntryResult> entries;
  MetricSet mean;             // over successful entries
  double mean_threshold = 0.0;
  double mean_seconds = 0.0;
  bool complete = true;       // false when any entry failed
};

struct BenchOptions {
  int workers = 1;
  /// Optional directory for normalized response and segmentation PGMs.
  std::optional<std::filesystem::path> output_dir;
};

/// Configures the model from a bar prototype, then runs every entry:
/// load, optionally invert, rotation-tolerant response, normalize, threshold
/// selection and metrics. Failed entries are reported, not fatal, unless all
/// fail (Error).
BenchReport run_benchmark(const DatasetSpec& spec, const BenchOptions& opts = {});

/// CSV with the metric columns plus a trailing `seconds` column and a final
/// `mean` row.
std::string format_report_csv(const BenchReport& report);

}  // namespace bcosfire
