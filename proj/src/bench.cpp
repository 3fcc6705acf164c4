#include "bcosfire/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "bcosfire/error.hpp"
#include "bcosfire/respond.hpp"

namespace bcosfire {

namespace fs = std::filesystem;

ThresholdMode parse_threshold_mode(std::string_view name) {
  if (name == "per-image") return ThresholdMode::PerImage;
  if (name == "per-dataset") return ThresholdMode::PerDataset;
  throw ParameterError("unknown threshold mode '" + std::string(name) + "'");
}

std::string_view threshold_mode_name(ThresholdMode mode) {
  return mode == ThresholdMode::PerImage ? "per-image" : "per-dataset";
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool parse_bool(const std::string& v, const std::string& where) {
  const std::string l = lower(v);
  if (l == "true" || l == "yes" || l == "1" || l == "on") return true;
  if (l == "false" || l == "no" || l == "0" || l == "off") return false;
  throw FormatError(where + ": expected a boolean, got '" + v + "'");
}

// Everything an entry contributes to the report before threshold selection.
struct Processed {
  bool ok = false;
  std::string error;
  std::vector<ConfusionCounts> sweep;
  GrayImage response;  // kept only when images are written out
  double seconds = 0.0;
};

Processed process_entry(const DatasetSpec& spec, const DatasetEntry& entry,
                        const CosfireModel& model, bool keep_response) {
  Processed p;
  try {
    GrayImage img = load_image(entry.image, spec.channel);
    const BinaryMask gt = load_mask(entry.ground_truth);
    std::optional<BinaryMask> mask;
    if (entry.mask) mask = load_mask(*entry.mask);
    if (spec.invert_input) img = invert(img);

    const auto start = std::chrono::steady_clock::now();
    ResponseMap resp = rotation_tolerant_response(img, model, spec.params.n_rot);
    const auto stop = std::chrono::steady_clock::now();
    p.seconds = std::chrono::duration<double>(stop - start).count();

    resp = normalize_response(resp);
    p.sweep = sweep_counts(resp.image, gt, mask ? &*mask : nullptr);
    if (keep_response) p.response = std::move(resp.image);
    p.ok = true;
  } catch (const std::exception& e) {
    p.error = e.what();
  }
  return p;
}

}  // namespace

DatasetSpec load_dataset_spec(const fs::path& path, const FilterParams& params) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  DatasetSpec spec;
  spec.params = params;
  spec.name = path.stem().string();
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path q(p);
    return q.is_absolute() ? q : base / q;
  };
  std::optional<bool> invert;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // '#' at the start of a word begins a comment.
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
        line.resize(i);
        break;
      }
    }
    const std::string where = path.string() + ":" + std::to_string(lineno);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '@') {
      std::string value;
      std::getline(ls >> std::ws, value);
      while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back()))) value.pop_back();
      if (first == "@name") {
        spec.name = value;
      } else if (first == "@invert") {
        invert = value.empty() ? true : parse_bool(value, where);
      } else if (first == "@mode") {
        try {
          spec.threshold_mode = parse_threshold_mode(value);
        } catch (const ParameterError& e) {
          throw FormatError(where + ": " + e.what());
        }
      } else {
        throw FormatError(where + ": unknown directive " + first);
      }
      continue;
    }
    DatasetEntry e;
    e.image = resolve(first);
    std::string gt, mask, extra;
    if (!(ls >> gt)) throw FormatError(where + ": expected '<image> <gt> [mask]'");
    e.ground_truth = resolve(gt);
    if (ls >> mask) e.mask = resolve(mask);
    if (ls >> extra) throw FormatError(where + ": too many fields");
    spec.entries.push_back(std::move(e));
  }
  if (spec.entries.empty()) throw FormatError(path.string() + ": no entries");
  spec.invert_input = invert.value_or(lower(spec.name).find("iostar") != std::string::npos);
  return spec;
}

BenchReport run_benchmark(const DatasetSpec& spec, const BenchOptions& opts) {
  if (spec.entries.empty()) throw ParameterError("dataset has no entries");
  const CosfireModel model = configure_from_bar(spec.params, spec.bar_width);

  const int n = static_cast<int>(spec.entries.size());
  std::vector<Processed> done(n);
  const bool keep = opts.output_dir.has_value();
  const int workers = std::clamp(opts.workers, 1, n);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      done[i] = process_entry(spec, spec.entries[i], model, keep);
    }
  };
  std::vector<std::thread> threads;
  for (int t = 1; t < workers; ++t) threads.emplace_back(work);
  work();
  for (auto& th : threads) th.join();

  BenchReport report;
  report.name = spec.name;
  report.mode = spec.threshold_mode;
  report.entries.resize(n);
  std::vector<int> good;
  for (int i = 0; i < n; ++i) {
    EntryResult& r = report.entries[i];
    r.image = spec.entries[i].image.filename().string();
    r.ok = done[i].ok;
    r.error = done[i].error;
    r.seconds = done[i].seconds;
    if (r.ok) good.push_back(i);
  }
  report.complete = static_cast<int>(good.size()) == n;
  if (good.empty()) {
    throw Error("benchmark '" + spec.name + "': every entry failed (first: " +
                report.entries.front().error + ")");
  }

  if (spec.threshold_mode == ThresholdMode::PerDataset) {
    std::vector<std::vector<ConfusionCounts>> sweeps;
    for (int i : good) sweeps.push_back(done[i].sweep);
    const ThresholdChoice c = best_threshold_from_sweeps(sweeps);
    for (std::size_t j = 0; j < good.size(); ++j) {
      report.entries[good[j]].threshold = c.threshold;
      report.entries[good[j]].metrics = c.per_image[j];
    }
  } else {
    for (int i : good) {
      const ThresholdChoice c = best_threshold_from_sweeps({done[i].sweep});
      report.entries[i].threshold = c.threshold;
      report.entries[i].metrics = c.per_image.front();
    }
  }

  std::vector<MetricSet> ms;
  double tsum = 0.0, ssum = 0.0;
  for (int i : good) {
    ms.push_back(report.entries[i].metrics);
    tsum += report.entries[i].threshold;
    ssum += report.entries[i].seconds;
  }
  report.mean = mean_metrics(ms);
  report.mean_threshold = tsum / static_cast<double>(good.size());
  report.mean_seconds = ssum / static_cast<double>(good.size());

  if (opts.output_dir) {
    fs::create_directories(*opts.output_dir);
    for (int i : good) {
      const std::string stem = spec.entries[i].image.stem().string();
      save_image(done[i].response, *opts.output_dir / (stem + "_response.pgm"));
      save_mask(threshold(done[i].response, report.entries[i].threshold),
                *opts.output_dir / (stem + "_segmented.pgm"));
    }
  }
  return report;
}

std::string format_report_csv(const BenchReport& report) {
  std::string out = csv_header() + ",seconds\n";
  char secs[64];
  for (const EntryResult& r : report.entries) {
    if (r.ok) {
      std::snprintf(secs, sizeof secs, ",%.3f\n", r.seconds);
      out += csv_row(r.image, r.threshold, r.metrics) + secs;
    } else {
      out += r.image + ",FAILED,,,,,,,\n";
    }
  }
  std::snprintf(secs, sizeof secs, ",%.3f\n", report.mean_seconds);
  out += csv_row("mean", report.mean_threshold, report.mean) + secs;
  return out;
}

}  // namespace bcosfire
