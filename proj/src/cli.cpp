#include "bcosfire/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "bcosfire/bench.hpp"
#include "bcosfire/configure.hpp"
#include "bcosfire/error.hpp"
#include "bcosfire/evaluate.hpp"
#include "bcosfire/imgio.hpp"
#include "bcosfire/respond.hpp"
#include "bcosfire/simd.hpp"

namespace bcosfire {

namespace {

struct ParamFlags {
  double sigma = 0.0;
  std::string radii;
  double sigma0 = 0.0;
  double alpha = 0.0;
  int nrot = 12;
  std::string polarity = "center-on";

  void add_to(CLI::App* app, bool require) {
    auto* s = app->add_option("--sigma", sigma, "outer DoG standard deviation (pixels)");
    auto* r = app->add_option("--radii", radii, "circle radii, start:step:end or a,b,c");
    if (require) {
      s->required();
      r->required();
    }
    app->add_option("--sigma0", sigma0, "blur std at rho = 0")->capture_default_str();
    app->add_option("--alpha", alpha, "blur growth with rho")->capture_default_str();
    app->add_option("--nrot", nrot, "number of orientations in [0, pi)")->capture_default_str();
    app->add_option("--polarity", polarity, "center-on | center-off")->capture_default_str();
  }

  FilterParams build() const {
    FilterParams p;
    p.sigma = sigma;
    p.radii = parse_radii(radii);
    p.sigma0 = sigma0;
    p.alpha = alpha;
    p.n_rot = nrot;
    p.polarity = parse_polarity(polarity);
    p.validate();
    return p;
  }
};

std::optional<BinaryMask> maybe_mask(const std::vector<std::string>& masks, std::size_t i) {
  if (i < masks.size() && !masks[i].empty()) return load_mask(masks[i]);
  return std::nullopt;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"B-COSFIRE line delineation: configure, respond, segment, evaluate"};
  app.name("bcosfire");
  app.require_subcommand(1);

  std::string isa;
  app.add_option("--isa", isa, "force kernel variant: scalar | avx2");

  // configure
  auto* configure = app.add_subcommand("configure", "configure a filter from a bar prototype");
  ParamFlags cfg;
  double bar_width = 0.0;
  std::string cfg_out;
  cfg.add_to(configure, true);
  configure->add_option("--bar-width", bar_width, "prototype bar width (default 2*sigma)");
  configure->add_option("-o,--output", cfg_out, "model file")->required();

  // respond
  auto* respond = app.add_subcommand("respond", "rotation-tolerant filter response");
  std::string model_path, image_path, resp_out, channel = "green";
  int nrot = 12, workers = 1;
  bool invert_input = false;
  respond->add_option("-m,--model", model_path, "model file")->required();
  respond->add_option("-i,--image", image_path, "input image (PGM/PNG)")->required();
  respond->add_option("--nrot", nrot, "number of orientations")->capture_default_str();
  respond->add_option("--workers", workers, "threads")->capture_default_str();
  respond->add_option("--channel", channel, "green | luma | red | blue")->capture_default_str();
  respond->add_flag("--invert", invert_input, "invert input (dark lines on bright background)");
  respond->add_option("-o,--output", resp_out, "normalized response PGM")->required();

  // segment
  auto* segment = app.add_subcommand("segment", "threshold a response into a binary map");
  std::string seg_resp, seg_gt, seg_mask, seg_out;
  std::optional<double> seg_threshold;
  segment->add_option("-r,--response", seg_resp, "response image")->required();
  segment->add_option("--threshold", seg_threshold, "threshold in [0, 1]");
  segment->add_option("-g,--ground-truth", seg_gt, "pick the MCC-optimal threshold against this");
  segment->add_option("--mask", seg_mask, "evaluation mask for threshold selection");
  segment->add_option("-o,--output", seg_out, "binary PGM")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "pixel-wise metrics as CSV");
  std::vector<std::string> ev_resp, ev_gt, ev_mask;
  std::string ev_mode = "per-image";
  std::optional<double> ev_threshold;
  evaluate->add_option("-r,--response", ev_resp, "response image(s)")->required();
  evaluate->add_option("-g,--ground-truth", ev_gt, "ground truth image(s)")->required();
  evaluate->add_option("--mask", ev_mask, "field-of-view mask(s)");
  evaluate->add_option("--mode", ev_mode, "per-image | per-dataset")->capture_default_str();
  evaluate->add_option("--threshold", ev_threshold, "fixed threshold instead of MCC selection");

  // bench
  auto* bench = app.add_subcommand("bench", "run a dataset and report metrics and timing");
  ParamFlags bp;
  std::string dataset, bench_out, bench_mode, images_dir;
  int bench_workers = 1;
  double bench_bar = 0.0;
  bp.add_to(bench, true);
  bench->add_option("dataset", dataset, "dataset file")->required();
  bench->add_option("--mode", bench_mode, "override the dataset's threshold mode");
  bench->add_option("--workers", bench_workers, "entries processed concurrently")->capture_default_str();
  bench->add_option("--bar-width", bench_bar, "prototype bar width (default 2*sigma)");
  bench->add_option("--images", images_dir, "write response/segmentation PGMs here");
  bench->add_option("-o,--output", bench_out, "CSV file (default: standard output)");

  // make-bar
  auto* make_bar = app.add_subcommand("make-bar", "write a synthetic bar prototype");
  double mb_width = 5.0, mb_orientation = 1.5707963267948966;
  int mb_size = 101;
  std::string mb_out;
  make_bar->add_option("--width", mb_width, "bar width (pixels)")->capture_default_str();
  make_bar->add_option("--orientation", mb_orientation, "radians, pi/2 = vertical")->capture_default_str();
  make_bar->add_option("--size", mb_size, "image side (pixels)")->capture_default_str();
  make_bar->add_option("-o,--output", mb_out, "PGM file")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "bcosfire: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (!isa.empty()) set_isa(isa == "scalar" ? Isa::Scalar : isa == "avx2" ? Isa::Avx2
                                             : throw ParameterError("unknown --isa '" + isa + "'"));

    if (*configure) {
      const CosfireModel model = configure_from_bar(cfg.build(), bar_width);
      save_model(model, cfg_out);
    } else if (*respond) {
      const CosfireModel model = load_model(model_path);
      GrayImage img = load_image(image_path, parse_channel_policy(channel));
      if (invert_input) img = invert(img);
      const ResponseMap resp =
          normalize_response(rotation_tolerant_response(img, model, nrot, {workers}));
      save_image(resp.image, resp_out);
    } else if (*segment) {
      const GrayImage resp = load_image(seg_resp);
      double t;
      if (seg_threshold) {
        t = *seg_threshold;
      } else if (!seg_gt.empty()) {
        const BinaryMask gt = load_mask(seg_gt);
        const auto mask = maybe_mask({seg_mask}, 0);
        t = best_threshold_per_image(resp, gt, mask ? &*mask : nullptr).threshold;
      } else {
        throw ParameterError("segment needs --threshold or -g");
      }
      save_mask(threshold(resp, t), seg_out);
    } else if (*evaluate) {
      if (ev_resp.size() != ev_gt.size()) {
        throw ParameterError("evaluate needs one -g per -r");
      }
      if (!ev_mask.empty() && ev_mask.size() != ev_resp.size()) {
        throw ParameterError("evaluate needs one --mask per -r when masks are given");
      }
      const ThresholdMode mode = parse_threshold_mode(ev_mode);
      std::vector<GrayImage> resps;
      std::vector<BinaryMask> gts;
      std::vector<std::optional<BinaryMask>> masks;
      for (std::size_t i = 0; i < ev_resp.size(); ++i) {
        resps.push_back(load_image(ev_resp[i]));
        gts.push_back(load_mask(ev_gt[i]));
        masks.push_back(maybe_mask(ev_mask, i));
      }
      auto item = [&](std::size_t i) {
        return EvalItem{&resps[i], &gts[i], masks[i] ? &*masks[i] : nullptr};
      };
      out << csv_header() << "\n";
      std::vector<MetricSet> all;
      if (ev_threshold || mode == ThresholdMode::PerDataset) {
        double t = 0.0;
        std::vector<MetricSet> per;
        if (ev_threshold) {
          t = *ev_threshold;
          for (std::size_t i = 0; i < resps.size(); ++i) {
            const EvalItem it = item(i);
            per.push_back(metrics(confusion(threshold(*it.resp, t), *it.gt, it.mask)));
          }
        } else {
          std::vector<EvalItem> items;
          for (std::size_t i = 0; i < resps.size(); ++i) items.push_back(item(i));
          const ThresholdChoice c = best_threshold_per_dataset(items);
          t = c.threshold;
          per = c.per_image;
        }
        for (std::size_t i = 0; i < per.size(); ++i) out << csv_row(ev_resp[i], t, per[i]) << "\n";
        if (per.size() > 1) out << csv_row("mean", t, mean_metrics(per)) << "\n";
      } else {
        double tsum = 0.0;
        for (std::size_t i = 0; i < resps.size(); ++i) {
          const EvalItem it = item(i);
          const ThresholdChoice c = best_threshold_per_image(*it.resp, *it.gt, it.mask);
          out << csv_row(ev_resp[i], c.threshold, c.mean) << "\n";
          all.push_back(c.mean);
          tsum += c.threshold;
        }
        if (all.size() > 1) {
          out << csv_row("mean", tsum / static_cast<double>(all.size()), mean_metrics(all)) << "\n";
        }
      }
    } else if (*bench) {
      DatasetSpec spec = load_dataset_spec(dataset, bp.build());
      if (!bench_mode.empty()) spec.threshold_mode = parse_threshold_mode(bench_mode);
      spec.bar_width = bench_bar;
      BenchOptions opts;
      opts.workers = bench_workers;
      if (!images_dir.empty()) opts.output_dir = images_dir;
      const BenchReport report = run_benchmark(spec, opts);
      const std::string csv = format_report_csv(report);
      if (bench_out.empty()) {
        out << csv;
      } else {
        std::ofstream f(bench_out, std::ios::trunc);
        if (!f) throw IoError("cannot write " + bench_out);
        f << csv;
      }
      if (!report.complete) {
        for (const auto& e : report.entries) {
          if (!e.ok) err << "bcosfire: warning: " << e.image << ": " << e.error << "\n";
        }
      }
    } else if (*make_bar) {
      save_image(make_prototype_bar(mb_width, mb_orientation, mb_size), mb_out);
    }
  } catch (const std::exception& e) {
    err << "bcosfire: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace bcosfire
