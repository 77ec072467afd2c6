// ttcomp: command-line front end for tensor completion experiments.
//
//   ttcomp complete --input peppers.png --mr 0.9 --ka 2x2^8 --solver tmac-tt --out run1
//   ttcomp complete --manifest run.txt
//   ttcomp phase-diagram --shape 10,10,10,10,10 --ranks 2,6,10 --mrs 0.5,0.7,0.9 --solvers tmac-tt
//   ttcomp augment --input peppers.png --ka 2x2^8 --out peppers.ttc
//   ttcomp metrics --recovered run1/recovered.png --reference peppers.png

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ttc/augment.hpp"
#include "ttc/errors.hpp"
#include "ttc/image_io.hpp"
#include "ttc/manifest.hpp"
#include "ttc/metrics.hpp"

namespace fs = std::filesystem;
using namespace ttc;

namespace {

// Flags that map one-to-one onto manifest keys.
struct KeyFlag {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr KeyFlag kCompleteFlags[] = {
    {"--input", "input", "image file, or frame directory with --frames"},
    {"--mr", "mr", "missing ratio for a uniform random mask"},
    {"--overlay", "overlay", "overlay image; white pixels are missing"},
    {"--seed", "seed", "seed for the mask and solver initialization"},
    {"--solver", "solver", "silrtc, silrtc-tt, silrtc-square, tmac, tmac-tt, tmac-square"},
    {"--ka", "ka", "ket augmentation levels, e.g. 2x2^8 or '3x2 3x2'"},
    {"--ka-order", "ka_order", "fine (default) or coarse block-mode order"},
    {"--f", "f", "penalty factor, beta_k = f * alpha_k"},
    {"--th", "th", "singular-value ratio threshold for initial ranks"},
    {"--ranks", "ranks", "explicit ranks, one per split"},
    {"--tol", "tol", "relative-change tolerance"},
    {"--maxiter", "maxiter", "iteration cap"},
    {"--out", "out", "output directory"},
};

int run_and_report(const ExperimentManifest& m) {
  const ExperimentOutcome out = run_manifest(m);
  if (out.status != 0) {
    std::cerr << "ttcomp: " << out.error << "\n";
    return out.status;
  }
  if (out.quality) {
    std::cout << "rse " << out.quality->rse;
    if (out.quality->ssim) std::cout << "  ssim " << *out.quality->ssim;
    std::cout << "  iterations " << out.solve->iterations << (out.solve->converged ? " (converged)" : "")
              << "  f " << out.f << "\n";
    for (const auto& w : out.solve->warnings) std::cerr << "warning: " << w << "\n";
  }
  if (out.phase)
    for (const auto& g : out.phase->grids)
      std::cout << g.solver << ": " << std::count_if(g.mean_rse.begin(), g.mean_rse.end(),
                                                    [&](double e) { return e <= g.success_threshold; })
                << "/" << g.mean_rse.size() << " cells recovered\n";
  std::cout << "artifacts in " << m.out.string() << "\n";
  return 0;
}

int run_complete(const std::string& manifest_path, const std::map<std::string, std::string>& flags,
                 bool frames, bool pad, bool sweep_f, bool no_merge) {
  ExperimentManifest m = manifest_path.empty() ? ExperimentManifest{} : load_manifest(manifest_path);
  if (flags.count("solver")) set_manifest_key(m, "solver", flags.at("solver"));
  for (const auto& [k, v] : flags)
    if (k != "solver") set_manifest_key(m, k, v);
  if (frames) m.kind = DataKind::Frames;
  if (no_merge) m.merge_rows = false;
  if (pad) m.pad = true;
  if (sweep_f) m.sweep_f = true;
  return run_and_report(m);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank tensor completion via tensor-train and Tucker ranks"};
  app.require_subcommand(1);

  // complete
  auto* complete = app.add_subcommand("complete", "complete an image or video (flags or manifest)");
  std::string manifest_path;
  std::map<std::string, std::string> complete_values;
  complete->add_option("--manifest", manifest_path, "key = value manifest file")->check(CLI::ExistingFile);
  for (const auto& f : kCompleteFlags) complete->add_option(f.flag, complete_values[f.key], f.help);
  bool frames = false, pad = false, sweep_f = false, no_merge = false;
  complete->add_flag("--frames", frames, "--input is a directory of frames");
  complete->add_flag("--no-merge", no_merge, "keep frames as a 4-way tensor");
  complete->add_flag("--pad", pad, "edge-replicate to the layout size, crop after solving");
  complete->add_flag("--sweep-f", sweep_f, "try f in {0.01,0.05,0.1,0.5,1}, keep the best");

  // phase-diagram
  auto* phase = app.add_subcommand("phase-diagram", "synthetic rank / missing-ratio sweep");
  std::map<std::string, std::string> phase_values;
  const std::pair<const char*, const char*> phase_flags[] = {
      {"--generator", "generator"}, {"--shape", "shape"},   {"--ranks", "rank_axis"},
      {"--mrs", "mr_axis"},         {"--solvers", "solvers"}, {"--trials", "trials"},
      {"--seed", "seed"},           {"--tol", "tol"},       {"--maxiter", "maxiter"},
      {"--f", "f"},                 {"--th", "th"},         {"--threshold", "success_threshold"},
      {"--workers", "workers"},     {"--out", "out"}};
  for (const auto& [flag, key] : phase_flags) phase->add_option(flag, phase_values[key]);
  bool estimated_ranks = false, phase_sweep = false, full_scale = false;
  phase->add_flag("--estimated-ranks", estimated_ranks, "use the th rule instead of true ranks");
  phase->add_flag("--sweep-f", phase_sweep, "best of the five f values per cell");
  phase->add_flag("--full-scale", full_scale, "20^5 tensors, ranks 2..16 (slow)");

  // augment
  auto* augment = app.add_subcommand("augment", "ket-augment an image into a tensor file, or invert");
  std::string aug_input, aug_levels, aug_out, aug_order = "fine";
  bool aug_inverse = false;
  Index aug_h = 0, aug_w = 0;
  augment->add_option("--input", aug_input)->required();
  augment->add_option("--ka", aug_levels, "levels, e.g. 2x2^8")->required();
  augment->add_option("--ka-order", aug_order);
  augment->add_option("--out", aug_out)->required();
  augment->add_flag("--inverse", aug_inverse, "input is an augmented tensor file; write an image");
  augment->add_option("--height", aug_h, "with --inverse: image height");
  augment->add_option("--width", aug_w, "with --inverse: image width");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "RSE / SSIM between two images or frame directories");
  std::string rec_path, ref_path;
  bool rgb_average = false;
  metrics->add_option("--recovered", rec_path)->required();
  metrics->add_option("--reference", ref_path)->required();
  metrics->add_flag("--rgb-average", rgb_average, "average SSIM over RGB instead of luminance");
  std::vector<std::string> entropy_splits;
  metrics->add_option("--entropy", entropy_splits, "also report entropy for splits like prefix:2 or mode:1");

  CLI11_PARSE(app, argc, argv);

  try {
    if (complete->parsed()) {
      std::map<std::string, std::string> flags;
      for (const auto& [k, v] : complete_values)
        if (!v.empty()) flags[k] = v;
      return run_complete(manifest_path, flags, frames, pad, sweep_f, no_merge);
    }

    if (phase->parsed()) {
      ExperimentManifest m;
      m.kind = DataKind::Synthetic;
      m.synthetic.shape = {10, 10, 10, 10, 10};
      m.synthetic.rank_axis = {2, 4, 6, 8, 10};
      m.synthetic.mr_axis = {0.5, 0.6, 0.7, 0.8, 0.9};
      m.synthetic_solvers = {"tmac-tt", "tmac", "tmac-square"};
      m.out = "phase";
      if (full_scale) {
        std::cerr << "warning: full-scale grid (20^5 entries per cell) takes hours\n";
        m.synthetic.shape = {20, 20, 20, 20, 20};
        m.synthetic.rank_axis.clear();
        for (Index r = 2; r <= 16; r += 2) m.synthetic.rank_axis.push_back(r);
      }
      if (!phase_values["solvers"].empty()) set_manifest_key(m, "solvers", phase_values["solvers"]);
      for (const auto& [k, v] : phase_values)
        if (!v.empty() && k != "solvers") set_manifest_key(m, k, v);
      m.true_ranks = !estimated_ranks;
      m.sweep_f = phase_sweep;
      return run_and_report(m);
    }

    if (augment->parsed()) {
      const auto levels = parse_levels(aug_levels);
      const bool coarse = aug_order == "coarse";
      if (!aug_inverse) {
        const DenseTensor img = load_image(aug_input);
        const KaLayout layout(img.dim(0), img.dim(1), img.dim(2), levels, coarse);
        save_tensor(ka_forward(img, layout), aug_out);
        std::cout << "levels " << layout.levels_string() << "\n"
                  << "augmented shape " << shape_string(layout.augmented_shape()) << "\n";
      } else {
        const DenseTensor t = load_tensor(aug_input);
        if (aug_h < 1 || aug_w < 1) throw ArgumentError("--inverse needs --height and --width");
        const KaLayout layout(aug_h, aug_w, t.shape().back(), levels, coarse);
        save_image(ka_inverse(t, layout), aug_out);
        std::cout << "image " << shape_string(layout.source_shape()) << "\n";
      }
      return 0;
    }

    if (metrics->parsed()) {
      const bool dirs = fs::is_directory(ref_path);
      DenseTensor rec = dirs ? load_video_frames(rec_path, false) : load_image(rec_path);
      DenseTensor ref = dirs ? load_video_frames(ref_path, false) : load_image(ref_path);
      if (!dirs) {
        Shape s{1};
        s.insert(s.end(), rec.shape().begin(), rec.shape().end());
        rec = DenseTensor(s, {rec.data().begin(), rec.data().end()});
        ref = DenseTensor(s, {ref.data().begin(), ref.data().end()});
      }
      SsimOptions opt;
      opt.rgb_average = rgb_average;
      const QualityReport q = mean_ssim(rec, ref, 0, opt);
      nlohmann::json j;
      j["rse"] = q.rse;
      j["ssim"] = *q.ssim;
      j["frame_ssim"] = q.frame_ssim;
      j["warnings"] = q.warnings;
      for (const auto& spec : entropy_splits) {
        const auto colon = spec.find(':');
        if (colon == std::string::npos) throw ArgumentError("entropy split must be prefix:K or mode:N");
        const std::string kind = spec.substr(0, colon);
        const Index idx = std::stoll(spec.substr(colon + 1));
        const Split split = kind == "mode" ? Split::mode_n(idx - 1) : Split::prefix(idx);
        j["entropy"][spec] = entanglement_entropy(ref, split);
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "ttcomp: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
