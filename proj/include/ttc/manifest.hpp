#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttc/metrics.hpp"
#include "ttc/solver.hpp"
#include "ttc/synthetic.hpp"

namespace ttc {

enum class DataKind { Image, Frames, Synthetic };

// One experiment: load, mask, optionally augment, solve, write artifacts.
// Stored on disk as flat "key = value" lines; '#' starts a comment.
struct ExperimentManifest {
  DataKind kind = DataKind::Image;
  std::filesystem::path input;  // image file or frame directory
  bool merge_rows = true;       // frames: solve on the (F*H, W, 3) sequence tensor

  // Exactly one mask source: random sampling or an overlay image.
  std::optional<double> mr;
  std::optional<std::filesystem::path> overlay;
  std::uint64_t seed = 0;

  std::optional<std::string> ka_levels;  // e.g. "2x2^8"; none when unset
  bool ka_coarse_first = false;
  bool pad = false;  // edge-replicate up to the layout size, crop afterwards

  std::string solver = "tmac-tt";
  SolverConfig config = preset("tmac-tt");
  bool sweep_f = false;

  std::filesystem::path out = "out";

  // Synthetic sweeps.
  PhaseDiagramSpec synthetic;
  std::vector<std::string> synthetic_solvers;
  bool true_ranks = true;
  bool graymaps = true;

  void validate() const;
};

ExperimentManifest parse_manifest(const std::string& text,
                                  const std::filesystem::path& base_dir = {});
ExperimentManifest load_manifest(const std::filesystem::path& path);
// Applies one key/value pair; the CLI flags go through here too.
void set_manifest_key(ExperimentManifest& m, const std::string& key, const std::string& value,
                      const std::filesystem::path& base_dir = {});
std::string format_manifest(const ExperimentManifest& m);

struct ExperimentOutcome {
  int status = 0;  // 0 on success
  std::string error;
  std::optional<QualityReport> quality;
  std::optional<QualityReport> zero_fill;  // observed entries only, zeros elsewhere
  std::optional<SolveReport> solve;
  double f = 0.0;
  std::optional<PhaseDiagramResult> phase;
};

// Writes into m.out:
//   image:     recovered.png, observed.png, quality.json, trace.csv, manifest.txt
//   frames:    frames/frame_NNNN.png, observed/..., quality.json, trace.csv, manifest.txt
//   synthetic: phase_*.csv, summary_*.csv, phase_*.pgm, manifest.txt
// On failure a FAILED file names the stage and error; other files present
// are partial.
ExperimentOutcome run_manifest(const ExperimentManifest& m);

}  // namespace ttc
