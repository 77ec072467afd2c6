// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance            all criteria
//   acceptance 1 4 7      a subset
//
// The image criterion looks for a Peppers picture (TTC_PEPPERS, or
// data/peppers.png / data/peppers.ppm) and otherwise runs on the bundled
// stand-in, saying so on its line.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ttc/image_io.hpp"
#include "ttc/manifest.hpp"
#include "ttc/metrics.hpp"
#include "ttc/solver.hpp"
#include "ttc/synthetic.hpp"

using namespace ttc;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

fs::path scratch_dir(const std::string& tag) {
  std::random_device rd;
  fs::path p = fs::temp_directory_path() / ("ttc_acceptance_" + tag + "_" + std::to_string(rd()));
  fs::create_directories(p);
  return p;
}

// 20^4 of TT rank (4,4,4), mr 0.9, true ranks: RSE <= 1e-3 within 1000
// iterations and 5 minutes. The observer records the first iteration that
// gets there; tol is tightened so the stopping rule does not end the run
// before the target is reachable.
Verdict criterion1() {
  const auto t0 = Clock::now();
  const DenseTensor truth = gen_tt_tensor({20, 20, 20, 20}, {4, 4, 4}, 1);
  const ObservationMask mask = sample_mask(truth.shape(), 0.9, 2).observe(truth);
  SolverConfig cfg = preset("tmac-tt");
  cfg.ranks = numerical_ranks(truth, Scheme::TT);
  cfg.seed = 3;
  cfg.tol = 1e-6;
  cfg.maxiter = 1000;
  int hit = 0;
  double best = 1.0;
  const SolveReport rep = solve(mask, cfg, [&](int it, const DenseTensor& x) {
    const double e = rse(x, truth);
    best = std::min(best, e);
    if (!hit && e <= 1e-3) hit = it;
  });
  const double secs = seconds_since(t0);
  const double final_rse = rse(rep.recovered, truth);
  Verdict v;
  v.pass = hit > 0 && hit <= 1000 && secs <= 300.0 && final_rse <= 1e-3;
  v.detail = "RSE<=1e-3 first at iteration " + (hit ? std::to_string(hit) : std::string("never")) +
             ", final RSE " + fmt(final_rse) + " after " + std::to_string(rep.iterations) +
             " iterations, " + fmt(secs) + " s";
  return v;
}

// 10 instances of 10^5 TT rank (3,3,3,3) at mr 0.7; medians over instances,
// best-of-f per instance (f only matters to the shrinkage solvers).
Verdict criterion2() {
  const auto t0 = Clock::now();
  const std::vector<std::string> ids{"silrtc-tt", "silrtc", "tmac-tt", "tmac"};
  std::map<std::string, std::vector<double>> rses;
  for (int s = 0; s < 10; ++s) {
    const DenseTensor truth = gen_tt_tensor({10, 10, 10, 10, 10}, {3, 3, 3, 3}, 1000 + s);
    const ObservationMask mask = sample_mask(truth.shape(), 0.7, 2000 + s).observe(truth);
    for (const auto& id : ids) {
      const SolverConfig cfg = preset(id);
      const SweepSolver sv{id, cfg, cfg.engine == Engine::Factorization, true};
      rses[id].push_back(run_solver(truth, mask, sv, 7).rse);
    }
  }
  std::map<std::string, double> med;
  for (const auto& id : ids) med[id] = median(rses[id]);
  Verdict v;
  v.pass = med["silrtc-tt"] < med["silrtc"] && med["tmac-tt"] < med["tmac"];
  v.detail = "median RSE silrtc-tt " + fmt(med["silrtc-tt"]) + " vs silrtc " + fmt(med["silrtc"]) +
             ", tmac-tt " + fmt(med["tmac-tt"]) + " vs tmac " + fmt(med["tmac"]) + ", " +
             fmt(seconds_since(t0)) + " s";
  return v;
}

// 3x3 phase-diagram corners for TMac-TT with true ranks, 3 trials per cell.
Verdict criterion3() {
  const auto t0 = Clock::now();
  PhaseDiagramSpec spec;
  spec.generator = GeneratorKind::TT;
  spec.shape = {10, 10, 10, 10, 10};
  spec.rank_axis = {2, 6, 10};
  spec.mr_axis = {0.5, 0.7, 0.9};
  spec.solvers = {SweepSolver{"tmac-tt", preset("tmac-tt"), true, false}};
  spec.trials = 3;
  spec.seed = 2024;
  const PhaseDiagramResult res = run_phase_diagram(spec);
  const PhaseGrid& g = res.grids.front();
  double worst = 0.0;
  int failed = 0;
  for (std::size_t r = 0; r < g.ranks.size(); ++r)
    for (std::size_t m = 0; m < g.mrs.size(); ++m) {
      worst = std::max(worst, g.cell(r, m));
      if (!(g.cell(r, m) <= 1e-2)) ++failed;
    }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = failed == 0 && secs <= 1800.0;
  v.detail = std::to_string(9 - failed) + "/9 cells with mean RSE <= 1e-2, worst cell " + fmt(worst) +
             ", " + fmt(secs) + " s";
  return v;
}

fs::path peppers_path(bool& stand_in) {
  stand_in = false;
  if (const char* env = std::getenv("TTC_PEPPERS"); env && *env && fs::exists(env)) return env;
  for (const char* name : {"peppers.png", "peppers.ppm"}) {
    const fs::path p = fs::path(TTC_DATA_DIR) / name;
    if (fs::exists(p)) return p;
  }
  stand_in = true;
  return fs::path(TTC_DATA_DIR) / "astronaut256.png";
}

// Peppers at mr 0.9, 4^8 x 3 augmentation, TMac-TT with th-initialized ranks
// and the f sweep, through the manifest pipeline. th is not pinned down, so
// a grid is searched and the best run's th is reported.
Verdict criterion4() {
  const auto t0 = Clock::now();
  bool stand_in = false;
  const fs::path input = peppers_path(stand_in);
  const fs::path dir = scratch_dir("image");
  const std::vector<double> ths{0.1, 0.2, 0.25, 0.3, 0.31, 0.32, 0.33, 0.34, 0.35,
                                0.36, 0.37, 0.38, 0.39, 0.4, 0.45, 0.5, 0.6};
  double best = 1.0, best_th = 0.0;
  std::string error;
  for (double th : ths) {
    std::ostringstream man;
    man << "data_kind = image\ninput = " << input.string() << "\nmr = 0.9\nseed = 1\n"
        << "ka = 2x2^8\nsolver = tmac-tt\nsweep_f = true\nth = " << th << "\nout = "
        << (dir / ("th" + fmt(th))).string() << "\n";
    const ExperimentOutcome out = run_manifest(parse_manifest(man.str()));
    if (out.status != 0 || !out.quality) {
      error = out.error;
      continue;
    }
    if (out.quality->rse < best) {
      best = out.quality->rse;
      best_th = th;
    }
  }
  fs::remove_all(dir);
  Verdict v;
  v.pass = error.empty() && best >= 0.12 && best <= 0.20;
  v.detail = "best RSE " + fmt(best) + " at th " + fmt(best_th) + " on " + input.filename().string() +
             (stand_in ? " (stand-in; Peppers not found)" : "") + ", band [0.12, 0.20], " +
             fmt(seconds_since(t0)) + " s" + (error.empty() ? "" : ", error: " + error);
  return v;
}

// Tucker rank 3 data at mr 0.5, true ranks along each solver's splits;
// medians over three instances.
Verdict criterion5() {
  std::vector<double> tt, tucker;
  for (int s = 0; s < 3; ++s) {
    const DenseTensor truth = gen_tucker_tensor({10, 10, 10, 10, 10}, {3, 3, 3, 3, 3}, 10 + s);
    const ObservationMask mask = sample_mask(truth.shape(), 0.5, 20 + s).observe(truth);
    tt.push_back(run_solver(truth, mask, {"tmac-tt", preset("tmac-tt"), true, true}, 5).rse);
    tucker.push_back(run_solver(truth, mask, {"tmac", preset("tmac"), true, true}, 5).rse);
  }
  const double a = median(tt), b = median(tucker);
  Verdict v;
  v.pass = a <= 2.0 * b;
  v.detail = "median RSE tmac-tt " + fmt(a) + " vs tmac " + fmt(b) + " (ratio " + fmt(a / b) + ", limit 2)";
  return v;
}

// The property suites are the unit-test binaries; this line is green only if
// every one of them passes.
Verdict criterion6() {
  std::vector<std::string> bins;
  std::stringstream ss(TTC_PROPERTY_BINARIES);
  for (std::string b; std::getline(ss, b, '|');)
    if (!b.empty()) bins.push_back(b);
  std::vector<std::string> failed;
  for (const auto& b : bins) {
    const std::string cmd = "\"" + b + "\" > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) failed.push_back(fs::path(b).filename().string());
  }
  Verdict v;
  v.pass = !bins.empty() && failed.empty();
  v.detail = std::to_string(bins.size() - failed.size()) + "/" + std::to_string(bins.size()) +
             " property suites green";
  for (const auto& f : failed) v.detail += ", failed: " + f;
  return v;
}

// 16 frames of a panning textured background with a moving ball.
void write_clip(const fs::path& dir) {
  fs::create_directories(dir);
  for (int f = 0; f < 16; ++f) {
    DenseTensor im({64, 64, 3});
    for (Index y = 0; y < 64; ++y)
      for (Index x = 0; x < 64; ++x) {
        const double X = static_cast<double>(x) + 1.5 * f, Y = static_cast<double>(y);
        const double bg[3] = {0.45 + 0.25 * std::sin(X / 9.0) * std::cos(Y / 13.0),
                              0.5 + 0.2 * std::cos((X + Y) / 11.0), 0.4 + 0.3 * Y / 64.0};
        const double cx = 12.0 + 2.5 * f, cy = 32.0 + 10.0 * std::sin(f / 4.0);
        const double a = 1.0 / (1.0 + std::exp((std::hypot(x - cx, y - cy) - 8.0) / 1.2));
        const double ball[3] = {0.9, 0.3, 0.2};
        for (Index c = 0; c < 3; ++c) {
          const Index idx[3] = {y, x, c};
          im.at(idx) = std::clamp((1.0 - a) * bg[c] + a * ball[c], 0.0, 1.0);
        }
      }
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04d.png", f);
    save_image(im, dir / name);
  }
}

// Clip at mr 0.95 through the frames pipeline: TMac-TT on the augmented
// 8^4 x 4^2 x 3 tensor against TMac on the 1024 x 64 x 3 sequence tensor,
// each at its best th.
Verdict criterion7() {
  const auto t0 = Clock::now();
  const fs::path dir = scratch_dir("clip");
  write_clip(dir / "frames");
  const std::vector<double> ths{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::map<std::string, std::pair<double, double>> best;  // solver -> (ssim, th)
  double zero_fill = 0.0;
  std::string error;
  for (const std::string solver : {"tmac-tt", "tmac"}) {
    best[solver] = {-1.0, 0.0};
    for (double th : ths) {
      std::ostringstream man;
      man << "data_kind = frames\ninput = " << (dir / "frames").string() << "\nmr = 0.95\nseed = 3\n"
          << "solver = " << solver << "\nth = " << th << "\nout = " << (dir / solver).string() << "\n";
      if (solver == "tmac-tt") man << "ka = 4x2 4x2 4x2 4x2 2x2 2x2\n";
      const ExperimentOutcome out = run_manifest(parse_manifest(man.str()));
      if (out.status != 0 || !out.quality || !out.quality->ssim) {
        error = out.error;
        continue;
      }
      zero_fill = out.zero_fill->ssim.value_or(0.0);
      if (*out.quality->ssim > best[solver].first) best[solver] = {*out.quality->ssim, th};
    }
  }
  fs::remove_all(dir);
  const double a = best["tmac-tt"].first, b = best["tmac"].first;
  Verdict v;
  v.pass = error.empty() && a > b && a > zero_fill;
  v.detail = "SSIM tmac-tt " + fmt(a) + " (th " + fmt(best["tmac-tt"].second) + ") vs tmac " + fmt(b) +
             " (th " + fmt(best["tmac"].second) + ") vs zero-fill " + fmt(zero_fill) + ", " +
             fmt(seconds_since(t0)) + " s" + (error.empty() ? "" : ", error: " + error);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 synthetic TT recovery 20^4, mr 0.9", criterion1},
      {"2 TT variants beat their counterparts (10 instances, mr 0.7)", criterion2},
      {"3 TMac-TT phase-diagram corners", criterion3},
      {"4 image recovery, mr 0.9, 4^8x3 augmentation", criterion4},
      {"5 Tucker-data parity", criterion5},
      {"6 property suites", criterion6},
      {"7 16-frame clip, mr 0.95, SSIM ordering", criterion7},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!pick.empty() && !pick.count(static_cast<int>(i) + 1)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": " << v.detail << std::endl;
  }
  return failures ? 1 : 0;
}
