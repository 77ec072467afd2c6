#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ttc/mask.hpp"
#include "ttc/solver.hpp"
#include "ttc/tensor.hpp"

namespace ttc {

// Tensor with entries A1[i1] A2[i2] ... AN[iN] from standard-normal TT cores
// of ranks (r_1..r_{N-1}). Ranks above the unfolding bound are allowed; a
// note is appended to `warnings` when given.
DenseTensor gen_tt_tensor(const Shape& shape, const std::vector<Index>& ranks, std::uint64_t seed,
                          std::vector<std::string>* warnings = nullptr);

// G x_1 A1 ... x_N AN with a standard-normal core of size r_1 x ... x r_N
// and standard-normal I_n x r_n factors.
DenseTensor gen_tucker_tensor(const Shape& shape, const std::vector<Index>& ranks,
                              std::uint64_t seed, std::vector<std::string>* warnings = nullptr);

// n-mode product: replaces mode n (0-based) by m.rows().
DenseTensor mode_n_product(const DenseTensor& t, const Matrix& m, Index n);

// Exactly round((1 - mr) * prod(shape)) indices drawn uniformly without
// replacement. Values are zero; bind them with ObservationMask::observe().
ObservationMask sample_mask(const Shape& shape, double mr, std::uint64_t seed);

// Seed derived from a master seed and cell coordinates (splitmix64 chain),
// so a cell's randomness does not depend on when it runs.
std::uint64_t mix_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts);
std::uint64_t hash_string(const std::string& s);

enum class GeneratorKind { TT, Tucker };
std::string to_string(GeneratorKind g);

// A solver taking part in a sweep. With `true_ranks`, ranks are the numerical
// ranks of the ground truth along the solver's splits; otherwise the config's
// own ranks or th rule applies.
struct SweepSolver {
  std::string id;
  SolverConfig config;
  bool true_ranks = false;
  bool sweep_f = false;  // try every kPenaltyFactors value, keep the best RSE
};

// Solves one masked instance, optionally sweeping f. Failures count as RSE 1.
struct CellRun {
  double rse = 1.0;
  int iterations = 0;
  double seconds = 0.0;
  double f = 0.0;
  std::optional<std::string> error;
};
CellRun run_solver(const DenseTensor& truth, const ObservationMask& mask, const SweepSolver& solver,
                   std::uint64_t seed);

struct PhaseRecord {
  std::string solver;
  Index rank = 0;
  double mr = 0.0;
  int trial = 0;
  double rse = 1.0;
  int iterations = 0;
  double seconds = 0.0;
};

struct PhaseGrid {
  std::string solver;
  std::vector<Index> ranks;        // rows
  std::vector<double> mrs;         // columns
  std::vector<double> mean_rse;    // ranks.size() x mrs.size(), row-major
  std::vector<double> stderr_rse;  // standard error over trials
  double success_threshold = 1e-2;
  int trials = 3;
  std::uint64_t seed = 0;

  double cell(std::size_t r, std::size_t m) const { return mean_rse[r * mrs.size() + m]; }
  bool success(std::size_t r, std::size_t m) const { return cell(r, m) <= success_threshold; }
};

struct PhaseDiagramSpec {
  GeneratorKind generator = GeneratorKind::TT;
  Shape shape;
  std::vector<Index> rank_axis;
  std::vector<double> mr_axis;
  std::vector<SweepSolver> solvers;
  int trials = 3;
  std::uint64_t seed = 0;
  double success_threshold = 1e-2;
  int workers = 0;  // 0: OpenMP default
};

struct PhaseDiagramResult {
  std::vector<PhaseGrid> grids;  // one per solver, in spec order
  std::vector<PhaseRecord> records;
};

PhaseDiagramResult run_phase_diagram(const PhaseDiagramSpec& spec);

// Writes <dir>/phase_<solver>.csv, <dir>/phase_all.csv, <dir>/summary_<solver>.csv
// and, with `graymaps`, <dir>/phase_<solver>.pgm.
void write_phase_outputs(const PhaseDiagramResult& result, const std::filesystem::path& dir,
                         bool graymaps = true);

inline constexpr const char* kPhaseCsvHeader = "solver,rank,mr,trial,rse,iterations,seconds";

}  // namespace ttc
