#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ttc/mask.hpp"
#include "ttc/tensor.hpp"

namespace ttc {

// Which matricizations carry the low-rank penalty.
//   TT     - prefix splits k = 1..N-1, weights favouring balanced splits
//   Tucker - mode-n splits n = 1..N, weights proportional to I_n
//   Square - the single prefix split k = round(N/2)
enum class Scheme { TT, Tucker, Square };
enum class Engine { Shrinkage, Factorization };

std::string to_string(Scheme s);
std::string to_string(Engine e);

// Empirical penalty factors tried by the sweep helpers.
inline constexpr double kPenaltyFactors[] = {0.01, 0.05, 0.1, 0.5, 1.0};

struct SolverConfig {
  Scheme scheme = Scheme::TT;
  Engine engine = Engine::Factorization;
  std::optional<std::vector<double>> weights;  // overrides default_weights()
  double f = 0.1;                               // beta_k = f * alpha_k
  double th = 0.01;                             // rank threshold for init_ranks()
  std::optional<std::vector<Index>> ranks;      // one per split; overrides init_ranks()
  double tol = 1e-4;
  int maxiter = 1000;
  std::uint64_t seed = 0;

  void validate(const Shape& shape) const;
};

// Named presets: silrtc, silrtc-tt, silrtc-square, tmac, tmac-tt, tmac-square.
SolverConfig preset(const std::string& name);
std::vector<std::string> preset_names();

// Splits penalized under `scheme` for a tensor of the given order.
std::vector<Split> scheme_splits(Index order, Scheme scheme);

std::vector<double> default_weights(const Shape& shape, Scheme scheme);

struct TraceEntry {
  double epsilon = 0.0;                // ||X^{l+1} - X^l||_F / ||T_Omega||_F
  std::optional<double> objective;     // shrinkage engine only
};

struct SolveReport {
  DenseTensor recovered;
  int iterations = 0;
  std::vector<TraceEntry> trace;
  bool converged = false;
  double elapsed = 0.0;  // wall seconds
  std::vector<Index> ranks;  // factorization engine: ranks used per split
  std::vector<std::string> warnings;
};

// Called after every tensor update with the 1-based iteration number.
using IterationObserver = std::function<void(int iteration, const DenseTensor& x)>;

SolveReport solve_shrinkage(const ObservationMask& mask, const SolverConfig& cfg,
                            const IterationObserver& observer = {});
SolveReport solve_factorization(const ObservationMask& mask, const SolverConfig& cfg,
                                const IterationObserver& observer = {});
// Dispatch on cfg.engine.
SolveReport solve(const ObservationMask& mask, const SolverConfig& cfg,
                  const IterationObserver& observer = {});

struct RankEstimate {
  std::vector<Index> ranks;  // one per split of the scheme
  std::vector<std::string> warnings;
};

// Ranks from the zero-filled tensor: per split, the count of singular values
// with s_l / s_1 > th.
RankEstimate init_ranks(const ObservationMask& mask, double th, Scheme scheme = Scheme::TT);

// Numerical rank (relative cutoff `rel_tol`) of every split of the scheme.
std::vector<Index> numerical_ranks(const DenseTensor& t, Scheme scheme, double rel_tol = 1e-10);

}  // namespace ttc
