#include "ttc/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <omp.h>

#include "ttc/errors.hpp"
#include "ttc/metrics.hpp"

namespace ttc {
namespace {

Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

void check_ranks(const std::vector<Index>& ranks, std::size_t expected, const char* what) {
  if (ranks.size() != expected)
    throw ArgumentError(std::string(what) + ": expected " + std::to_string(expected) + " ranks, got " +
                        std::to_string(ranks.size()));
  for (Index r : ranks)
    if (r < 1) throw ArgumentError(std::string(what) + ": ranks must be positive");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mr_code(double mr) { return static_cast<std::uint64_t>(std::llround(mr * 1e6)); }

}  // namespace

std::string to_string(GeneratorKind g) { return g == GeneratorKind::TT ? "tt" : "tucker"; }

DenseTensor gen_tt_tensor(const Shape& shape, const std::vector<Index>& ranks, std::uint64_t seed,
                          std::vector<std::string>* warnings) {
  const std::size_t N = shape.size();
  if (N < 2) throw ArgumentError("gen_tt_tensor needs order >= 2");
  check_ranks(ranks, N - 1, "gen_tt_tensor");
  const Index total = shape_product(shape);
  if (warnings) {
    Index left = 1;
    for (std::size_t k = 0; k + 1 < N; ++k) {
      left *= shape[k];
      const Index bound = std::min(left, total / left);
      if (ranks[k] > bound)
        warnings->push_back("TT rank " + std::to_string(ranks[k]) + " at split " +
                            std::to_string(k + 1) + " exceeds bound " + std::to_string(bound));
    }
  }
  std::mt19937_64 rng(seed);
  // Running contraction of the first k cores, reshaped to (I_1..I_k) x r_k.
  Matrix partial = gaussian(shape[0], ranks[0], rng);
  for (std::size_t k = 1; k < N; ++k) {
    const Index r_in = ranks[k - 1];
    const Index r_out = k + 1 < N ? ranks[k] : 1;
    const Matrix core = gaussian(r_in, shape[k] * r_out, rng);
    Matrix next = partial * core;
    partial = Eigen::Map<Matrix>(next.data(), next.rows() * shape[k], r_out);
  }
  return DenseTensor(shape, std::vector<double>(partial.data(), partial.data() + total));
}

DenseTensor mode_n_product(const DenseTensor& t, const Matrix& m, Index n) {
  const MatricizedView v = unfold_mode_n(t, n);
  if (m.cols() != v.matrix.rows())
    throw ArgumentError("mode_n_product: matrix has " + std::to_string(m.cols()) +
                        " columns, mode has " + std::to_string(v.matrix.rows()));
  Shape out_shape = t.shape();
  out_shape[static_cast<std::size_t>(n)] = m.rows();
  return fold({m * v.matrix, out_shape, Split::mode_n(n)});
}

DenseTensor gen_tucker_tensor(const Shape& shape, const std::vector<Index>& ranks,
                              std::uint64_t seed, std::vector<std::string>* warnings) {
  check_ranks(ranks, shape.size(), "gen_tucker_tensor");
  if (warnings) {
    const Index total = shape_product(shape);
    for (std::size_t n = 0; n < shape.size(); ++n)
      if (ranks[n] > std::min(shape[n], total / shape[n]))
        warnings->push_back("Tucker rank " + std::to_string(ranks[n]) + " at mode " +
                            std::to_string(n + 1) + " exceeds its dimension");
  }
  std::mt19937_64 rng(seed);
  const Matrix core = gaussian(shape_product(ranks), 1, rng);
  DenseTensor t(Shape(ranks.begin(), ranks.end()),
                std::vector<double>(core.data(), core.data() + core.size()));
  for (std::size_t n = 0; n < shape.size(); ++n)
    t = mode_n_product(t, gaussian(shape[n], ranks[n], rng), static_cast<Index>(n));
  return t;
}

ObservationMask sample_mask(const Shape& shape, double mr, std::uint64_t seed) {
  if (!(mr >= 0.0 && mr < 1.0)) throw ArgumentError("missing ratio must lie in [0,1)");
  const Index total = shape_product(shape);
  const Index count = std::llround((1.0 - mr) * static_cast<double>(total));
  if (count < 1) throw ArgumentError("missing ratio leaves no observed entries");
  std::vector<Index> pool(static_cast<std::size_t>(total));
  std::iota(pool.begin(), pool.end(), Index{0});
  std::mt19937_64 rng(seed);
  for (Index i = 0; i < count; ++i) {
    std::uniform_int_distribution<Index> pick(i, total - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return ObservationMask(shape, std::move(pool));
}

std::uint64_t mix_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

CellRun run_solver(const DenseTensor& truth, const ObservationMask& mask, const SweepSolver& solver,
                   std::uint64_t seed) {
  CellRun best;
  const auto start = std::chrono::steady_clock::now();
  try {
    SolverConfig cfg = solver.config;
    cfg.seed = seed;
    if (solver.true_ranks) cfg.ranks = numerical_ranks(truth, cfg.scheme);
    // f only enters the shrinkage engine; a factorization sweep would repeat
    // one deterministic run five times.
    std::vector<double> fs{cfg.f};
    if (solver.sweep_f && cfg.engine == Engine::Shrinkage)
      fs.assign(std::begin(kPenaltyFactors), std::end(kPenaltyFactors));
    bool first = true;
    for (double f : fs) {
      cfg.f = f;
      const SolveReport rep = solve(mask, cfg);
      const double e = rse(rep.recovered, truth);
      if (first || e < best.rse) {
        best.rse = e;
        best.iterations = rep.iterations;
        best.f = f;
        first = false;
      }
    }
  } catch (const std::exception& e) {
    best = CellRun{};
    best.error = e.what();
  }
  best.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return best;
}

PhaseDiagramResult run_phase_diagram(const PhaseDiagramSpec& spec) {
  if (spec.rank_axis.empty() || spec.mr_axis.empty() || spec.solvers.empty())
    throw ArgumentError("phase diagram axes and solver list must be nonempty");
  if (spec.trials < 1) throw ArgumentError("trials must be >= 1");
  const std::size_t N = spec.shape.size();
  const std::size_t R = spec.rank_axis.size(), M = spec.mr_axis.size();
  const std::size_t S = spec.solvers.size(), T = static_cast<std::size_t>(spec.trials);
  const std::size_t tasks = S * R * M * T;

  PhaseDiagramResult result;
  result.records.resize(tasks);
  const int workers = spec.workers > 0 ? spec.workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (std::size_t task = 0; task < tasks; ++task) {
    const std::size_t t = task % T;
    const std::size_t m = (task / T) % M;
    const std::size_t r = (task / (T * M)) % R;
    const std::size_t s = task / (T * M * R);
    const Index rank = spec.rank_axis[r];
    const double mr = spec.mr_axis[m];
    const std::uint64_t rk = static_cast<std::uint64_t>(rank), mk = mr_code(mr), tk = t;

    PhaseRecord& rec = result.records[task];
    rec.solver = spec.solvers[s].id;
    rec.rank = rank;
    rec.mr = mr;
    rec.trial = static_cast<int>(t);
    try {
      const std::uint64_t data_seed = mix_seed(spec.seed, {rk, mk, tk, 0});
      const DenseTensor truth =
          spec.generator == GeneratorKind::TT
              ? gen_tt_tensor(spec.shape, std::vector<Index>(N - 1, rank), data_seed)
              : gen_tucker_tensor(spec.shape, std::vector<Index>(N, rank), data_seed);
      const ObservationMask mask =
          sample_mask(spec.shape, mr, mix_seed(spec.seed, {rk, mk, tk, 1})).observe(truth);
      const CellRun run = run_solver(truth, mask, spec.solvers[s],
                                     mix_seed(spec.seed, {hash_string(rec.solver), rk, mk, tk}));
      rec.rse = run.rse;
      rec.iterations = run.iterations;
      rec.seconds = run.seconds;
    } catch (const std::exception&) {
      rec.rse = 1.0;
    }
  }

  for (std::size_t s = 0; s < S; ++s) {
    PhaseGrid g;
    g.solver = spec.solvers[s].id;
    g.ranks = spec.rank_axis;
    g.mrs = spec.mr_axis;
    g.success_threshold = spec.success_threshold;
    g.trials = spec.trials;
    g.seed = spec.seed;
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t m = 0; m < M; ++m) {
        double sum = 0.0, sq = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
          const double e = result.records[((s * R + r) * M + m) * T + t].rse;
          sum += e;
          sq += e * e;
        }
        const double mean = sum / static_cast<double>(T);
        const double var = T > 1 ? std::max(0.0, (sq - static_cast<double>(T) * mean * mean) /
                                                     static_cast<double>(T - 1))
                                 : 0.0;
        g.mean_rse.push_back(mean);
        g.stderr_rse.push_back(std::sqrt(var / static_cast<double>(T)));
      }
    }
    result.grids.push_back(std::move(g));
  }
  return result;
}

namespace {

void write_records(std::ostream& os, const std::vector<PhaseRecord>& records, const std::string* only) {
  os << kPhaseCsvHeader << "\n";
  os.precision(10);
  for (const PhaseRecord& r : records) {
    if (only && r.solver != *only) continue;
    os << r.solver << "," << r.rank << "," << r.mr << "," << r.trial << "," << r.rse << ","
       << r.iterations << "," << r.seconds << "\n";
  }
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw IoError("cannot write " + p.string());
  return os;
}

}  // namespace

void write_phase_outputs(const PhaseDiagramResult& result, const std::filesystem::path& dir,
                         bool graymaps) {
  std::filesystem::create_directories(dir);
  {
    auto os = open_out(dir / "phase_all.csv");
    write_records(os, result.records, nullptr);
  }
  for (const PhaseGrid& g : result.grids) {
    {
      auto os = open_out(dir / ("phase_" + g.solver + ".csv"));
      write_records(os, result.records, &g.solver);
    }
    {
      auto os = open_out(dir / ("summary_" + g.solver + ".csv"));
      os << "rank,mr,mean_rse,stderr_rse,success\n";
      os.precision(10);
      for (std::size_t r = 0; r < g.ranks.size(); ++r)
        for (std::size_t m = 0; m < g.mrs.size(); ++m)
          os << g.ranks[r] << "," << g.mrs[m] << "," << g.cell(r, m) << ","
             << g.stderr_rse[r * g.mrs.size() + m] << "," << (g.success(r, m) ? 1 : 0) << "\n";
    }
    if (graymaps) {
      // White: success. Gray: partial recovery, darker as RSE grows. Black: RSE >= 1.
      constexpr int kBlock = 16;
      const std::size_t w = g.mrs.size() * kBlock, h = g.ranks.size() * kBlock;
      std::ofstream os(dir / ("phase_" + g.solver + ".pgm"), std::ios::binary);
      if (!os) throw IoError("cannot write graymap for " + g.solver);
      os << "P5\n" << w << " " << h << "\n255\n";
      for (std::size_t y = 0; y < h; ++y) {
        // highest rank on top
        const std::size_t r = g.ranks.size() - 1 - y / kBlock;
        for (std::size_t x = 0; x < w; ++x) {
          const std::size_t m = x / kBlock;
          const double e = g.cell(r, m);
          const unsigned char px =
              g.success(r, m) ? 255
                              : static_cast<unsigned char>(std::lround(200.0 * (1.0 - std::min(e, 1.0))));
          os.put(static_cast<char>(px));
        }
      }
    }
  }
}

}  // namespace ttc
