#include "ttc/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "ttc/errors.hpp"
#include "ttc/kernels.hpp"
#include "ttc/linalg.hpp"

namespace ttc {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::TT: return "tt";
    case Scheme::Tucker: return "tucker";
    case Scheme::Square: return "square";
  }
  return "?";
}

std::string to_string(Engine e) {
  return e == Engine::Shrinkage ? "shrinkage" : "factorization";
}

SolverConfig preset(const std::string& name) {
  SolverConfig cfg;
  if (name == "silrtc") {
    cfg.engine = Engine::Shrinkage, cfg.scheme = Scheme::Tucker;
  } else if (name == "silrtc-tt") {
    cfg.engine = Engine::Shrinkage, cfg.scheme = Scheme::TT;
  } else if (name == "silrtc-square") {
    cfg.engine = Engine::Shrinkage, cfg.scheme = Scheme::Square;
  } else if (name == "tmac") {
    cfg.engine = Engine::Factorization, cfg.scheme = Scheme::Tucker;
  } else if (name == "tmac-tt") {
    cfg.engine = Engine::Factorization, cfg.scheme = Scheme::TT;
  } else if (name == "tmac-square") {
    cfg.engine = Engine::Factorization, cfg.scheme = Scheme::Square;
  } else {
    throw ArgumentError("unknown solver '" + name + "'");
  }
  return cfg;
}

std::vector<std::string> preset_names() {
  return {"silrtc", "silrtc-tt", "silrtc-square", "tmac", "tmac-tt", "tmac-square"};
}

namespace {

Index square_split(Index order) {
  return static_cast<Index>(std::lround(static_cast<double>(order) / 2.0));
}

}  // namespace

std::vector<Split> scheme_splits(Index order, Scheme scheme) {
  if (order < 2) throw ArgumentError("completion needs a tensor of order >= 2");
  std::vector<Split> splits;
  if (scheme == Scheme::Tucker) {
    for (Index n = 0; n < order; ++n) splits.push_back(Split::mode_n(n));
  } else {
    for (Index k = 1; k < order; ++k) splits.push_back(Split::prefix(k));
  }
  return splits;
}

std::vector<double> default_weights(const Shape& shape, Scheme scheme) {
  const Index N = static_cast<Index>(shape.size());
  if (N < 2) throw ArgumentError("default_weights needs order >= 2");
  std::vector<double> w;
  switch (scheme) {
    case Scheme::TT:
      for (Index k = 1; k < N; ++k) {
        const double left = static_cast<double>(shape_product(std::span<const Index>(shape.data(), static_cast<std::size_t>(k))));
        const double right = static_cast<double>(shape_product(shape)) / left;
        w.push_back(std::min(left, right));
      }
      break;
    case Scheme::Tucker:
      for (Index d : shape) w.push_back(static_cast<double>(d));
      break;
    case Scheme::Square:
      w.assign(static_cast<std::size_t>(N - 1), 0.0);
      w[static_cast<std::size_t>(square_split(N) - 1)] = 1.0;
      return w;
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

void SolverConfig::validate(const Shape& shape) const {
  const auto splits = scheme_splits(static_cast<Index>(shape.size()), scheme);
  if (weights) {
    if (weights->size() != splits.size())
      throw ArgumentError("expected " + std::to_string(splits.size()) + " weights, got " +
                          std::to_string(weights->size()));
    double sum = 0.0;
    for (double a : *weights) {
      if (!(a >= 0.0)) throw ArgumentError("weights must be nonnegative");
      sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ArgumentError("weights must sum to 1");
    if (scheme == Scheme::Square && *weights != default_weights(shape, Scheme::Square))
      throw ArgumentError("square scheme requires the one-hot weight at round(N/2)");
  }
  if (!(f > 0.0)) throw ArgumentError("penalty factor f must be positive");
  if (!(th > 0.0 && th < 1.0)) throw ArgumentError("rank threshold th must lie in (0,1)");
  if (!(tol > 0.0)) throw ArgumentError("tol must be positive");
  if (maxiter < 1) throw ArgumentError("maxiter must be at least 1");
  if (ranks) {
    if (ranks->size() != splits.size())
      throw ArgumentError("expected " + std::to_string(splits.size()) + " ranks, got " +
                          std::to_string(ranks->size()));
    for (Index r : *ranks)
      if (r < 1) throw ArgumentError("ranks must be positive");
  }
}

namespace {

using Clock = std::chrono::steady_clock;

// State shared by both engines: the current iterate, the active splits and
// the Omega bookkeeping.
struct Problem {
  Shape shape;
  std::vector<Split> splits;
  std::vector<double> weights;
  std::vector<std::size_t> active;  // splits with nonzero weight
  const ObservationMask* mask = nullptr;
  double reference_norm = 1.0;

  Problem(const ObservationMask& m, const SolverConfig& cfg) : shape(m.shape()), mask(&m) {
    if (m.count() == 0) throw ArgumentError("observation mask is empty");
    if (!kernels::all_finite(m.values())) throw ArgumentError("observed values must be finite");
    cfg.validate(shape);
    splits = scheme_splits(static_cast<Index>(shape.size()), cfg.scheme);
    weights = cfg.weights ? *cfg.weights : default_weights(shape, cfg.scheme);
    for (std::size_t s = 0; s < splits.size(); ++s)
      if (weights[s] > 0.0) active.push_back(s);
    const double norm = std::sqrt(kernels::squared_norm(m.values()));
    reference_norm = norm > 0.0 ? norm : 1.0;
  }

  Index total() const { return shape_product(shape); }

  void reset_observed(std::span<double> x) const {
    kernels::scatter(mask->values(), mask->indices(), x);
  }
};

// X_[k] of the current iterate: a zero-copy map for prefix splits, a
// materialized copy for mode-n splits.
class Unfolder {
 public:
  explicit Unfolder(const Shape& shape) : shape_(shape) {}

  Eigen::Map<const Matrix> operator()(std::span<const double> x, const Split& split) {
    const auto [rows, cols] = unfolded_dims(shape_, split);
    if (split.kind == Split::Kind::Prefix) return {x.data(), rows, cols};
    buffer_.resize(x.size());
    kernels::unfold_mode_n(x, shape_, split.index, buffer_);
    return {buffer_.data(), rows, cols};
  }

  // Writes fold(m) in tensor order into `out`.
  void fold_into(const Matrix& m, const Split& split, std::span<double> out) const {
    const std::span<const double> src(m.data(), static_cast<std::size_t>(m.size()));
    if (split.kind == Split::Kind::Prefix)
      std::copy(src.begin(), src.end(), out.begin());
    else
      kernels::fold_mode_n(src, shape_, split.index, out);
  }

 private:
  Shape shape_;
  std::vector<double> buffer_;
};

struct Loop {
  SolveReport report;
  Clock::time_point start = Clock::now();

  // Records an iteration; returns true once converged.
  bool record(int it, double eps, std::optional<double> objective, double tol) {
    report.iterations = it;
    report.trace.push_back({eps, objective});
    report.converged = eps <= tol;
    return report.converged;
  }

  SolveReport finish(DenseTensor x) {
    report.recovered = std::move(x);
    report.elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    return std::move(report);
  }
};

void check_finite(std::span<const double> x, int it) {
  if (!kernels::all_finite(x))
    throw NumericalError("non-finite value in iterate at iteration " + std::to_string(it), it);
}

// Linear algebra failures carry no iteration number of their own.
template <class Body>
void with_iteration(int it, Body&& body) {
  try {
    body();
  } catch (const NumericalError& e) {
    if (e.iteration() >= 0) throw;
    throw NumericalError(std::string(e.what()) + " at iteration " + std::to_string(it), it);
  }
}

}  // namespace

SolveReport solve_shrinkage(const ObservationMask& mask, const SolverConfig& cfg,
                            const IterationObserver& observer) {
  if (cfg.engine != Engine::Shrinkage) throw ArgumentError("solve_shrinkage needs the shrinkage engine");
  const Problem p(mask, cfg);
  const std::size_t n = static_cast<std::size_t>(p.total());
  Loop loop;

  DenseTensor x = mask.zero_filled();
  std::vector<double> next(n);
  std::vector<std::vector<double>> folded(p.active.size(), std::vector<double>(n));
  std::vector<double> nuclear(p.active.size());
  // gamma_k = alpha_k / beta_k = 1 / f for every active split.
  const double gamma = 1.0 / cfg.f;
  double beta_sum = 0.0;
  for (std::size_t s : p.active) beta_sum += cfg.f * p.weights[s];

  Unfolder unfolder(p.shape);
  for (int it = 1; it <= cfg.maxiter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    with_iteration(it, [&] {
      for (std::size_t a = 0; a < p.active.size(); ++a) {
        const Split& split = p.splits[p.active[a]];
        const ShrinkResult m = shrink_with_norm(unfolder(x.data(), split), gamma);
        unfolder.fold_into(m.matrix, split, folded[a]);
        nuclear[a] = m.nuclear_norm;
        kernels::axpy(cfg.f * p.weights[p.active[a]], folded[a], next);
      }
    });
    kernels::scale_into(1.0 / beta_sum, next, next);
    p.reset_observed(next);
    check_finite(next, it);

    double objective = 0.0;
    for (std::size_t a = 0; a < p.active.size(); ++a) {
      const double alpha = p.weights[p.active[a]];
      objective += alpha * nuclear[a] +
                   0.5 * cfg.f * alpha * kernels::squared_distance(next, folded[a]);
    }
    const double eps = std::sqrt(kernels::squared_distance(next, x.data())) / p.reference_norm;
    std::copy(next.begin(), next.end(), x.data().begin());
    const bool done = loop.record(it, eps, objective, cfg.tol);
    if (observer) observer(it, x);
    if (done) break;
  }
  return loop.finish(std::move(x));
}

SolveReport solve_factorization(const ObservationMask& mask, const SolverConfig& cfg,
                                const IterationObserver& observer) {
  if (cfg.engine != Engine::Factorization)
    throw ArgumentError("solve_factorization needs the factorization engine");
  const Problem p(mask, cfg);
  const std::size_t n = static_cast<std::size_t>(p.total());
  Loop loop;

  std::vector<Index> ranks;
  if (cfg.ranks) {
    ranks = *cfg.ranks;
  } else {
    RankEstimate est = init_ranks(mask, cfg.th, cfg.scheme);
    ranks = std::move(est.ranks);
    for (auto& w : est.warnings) loop.report.warnings.push_back(std::move(w));
  }
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Matrix> V(p.splits.size());
  for (std::size_t s : p.active) {
    const auto [rows, cols] = unfolded_dims(p.shape, p.splits[s]);
    const Index bound = std::min(rows, cols);
    if (ranks[s] > bound) {
      loop.report.warnings.push_back("rank " + std::to_string(ranks[s]) + " for " +
                                     to_string(p.splits[s]) + " exceeds " + std::to_string(bound) +
                                     "; clamped");
      ranks[s] = bound;
    }
    V[s].resize(ranks[s], cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < ranks[s]; ++i) V[s](i, j) = gauss(rng);
  }
  loop.report.ranks = ranks;

  DenseTensor x = mask.zero_filled();
  std::vector<double> next(n);
  std::vector<double> folded(n);
  double alpha_sum = 0.0;
  for (std::size_t s : p.active) alpha_sum += p.weights[s];

  Unfolder unfolder(p.shape);
  Matrix product;
  for (int it = 1; it <= cfg.maxiter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    with_iteration(it, [&] {
      for (std::size_t s : p.active) {
        const Split& split = p.splits[s];
        const auto xk = unfolder(x.data(), split);
        const Matrix U = ls_update_u(xk, V[s]);
        if (!U.allFinite())
          throw NumericalError("non-finite factor along " + to_string(split) + " at iteration " +
                                   std::to_string(it), it);
        V[s] = ls_update_v(U, xk);
        product.noalias() = U * V[s];
        if (split.kind == Split::Kind::Prefix) {
          kernels::axpy(p.weights[s], {product.data(), n}, next);
        } else {
          unfolder.fold_into(product, split, folded);
          kernels::axpy(p.weights[s], folded, next);
        }
      }
    });
    kernels::scale_into(1.0 / alpha_sum, next, next);
    p.reset_observed(next);
    check_finite(next, it);

    const double eps = std::sqrt(kernels::squared_distance(next, x.data())) / p.reference_norm;
    std::copy(next.begin(), next.end(), x.data().begin());
    const bool done = loop.record(it, eps, std::nullopt, cfg.tol);
    if (observer) observer(it, x);
    if (done) break;
  }
  return loop.finish(std::move(x));
}

SolveReport solve(const ObservationMask& mask, const SolverConfig& cfg,
                  const IterationObserver& observer) {
  return cfg.engine == Engine::Shrinkage ? solve_shrinkage(mask, cfg, observer)
                                         : solve_factorization(mask, cfg, observer);
}

RankEstimate init_ranks(const ObservationMask& mask, double th, Scheme scheme) {
  if (!(th > 0.0 && th < 1.0)) throw ArgumentError("rank threshold th must lie in (0,1)");
  const DenseTensor x0 = mask.zero_filled();
  RankEstimate out;
  for (const Split& split : scheme_splits(x0.order(), scheme)) {
    const MatricizedView v = unfold(x0, split);
    const Vector s = singular_values(v.matrix);
    if (!(s[0] > 0.0)) {
      out.warnings.push_back("zero unfolding along " + to_string(split) + "; rank set to 1");
      out.ranks.push_back(1);
    } else {
      out.ranks.push_back(estimate_rank(s, th));
    }
  }
  return out;
}

std::vector<Index> numerical_ranks(const DenseTensor& t, Scheme scheme, double rel_tol) {
  std::vector<Index> ranks;
  for (const Split& split : scheme_splits(t.order(), scheme)) {
    const Vector s = singular_values(unfold(t, split).matrix);
    Index r = 0;
    for (Index l = 0; l < s.size(); ++l)
      if (s[l] > rel_tol * s[0]) ++r;
    ranks.push_back(r);
  }
  return ranks;
}

}  // namespace ttc
