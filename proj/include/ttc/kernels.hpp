#pragma once

// Data-parallel inner loops shared by the solvers. Every kernel in
// ttc::kernels has a plain serial twin in ttc::kernels::reference with the
// same signature; the tests check them against each other and
// bench/bench_kernels.cpp times them side by side.

#include <span>

#include "ttc/tensor.hpp"

namespace ttc::kernels {

// Mode-n unfolding of a column-major tensor into an I_n x (prod of the
// other dims) column-major matrix, and its inverse.
void unfold_mode_n(std::span<const double> src, std::span<const Index> shape, Index n,
                   std::span<double> dst);
void fold_mode_n(std::span<const double> src, std::span<const Index> shape, Index n,
                 std::span<double> dst);

// dst[i] = src[map[i]]
void gather(std::span<const double> src, std::span<const Index> map, std::span<double> dst);
// dst[map[i]] = src[i]
void scatter(std::span<const double> src, std::span<const Index> map, std::span<double> dst);

// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
// y = a * x
void scale_into(double a, std::span<const double> x, std::span<double> y);

// Chunked reductions. Chunk boundaries do not depend on the thread count, so
// results are bit-identical for any OMP_NUM_THREADS.
double squared_norm(std::span<const double> x);
double squared_distance(std::span<const double> x, std::span<const double> y);

bool all_finite(std::span<const double> x);

namespace reference {

void unfold_mode_n(std::span<const double> src, std::span<const Index> shape, Index n,
                   std::span<double> dst);
void fold_mode_n(std::span<const double> src, std::span<const Index> shape, Index n,
                 std::span<double> dst);
void gather(std::span<const double> src, std::span<const Index> map, std::span<double> dst);
void scatter(std::span<const double> src, std::span<const Index> map, std::span<double> dst);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale_into(double a, std::span<const double> x, std::span<double> y);
double squared_norm(std::span<const double> x);
double squared_distance(std::span<const double> x, std::span<const double> y);
bool all_finite(std::span<const double> x);

}  // namespace reference
}  // namespace ttc::kernels
