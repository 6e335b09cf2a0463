#pragma once

// Data-parallel kernels. Each OpenMP kernel has a serial reference with the
// same contract; the test suite checks them against each other and the
// benchmark target times both. Parallel kernels never reduce floating-point
// values across threads, so their output does not depend on the thread count.

#include <cstddef>
#include <span>
#include <vector>

#include "textmag/category.hpp"
#include "textmag/matrix.hpp"

namespace textmag::kernels {

std::size_t max_threads();

/// Gauss-Jordan elimination with partial pivoting. Throws SingularMatrix.
DenseMatrix invert_serial(DenseMatrix a);
DenseMatrix invert_omp(DenseMatrix a);

/// LU with partial pivoting; 0 for exactly singular input.
double determinant_serial(DenseMatrix a);

/// (x,y) -> π(y|x)^t using TextCategory::pi for every pair.
DenseMatrix zeta_serial(const TextCategory& cat, double t);
/// Same matrix, filled column by column by walking each object's ancestors.
DenseMatrix zeta_omp(const TextCategory& cat, double t);

/// Row sums in parallel, combined serially in row order.
double sum_serial(const DenseMatrix& m);
double sum_omp(const DenseMatrix& m);

/// Evaluates f at every point; the output order follows the input.
template <class F>
std::vector<double> map_serial(std::span<const double> xs, F&& f) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
  return out;
}

template <class F>
std::vector<double> map_omp(std::span<const double> xs, F&& f) {
  std::vector<double> out(xs.size());
  const long n = static_cast<long>(xs.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) out[i] = f(xs[i]);
  return out;
}

}  // namespace textmag::kernels
