#include "textmag/kernels.hpp"

#include <cmath>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "textmag/error.hpp"

namespace textmag::kernels {

std::size_t max_threads() {
#ifdef _OPENMP
  return static_cast<std::size_t>(omp_get_max_threads());
#else
  return 1;
#endif
}

namespace {

std::size_t pivot_row(const DenseMatrix& a, std::size_t k) {
  std::size_t best = k;
  double best_abs = std::abs(a(k, k));
  for (std::size_t i = k + 1; i < a.size(); ++i) {
    const double v = std::abs(a(i, k));
    if (v > best_abs) {
      best = i;
      best_abs = v;
    }
  }
  if (best_abs == 0.0) throw Error(ErrorCode::SingularMatrix, "zero pivot in column " + std::to_string(k));
  return best;
}

void swap_rows(DenseMatrix& a, std::size_t r, std::size_t s) {
  if (r == s) return;
  auto x = a.row(r);
  auto y = a.row(s);
  for (std::size_t j = 0; j < x.size(); ++j) std::swap(x[j], y[j]);
}

// One elimination step; rows other than k are independent.
inline void eliminate_row(DenseMatrix& a, DenseMatrix& inv, std::size_t k, std::size_t i) {
  const double f = a(i, k);
  if (f == 0.0) return;
  const std::size_t n = a.size();
  auto ai = a.row(i);
  auto ak = a.row(k);
  auto vi = inv.row(i);
  auto vk = inv.row(k);
  for (std::size_t j = 0; j < n; ++j) {
    ai[j] -= f * ak[j];
    vi[j] -= f * vk[j];
  }
}

void normalize_pivot(DenseMatrix& a, DenseMatrix& inv, std::size_t k) {
  const double p = a(k, k);
  for (auto& v : a.row(k)) v /= p;
  for (auto& v : inv.row(k)) v /= p;
}

}  // namespace

DenseMatrix invert_serial(DenseMatrix a) {
  const std::size_t n = a.size();
  DenseMatrix inv = DenseMatrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = pivot_row(a, k);
    swap_rows(a, k, p);
    swap_rows(inv, k, p);
    normalize_pivot(a, inv, k);
    for (std::size_t i = 0; i < n; ++i)
      if (i != k) eliminate_row(a, inv, k, i);
  }
  return inv;
}

DenseMatrix invert_omp(DenseMatrix a) {
  const std::size_t n = a.size();
  DenseMatrix inv = DenseMatrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = pivot_row(a, k);
    swap_rows(a, k, p);
    swap_rows(inv, k, p);
    normalize_pivot(a, inv, k);
    const long rows = static_cast<long>(n);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < rows; ++i)
      if (static_cast<std::size_t>(i) != k) eliminate_row(a, inv, k, static_cast<std::size_t>(i));
  }
  return inv;
}

double determinant_serial(DenseMatrix a) {
  const std::size_t n = a.size();
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(best, k))) best = i;
    if (a(best, k) == 0.0) return 0.0;
    if (best != k) {
      swap_rows(a, k, best);
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

namespace {

inline double power(double p, double t) { return p == 0.0 ? 0.0 : (p == 1.0 ? 1.0 : std::pow(p, t)); }

}  // namespace

DenseMatrix zeta_serial(const TextCategory& cat, double t) {
  const std::size_t n = cat.size();
  DenseMatrix z(n);
  for (ObjectId x = 0; x < n; ++x)
    for (ObjectId y = 0; y < n; ++y) z(x, y) = power(cat.pi(x, y), t);
  return z;
}

DenseMatrix zeta_omp(const TextCategory& cat, double t) {
  const std::size_t n = cat.size();
  DenseMatrix z(n);
  const long cols = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long col = 0; col < cols; ++col) {
    const auto y = static_cast<ObjectId>(col);
    z(y, y) = 1.0;
    // Accumulate π(y|a) for each ancestor a while climbing from y.
    double p = 1.0;
    for (ObjectId cur = y; cur != 0;) {
      p *= cat.node(cur).edge_probability;
      cur = cat.node(cur).parent;
      z(cur, y) = power(p, t);
    }
  }
  return z;
}

double sum_serial(const DenseMatrix& m) { return m.sum(); }

double sum_omp(const DenseMatrix& m) {
  const std::size_t n = m.size();
  std::vector<double> rows(n, 0.0);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long r = 0; r < count; ++r) {
    double s = 0.0;
    for (double v : m.row(static_cast<std::size_t>(r))) s += v;
    rows[r] = s;
  }
  double total = 0.0;
  for (double s : rows) total += s;
  return total;
}

}  // namespace textmag::kernels
