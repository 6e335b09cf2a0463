#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "textmag/category.hpp"

namespace textmag {

/// Row-major square matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * n_, n_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * n_, n_}; }
  std::span<const double> data() const { return data_; }

  DenseMatrix transposed() const;
  /// Principal submatrix on the given rows/columns, in the given order.
  DenseMatrix principal(std::span<const std::size_t> keep) const;
  double sum() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);

/// Dense matrix whose rows and columns are indexed by category objects.
struct SquareIndexedMatrix {
  std::vector<ObjectId> index;  // canonical order of the owning category
  DenseMatrix entries;

  std::size_t size() const { return index.size(); }
  double operator()(std::size_t r, std::size_t c) const { return entries(r, c); }
  double sum() const { return entries.sum(); }
  /// Restriction to the objects in `objects` (ids of the owning category).
  SquareIndexedMatrix restricted(std::span<const ObjectId> objects) const;
};

double max_abs_diff(const SquareIndexedMatrix& a, const SquareIndexedMatrix& b);

}  // namespace textmag
