#include "textmag/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "textmag/error.hpp"

namespace textmag {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  DenseMatrix m(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.size()) throw Error(ErrorCode::ParseError, "matrix is not square");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(n_);
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t c = 0; c < n_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

DenseMatrix DenseMatrix::principal(std::span<const std::size_t> keep) const {
  DenseMatrix out(keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r)
    for (std::size_t c = 0; c < keep.size(); ++c) out(r, c) = (*this)(keep[r], keep[c]);
  return out;
}

double DenseMatrix::sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t n = a.size();
  DenseMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

SquareIndexedMatrix SquareIndexedMatrix::restricted(std::span<const ObjectId> objects) const {
  std::unordered_map<ObjectId, std::size_t> pos;
  for (std::size_t i = 0; i < index.size(); ++i) pos.emplace(index[i], i);
  std::vector<std::size_t> keep;
  keep.reserve(objects.size());
  for (ObjectId o : objects) {
    auto it = pos.find(o);
    if (it == pos.end()) throw Error(ErrorCode::NotInCategory, "object outside the matrix index");
    keep.push_back(it->second);
  }
  return {std::vector<ObjectId>(objects.begin(), objects.end()), entries.principal(keep)};
}

double max_abs_diff(const SquareIndexedMatrix& a, const SquareIndexedMatrix& b) {
  if (a.index != b.index) return INFINITY;
  return max_abs_diff(a.entries, b.entries);
}

}  // namespace textmag
