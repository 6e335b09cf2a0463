#include "textmag/homology.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "textmag/error.hpp"
#include "textmag/format.hpp"

namespace textmag {

namespace {

struct ComparablePair {
  ObjectId x;
  ObjectId y;
  std::size_t steps;  // |y| - |x|
  double grade;
  std::size_t cls = 0;
};

std::vector<ComparablePair> finite_pairs(const TextCategory& cat) {
  std::vector<ComparablePair> out;
  for (ObjectId y = 0; y < cat.size(); ++y) {
    out.push_back({y, y, 0, 0.0});
    std::size_t steps = 0;
    for (ObjectId cur = y; cur != 0;) {
      cur = cat.node(cur).parent;
      ++steps;
      const double p = cat.pi(cur, y);
      if (p == 0.0) break;  // every higher ancestor is also at infinite distance
      out.push_back({cur, y, steps, cat.distance(cur, y)});
    }
  }
  return out;
}

std::vector<GradeClass> merge_grades(std::vector<ComparablePair>& pairs, double tol) {
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pairs[a].grade < pairs[b].grade; });
  std::vector<GradeClass> classes;
  double lo = 0.0, prev = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double g = pairs[order[i]].grade;
    if (i == 0 || g - prev > tol) {
      if (i != 0) classes.back().ell = sum / static_cast<double>(classes.back().pairs);
      classes.push_back({g, 0.0, 0});
      lo = g;
      sum = 0.0;
    }
    auto& c = classes.back();
    ++c.pairs;
    sum += g;
    c.width = g - lo;
    pairs[order[i]].cls = classes.size() - 1;
    prev = g;
  }
  if (!classes.empty()) classes.back().ell = sum / static_cast<double>(classes.back().pairs);
  return classes;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  boost::multiprecision::cpp_int r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::size_t>::max()) return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(r);
}

// Chains of degree k inside a saturated chain with `steps` links.
std::size_t chains_in(std::size_t steps, std::size_t k) {
  if (k == 0) return steps == 0 ? 1 : 0;
  if (steps == 0) return 0;
  return binomial(steps - 1, k - 1);
}

struct Overflow {};

struct CheckedInt {
  std::int64_t v = 0;
  CheckedInt() = default;
  CheckedInt(std::int64_t x) : v(x) {}
  friend CheckedInt operator*(CheckedInt a, CheckedInt b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a.v, b.v, &r)) throw Overflow{};
    return r;
  }
  friend CheckedInt operator-(CheckedInt a, CheckedInt b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a.v, b.v, &r)) throw Overflow{};
    return r;
  }
  friend CheckedInt operator/(CheckedInt a, CheckedInt b) { return a.v / b.v; }
  bool is_zero() const { return v == 0; }
};

using BigInt = boost::multiprecision::cpp_int;
inline bool is_zero(const BigInt& v) { return v.is_zero(); }
inline bool is_zero(const CheckedInt& v) { return v.is_zero(); }

// Fraction-free (Bareiss) elimination; every division is exact.
template <class Int>
std::size_t bareiss_rank(std::vector<Int> m, std::size_t rows, std::size_t cols) {
  std::size_t rank = 0;
  Int prev = 1;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t p = rank;
    while (p < rows && is_zero(m[p * cols + col])) ++p;
    if (p == rows) continue;
    if (p != rank)
      for (std::size_t j = 0; j < cols; ++j) std::swap(m[p * cols + j], m[rank * cols + j]);
    const Int pivot = m[rank * cols + col];
    for (std::size_t i = rank + 1; i < rows; ++i) {
      const Int lead = m[i * cols + col];
      for (std::size_t j = col + 1; j < cols; ++j)
        m[i * cols + j] = (pivot * m[i * cols + j] - lead * m[rank * cols + j]) / prev;
      m[i * cols + col] = 0;
    }
    prev = pivot;
    ++rank;
  }
  return rank;
}

const std::vector<GradedGenerator>& degree(const GeneratorSets& g, std::size_t k, std::size_t c) {
  static const std::vector<GradedGenerator> none;
  return k <= g.k_max ? g.chains[k][c] : none;
}

std::size_t find_generator(const std::vector<GradedGenerator>& sorted, const std::vector<ObjectId>& pts) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), pts,
                             [](const GradedGenerator& g, const std::vector<ObjectId>& p) { return g.points < p; });
  if (it == sorted.end() || it->points != pts)
    throw Error(ErrorCode::IncompleteTable, "face outside the generator set");
  return static_cast<std::size_t>(it - sorted.begin());
}

}  // namespace

GeneratorSets generators(const TextCategory& cat, std::size_t k_max, const Tolerances& tol, const Limits& limits) {
  auto pairs = finite_pairs(cat);
  GeneratorSets out;
  out.k_max = k_max;
  out.classes = merge_grades(pairs, tol.grade_merge);
  const std::size_t nc = out.classes.size();

  std::size_t total = 0;
  out.next_degree_counts.assign(nc, 0);
  for (const auto& p : pairs) {
    for (std::size_t k = 0; k <= k_max; ++k) total += chains_in(p.steps, k);
    out.next_degree_counts[p.cls] += chains_in(p.steps, k_max + 1);
  }
  if (total > limits.max_generators)
    throw Error(ErrorCode::TooManyGenerators,
                std::to_string(total) + " generators exceed the cap of " + std::to_string(limits.max_generators));

  out.chains.assign(k_max + 1, std::vector<std::vector<GradedGenerator>>(nc));
  for (const auto& p : pairs) {
    if (p.steps == 0) {
      out.chains[0][p.cls].push_back({{p.x}});
      continue;
    }
    const auto sat = cat.chain(p.x, p.y);
    const std::size_t inner = p.steps - 1;
    if (inner >= 63) throw Error(ErrorCode::TooManyGenerators, "chain too long to enumerate");
    // Each subset of the interior points of the saturated chain is one generator.
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << inner); ++mask) {
      const std::size_t k = static_cast<std::size_t>(std::popcount(mask)) + 1;
      if (k > k_max) continue;
      GradedGenerator g;
      g.points.reserve(k + 1);
      g.points.push_back(p.x);
      for (std::size_t b = 0; b < inner; ++b)
        if (mask >> b & 1) g.points.push_back(sat[b + 1]);
      g.points.push_back(p.y);
      out.chains[k][p.cls].push_back(std::move(g));
    }
  }
  for (auto& by_class : out.chains)
    for (auto& gens : by_class)
      std::sort(gens.begin(), gens.end(),
                [](const GradedGenerator& a, const GradedGenerator& b) { return a.points < b.points; });
  return out;
}

std::int64_t SparseIntMatrix::at(std::size_t r, std::size_t c) const {
  auto it = columns[c].find(r);
  return it == columns[c].end() ? 0 : it->second;
}

bool SparseIntMatrix::is_zero() const {
  for (const auto& col : columns)
    for (const auto& [r, v] : col)
      if (v != 0) return false;
  return true;
}

SparseIntMatrix multiply(const SparseIntMatrix& a, const SparseIntMatrix& b) {
  if (a.cols != b.rows) throw Error(ErrorCode::IncompleteTable, "dimension mismatch");
  SparseIntMatrix c{a.rows, b.cols, std::vector<std::map<std::size_t, std::int64_t>>(b.cols)};
  for (std::size_t j = 0; j < b.cols; ++j)
    for (const auto& [k, bv] : b.columns[j])
      for (const auto& [i, av] : a.columns[k]) c.columns[j][i] += av * bv;
  for (auto& col : c.columns) std::erase_if(col, [](const auto& kv) { return kv.second == 0; });
  return c;
}

SparseIntMatrix boundary_matrix(const TextCategory& cat, const GeneratorSets& gens, std::size_t k, std::size_t c,
                                BoundaryCheck* check, const Tolerances& tol) {
  const auto& src = degree(gens, k, c);
  const auto& dst = degree(gens, k - 1, c);
  SparseIntMatrix m{dst.size(), src.size(), std::vector<std::map<std::size_t, std::int64_t>>(src.size())};
  for (std::size_t j = 0; j < src.size(); ++j) {
    const auto& pts = src[j].points;
    // Faces 0 and k vanish, so i runs over interior positions.
    for (std::size_t i = 1; i < k; ++i) {
      // Strictly increasing points lie on one saturated chain, so the triangle
      // equality d(y_{i-1},y_i) + d(y_i,y_{i+1}) = d(y_{i-1},y_{i+1}) holds.
      if (check) {
        ++check->interior_faces;
        const double lhs = cat.distance(pts[i - 1], pts[i]) + cat.distance(pts[i], pts[i + 1]);
        if (std::abs(lhs - cat.distance(pts[i - 1], pts[i + 1])) > tol.grade_merge) ++check->triangle_mismatches;
      }
      std::vector<ObjectId> face;
      face.reserve(pts.size() - 1);
      for (std::size_t q = 0; q < pts.size(); ++q)
        if (q != i) face.push_back(pts[q]);
      m.columns[j][find_generator(dst, face)] += (i % 2 == 0) ? 1 : -1;
    }
    std::erase_if(m.columns[j], [](const auto& kv) { return kv.second == 0; });
  }
  return m;
}

std::size_t exact_rank_dense(std::vector<std::int64_t> entries, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) return 0;
  try {
    return bareiss_rank(std::vector<CheckedInt>(entries.begin(), entries.end()), rows, cols);
  } catch (const Overflow&) {
    return bareiss_rank(std::vector<BigInt>(entries.begin(), entries.end()), rows, cols);
  }
}

std::size_t exact_rank(const SparseIntMatrix& m) {
  std::vector<std::int64_t> dense(m.rows * m.cols, 0);
  for (std::size_t c = 0; c < m.cols; ++c)
    for (const auto& [r, v] : m.columns[c]) dense[r * m.cols + c] = v;
  return exact_rank_dense(std::move(dense), m.rows, m.cols);
}

namespace {

// One endpoint block of ∂_k in grade class c.
struct BlockTask {
  std::size_t k;
  std::size_t c;
  std::vector<std::size_t> cols;  // indices into MC_k
  std::vector<std::size_t> rows;  // indices into MC_{k-1}
};

std::vector<BlockTask> endpoint_blocks(const GeneratorSets& gens, std::size_t k, std::size_t c) {
  std::map<std::pair<ObjectId, ObjectId>, BlockTask> blocks;
  const auto& src = degree(gens, k, c);
  const auto& dst = degree(gens, k - 1, c);
  for (std::size_t j = 0; j < src.size(); ++j) {
    auto& b = blocks[{src[j].points.front(), src[j].points.back()}];
    b.k = k;
    b.c = c;
    b.cols.push_back(j);
  }
  for (std::size_t i = 0; i < dst.size(); ++i) {
    auto it = blocks.find({dst[i].points.front(), dst[i].points.back()});
    if (it != blocks.end()) it->second.rows.push_back(i);
  }
  std::vector<BlockTask> out;
  for (auto& [key, b] : blocks) out.push_back(std::move(b));
  return out;
}

std::size_t block_rank(const GeneratorSets& gens, const BlockTask& b) {
  if (b.k < 2 || b.rows.empty()) return 0;  // ∂_1 = 0
  const auto& src = degree(gens, b.k, b.c);
  const auto& dst = degree(gens, b.k - 1, b.c);
  std::vector<GradedGenerator> local_dst;
  local_dst.reserve(b.rows.size());
  for (auto i : b.rows) local_dst.push_back(dst[i]);
  std::vector<std::int64_t> dense(b.rows.size() * b.cols.size(), 0);
  for (std::size_t jj = 0; jj < b.cols.size(); ++jj) {
    const auto& pts = src[b.cols[jj]].points;
    for (std::size_t i = 1; i < b.k; ++i) {
      std::vector<ObjectId> face;
      for (std::size_t q = 0; q < pts.size(); ++q)
        if (q != i) face.push_back(pts[q]);
      dense[find_generator(local_dst, face) * b.cols.size() + jj] += (i % 2 == 0) ? 1 : -1;
    }
  }
  return exact_rank_dense(std::move(dense), b.rows.size(), b.cols.size());
}

}  // namespace

std::size_t HomologyTable::rank_h(std::size_t k, std::size_t c) const {
  for (const auto& r : rows)
    if (r.k == k && r.grade == c) return r.rank_h;
  return 0;
}

std::size_t HomologyTable::rank_mc(std::size_t k, std::size_t c) const {
  for (const auto& r : rows)
    if (r.k == k && r.grade == c) return r.rank_mc;
  return 0;
}

HomologyTable homology_ranks(const TextCategory& cat, std::size_t k_max, RankStrategy strategy,
                             const Tolerances& tol, const Limits& limits) {
  const GeneratorSets gens = generators(cat, k_max, tol, limits);
  const std::size_t nc = gens.classes.size();

  HomologyTable table;
  table.k_max = k_max;
  table.classes = gens.classes;
  table.complete = std::all_of(gens.next_degree_counts.begin(), gens.next_degree_counts.end(),
                               [](std::size_t n) { return n == 0; });

  // boundary_rank[k][c] = rank ∂_k on class c, for 1 <= k <= k_max.
  std::vector<std::vector<std::size_t>> boundary_rank(k_max + 2, std::vector<std::size_t>(nc, 0));

  if (strategy == RankStrategy::whole_serial) {
    for (std::size_t k = 2; k <= k_max; ++k)
      for (std::size_t c = 0; c < nc; ++c)
        if (gens.count(k, c) > 0) boundary_rank[k][c] = exact_rank(boundary_matrix(cat, gens, k, c, nullptr, tol));
  } else {
    std::vector<BlockTask> tasks;
    for (std::size_t k = 2; k <= k_max; ++k)
      for (std::size_t c = 0; c < nc; ++c)
        for (auto& b : endpoint_blocks(gens, k, c)) tasks.push_back(std::move(b));
    std::vector<std::size_t> ranks(tasks.size(), 0);
    const long n = static_cast<long>(tasks.size());
    if (strategy == RankStrategy::blocks_omp) {
#pragma omp parallel for schedule(dynamic)
      for (long i = 0; i < n; ++i) ranks[i] = block_rank(gens, tasks[i]);
    } else {
      for (long i = 0; i < n; ++i) ranks[i] = block_rank(gens, tasks[i]);
    }
    for (std::size_t i = 0; i < tasks.size(); ++i) boundary_rank[tasks[i].k][tasks[i].c] += ranks[i];
  }

  // Numerical re-check of the face condition across all boundary maps.
  for (std::size_t k = 2; k <= k_max; ++k)
    for (std::size_t c = 0; c < nc; ++c)
      for (const auto& g : degree(gens, k, c))
        for (std::size_t i = 1; i < k; ++i) {
          ++table.boundary.interior_faces;
          const auto& p = g.points;
          const double lhs = cat.distance(p[i - 1], p[i]) + cat.distance(p[i], p[i + 1]);
          if (std::abs(lhs - cat.distance(p[i - 1], p[i + 1])) > tol.grade_merge) ++table.boundary.triangle_mismatches;
        }

  for (std::size_t k = 0; k <= k_max; ++k)
    for (std::size_t c = 0; c < nc; ++c) {
      const std::size_t mc = gens.count(k, c);
      if (mc == 0) continue;
      HomologyRow row;
      row.k = k;
      row.grade = c;
      row.ell = gens.classes[c].ell;
      row.rank_mc = mc;
      const std::size_t kernel = mc - (k >= 1 ? boundary_rank[k][c] : 0);
      const std::size_t image = k + 1 <= k_max ? boundary_rank[k + 1][c] : 0;
      row.rank_h = kernel - image;
      row.truncation_suspect = k == k_max && gens.next_degree_counts[c] > 0;
      table.rows.push_back(row);
    }
  std::stable_sort(table.rows.begin(), table.rows.end(), [](const HomologyRow& a, const HomologyRow& b) {
    return a.k != b.k ? a.k < b.k : a.grade < b.grade;
  });
  return table;
}

double euler_magnitude(double t, const HomologyTable& table) {
  if (!table.complete)
    throw Error(ErrorCode::IncompleteTable, "magnitude complex extends beyond k_max = " + std::to_string(table.k_max));
  double total = 0.0;
  for (const auto& r : table.rows) {
    const double sign = r.k % 2 == 0 ? 1.0 : -1.0;
    total += sign * static_cast<double>(r.rank_h) * std::exp(-t * r.ell);
  }
  return total;
}

double chain_euler_magnitude(double t, const HomologyTable& table) {
  if (!table.complete)
    throw Error(ErrorCode::IncompleteTable, "magnitude complex extends beyond k_max = " + std::to_string(table.k_max));
  double total = 0.0;
  for (const auto& r : table.rows) {
    const double sign = r.k % 2 == 0 ? 1.0 : -1.0;
    total += sign * static_cast<double>(r.rank_mc) * std::exp(-t * r.ell);
  }
  return total;
}

void write_homology_csv(const HomologyTable& table, std::ostream& out) {
  out << "k,ell,rank_MC,rank_H\n";
  for (const auto& r : table.rows)
    out << r.k << ',' << format_real(r.ell) << ',' << r.rank_mc << ',' << r.rank_h << '\n';
}

}  // namespace textmag
