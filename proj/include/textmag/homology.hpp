#pragma once

// Magnitude complex and magnitude homology ranks of the space of texts.
//
// Generators of MC_{k,l} are strictly increasing chains y_0 < ... < y_k with
// finite length l = d(y_0, y_k). Grades are real numbers; they are grouped
// into classes by sorting and merging neighbours closer than
// Tolerances::grade_merge. Ranks are exact (fraction-free elimination over
// the integers, falling back to arbitrary precision on overflow).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "textmag/category.hpp"
#include "textmag/tolerances.hpp"

namespace textmag {

struct GradeClass {
  double ell = 0.0;      // mean of the merged grades
  double width = 0.0;    // max - min of the merged grades
  std::size_t pairs = 0; // comparable pairs (x <= y) merged into the class
};

struct GradedGenerator {
  std::vector<ObjectId> points;  // y_0 < ... < y_k
  std::size_t degree() const { return points.size() - 1; }
};

struct GeneratorSets {
  std::size_t k_max = 0;
  std::vector<GradeClass> classes;
  /// chains[k][c]: generators of degree k in grade class c, sorted.
  std::vector<std::vector<std::vector<GradedGenerator>>> chains;
  /// |MC_{k_max+1, l}| per grade class, counted without enumeration.
  std::vector<std::size_t> next_degree_counts;

  std::size_t count(std::size_t k, std::size_t c) const { return k <= k_max ? chains[k][c].size() : 0; }
};

/// Enumerates generators up to degree k_max as subsets of saturated chains.
/// Throws TooManyGenerators when more than limits.max_generators would be built.
GeneratorSets generators(const TextCategory& cat, std::size_t k_max, const Tolerances& tol = kDefaultTolerances,
                         const Limits& limits = kDefaultLimits);

/// Column-sparse integer matrix.
struct SparseIntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::map<std::size_t, std::int64_t>> columns;

  std::int64_t at(std::size_t r, std::size_t c) const;
  bool is_zero() const;
};

SparseIntMatrix multiply(const SparseIntMatrix& a, const SparseIntMatrix& b);

struct BoundaryCheck {
  std::size_t interior_faces = 0;
  std::size_t triangle_mismatches = 0;  // faces whose triangle equality fails numerically at grade_merge
};

/// ∂_k : MC_{k,l} -> MC_{k-1,l} for grade class c. Only interior faces
/// (0 < i < k) contribute, with sign (-1)^i.
SparseIntMatrix boundary_matrix(const TextCategory& cat, const GeneratorSets& gens, std::size_t k, std::size_t c,
                                BoundaryCheck* check = nullptr, const Tolerances& tol = kDefaultTolerances);

/// Exact rank by fraction-free elimination of the whole matrix.
std::size_t exact_rank(const SparseIntMatrix& m);
/// Exact rank of a dense row-major integer matrix.
std::size_t exact_rank_dense(std::vector<std::int64_t> entries, std::size_t rows, std::size_t cols);

struct HomologyRow {
  std::size_t k = 0;
  std::size_t grade = 0;  // index into HomologyTable::classes
  double ell = 0.0;
  std::size_t rank_mc = 0;
  std::size_t rank_h = 0;
  bool truncation_suspect = false;  // k = k_max and MC_{k_max+1} nonempty
};

struct HomologyTable {
  std::size_t k_max = 0;
  std::vector<GradeClass> classes;
  std::vector<HomologyRow> rows;  // nonempty MC_{k,l} only, sorted by (k, l)
  bool complete = false;          // every MC above k_max is empty
  BoundaryCheck boundary;

  std::size_t rank_h(std::size_t k, std::size_t c) const;
  std::size_t rank_mc(std::size_t k, std::size_t c) const;
};

enum class RankStrategy {
  blocks_omp,   // endpoint blocks, ranked in parallel
  blocks_serial,
  whole_serial, // one elimination per (k, l); reference path
};

/// rank H_{k,l} = dim ker ∂_k - rank ∂_{k+1}, for k <= k_max.
HomologyTable homology_ranks(const TextCategory& cat, std::size_t k_max = 4,
                             RankStrategy strategy = RankStrategy::blocks_omp,
                             const Tolerances& tol = kDefaultTolerances, const Limits& limits = kDefaultLimits);

/// sum_l e^{-t l} sum_k (-1)^k rank H_{k,l}. Throws IncompleteTable unless complete.
double euler_magnitude(double t, const HomologyTable& table);
/// Same with rank MC in place of rank H.
double chain_euler_magnitude(double t, const HomologyTable& table);

/// `k,ell,rank_MC,rank_H`, ell with 12 significant digits.
void write_homology_csv(const HomologyTable& table, std::ostream& out);

}  // namespace textmag
