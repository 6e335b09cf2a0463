#pragma once

// Determinants and inverse entries of a matrix from the combinatorics of its
// weighted digraph: linear subdigraphs (spanning unions of disjoint cycles)
// and connections (a path v -> w plus disjoint cycles through every other
// vertex). Exponential by nature; intended as an oracle for small matrices.
// Nothing here knows about texts.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "textmag/matrix.hpp"
#include "textmag/tolerances.hpp"

namespace textmag {

using Vertex = std::size_t;
inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

struct WeightedEdge {
  Vertex source;
  Vertex target;
  double weight;
};

class WeightedDigraph {
 public:
  /// Rejects duplicate edges, zero weights and out-of-range endpoints.
  WeightedDigraph(std::size_t vertices, std::vector<WeightedEdge> edges);

  std::size_t size() const { return out_.size(); }
  std::size_t edge_count() const;
  /// Out-edges of v sorted by target.
  const std::vector<WeightedEdge>& out(Vertex v) const { return out_[v]; }
  /// Weight of (v, w), or 0 when absent.
  double weight(Vertex v, Vertex w) const;

 private:
  std::vector<std::vector<WeightedEdge>> out_;
};

/// One edge (x, y) of weight ξ(x, y) per nonzero entry.
WeightedDigraph digraph_of_matrix(const DenseMatrix& xi);

struct LinearSubdigraph {
  std::vector<Vertex> successor;  // the permutation
  std::size_t cycles = 0;
  int sign = 1;                   // (-1)^{#V + cycles}
  double weight = 1.0;
};

struct Connection {
  Vertex source = 0;
  Vertex target = 0;
  std::vector<Vertex> successor;  // kNoVertex at the target (and at the source when v = w)
  std::vector<Vertex> path;       // source ... target
  std::size_t cycles = 0;
  int sign = 1;                   // (-1)^{#V + cycles + 1}
  double weight = 1.0;
};

/// All linear subdigraphs in lexicographic order of their permutations. Throws TooManyVertices.
std::vector<LinearSubdigraph> enumerate_linear_subdigraphs(const WeightedDigraph& d,
                                                           const Limits& limits = kDefaultLimits);
/// sum over linear subdigraphs of sgn * weight.
double det_via_linear_subdigraphs(const WeightedDigraph& d, const Limits& limits = kDefaultLimits);
/// Same sum without the parallel split; reference for the OpenMP version above.
double det_via_linear_subdigraphs_serial(const WeightedDigraph& d, const Limits& limits = kDefaultLimits);

std::vector<Connection> enumerate_connections(const WeightedDigraph& d, Vertex v, Vertex w,
                                              const Limits& limits = kDefaultLimits);
/// (1/det) sum over connections v -> w of sgn * weight. Throws SingularMatrix when det = 0.
double inverse_entry_via_connections(const WeightedDigraph& d, Vertex v, Vertex w,
                                     const Limits& limits = kDefaultLimits);

/// Edge list with vertex names, one `src dst weight` per line; '#' starts a comment.
struct LabeledDigraph {
  std::vector<std::string> labels;  // vertex i is labels[i]
  WeightedDigraph graph;

  Vertex vertex(const std::string& label) const;
};

/// Vertices are the names that appear, sorted numerically when all are integers,
/// lexicographically otherwise. Zero-weight lines are dropped.
LabeledDigraph read_digraph(std::istream& in);
void write_digraph(const LabeledDigraph& d, std::ostream& out);

}  // namespace textmag
