#include "textmag/digraph.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "textmag/error.hpp"
#include "textmag/format.hpp"

namespace textmag {

WeightedDigraph::WeightedDigraph(std::size_t vertices, std::vector<WeightedEdge> edges) : out_(vertices) {
  for (const auto& e : edges) {
    if (e.source >= vertices || e.target >= vertices) throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
    if (e.weight == 0.0) throw Error(ErrorCode::InvalidArgument, "zero-weight edges are absent edges");
    out_[e.source].push_back(e);
  }
  for (auto& list : out_) {
    std::sort(list.begin(), list.end(), [](const WeightedEdge& a, const WeightedEdge& b) { return a.target < b.target; });
    for (std::size_t i = 1; i < list.size(); ++i)
      if (list[i].target == list[i - 1].target) throw Error(ErrorCode::InvalidArgument, "duplicate edge");
  }
}

std::size_t WeightedDigraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& l : out_) n += l.size();
  return n;
}

double WeightedDigraph::weight(Vertex v, Vertex w) const {
  for (const auto& e : out_[v])
    if (e.target == w) return e.weight;
  return 0.0;
}

WeightedDigraph digraph_of_matrix(const DenseMatrix& xi) {
  std::vector<WeightedEdge> edges;
  for (std::size_t r = 0; r < xi.size(); ++r)
    for (std::size_t c = 0; c < xi.size(); ++c)
      if (xi(r, c) != 0.0) edges.push_back({r, c, xi(r, c)});
  return WeightedDigraph(xi.size(), std::move(edges));
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
  std::size_t components() {
    std::size_t c = 0;
    for (std::size_t v = 0; v < parent.size(); ++v)
      if (find(v) == v) ++c;
    return c;
  }
};

// Components of the functional graph of `successor` (kNoVertex = no out-edge).
std::size_t components(const std::vector<Vertex>& successor) {
  UnionFind uf(successor.size());
  for (Vertex v = 0; v < successor.size(); ++v)
    if (successor[v] != kNoVertex) uf.unite(v, successor[v]);
  return uf.components();
}

// Backtracking over injective maps domain -> codomain supported on edges.
// Linear subdigraphs: domain = codomain = V. Connections v -> w: domain
// V \ {w}, codomain V \ {v}; following successors from v must reach w.
class Assignments {
 public:
  Assignments(const WeightedDigraph& d, Vertex skip_out, Vertex skip_in)
      : d_(d), skip_out_(skip_out), skip_in_(skip_in), successor_(d.size(), kNoVertex), used_(d.size(), false) {
    for (Vertex v = 0; v < d.size(); ++v)
      if (v != skip_out) order_.push_back(v);
    if (skip_in != kNoVertex) used_[skip_in] = true;
  }

  std::size_t first_choices() const { return order_.empty() ? 1 : d_.out(order_.front()).size(); }

  /// Visits every complete assignment whose first vertex takes its `choice`-th edge.
  template <class F>
  void run(std::size_t choice, F&& visit) {
    if (order_.empty()) {
      visit(successor_, 1.0);
      return;
    }
    const auto& edges = d_.out(order_.front());
    if (choice >= edges.size()) return;
    const auto& e = edges[choice];
    if (used_[e.target]) return;
    place(order_.front(), e.target);
    descend(1, e.weight, visit);
    unplace(order_.front(), e.target);
  }

  template <class F>
  void run_all(F&& visit) {
    for (std::size_t c = 0; c < first_choices(); ++c) run(c, visit);
  }

 private:
  void place(Vertex v, Vertex w) {
    successor_[v] = w;
    used_[w] = true;
  }
  void unplace(Vertex v, Vertex w) {
    successor_[v] = kNoVertex;
    used_[w] = false;
  }

  template <class F>
  void descend(std::size_t depth, double weight, F& visit) {
    if (depth == order_.size()) {
      visit(successor_, weight);
      return;
    }
    const Vertex v = order_[depth];
    for (const auto& e : d_.out(v)) {
      if (used_[e.target]) continue;
      place(v, e.target);
      descend(depth + 1, weight * e.weight, visit);
      unplace(v, e.target);
    }
  }

  const WeightedDigraph& d_;
  Vertex skip_out_;
  Vertex skip_in_;
  std::vector<Vertex> order_;
  std::vector<Vertex> successor_;
  std::vector<bool> used_;
};

void guard(const WeightedDigraph& d, const Limits& limits) {
  if (d.size() > limits.max_digraph_vertices)
    throw Error(ErrorCode::TooManyVertices, std::to_string(d.size()) + " vertices exceed the cap of " +
                                                std::to_string(limits.max_digraph_vertices));
}

inline int parity_sign(std::size_t e) { return e % 2 == 0 ? 1 : -1; }

// Path v -> w in a connection assignment; empty if following successors does not reach w.
std::vector<Vertex> trace_path(const std::vector<Vertex>& successor, Vertex v, Vertex w) {
  std::vector<Vertex> path{v};
  if (v == w) return path;
  Vertex cur = v;
  for (std::size_t steps = 0; steps < successor.size(); ++steps) {
    cur = successor[cur];
    if (cur == kNoVertex) return {};
    path.push_back(cur);
    if (cur == w) return path;
  }
  return {};
}

}  // namespace

std::vector<LinearSubdigraph> enumerate_linear_subdigraphs(const WeightedDigraph& d, const Limits& limits) {
  guard(d, limits);
  std::vector<LinearSubdigraph> out;
  const std::size_t n = d.size();
  Assignments a(d, kNoVertex, kNoVertex);
  a.run_all([&](const std::vector<Vertex>& succ, double weight) {
    LinearSubdigraph l;
    l.successor = succ;
    l.cycles = components(succ);
    l.sign = parity_sign(n + l.cycles);
    l.weight = weight;
    out.push_back(std::move(l));
  });
  return out;
}

double det_via_linear_subdigraphs_serial(const WeightedDigraph& d, const Limits& limits) {
  guard(d, limits);
  const std::size_t n = d.size();
  double det = 0.0;
  Assignments a(d, kNoVertex, kNoVertex);
  a.run_all([&](const std::vector<Vertex>& succ, double weight) {
    det += parity_sign(n + components(succ)) * weight;
  });
  return det;
}

double det_via_linear_subdigraphs(const WeightedDigraph& d, const Limits& limits) {
  guard(d, limits);
  const std::size_t n = d.size();
  const std::size_t chunks = Assignments(d, kNoVertex, kNoVertex).first_choices();
  std::vector<double> partial(chunks, 0.0);
  const long count = static_cast<long>(chunks);
#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < count; ++c) {
    Assignments a(d, kNoVertex, kNoVertex);
    double s = 0.0;
    a.run(static_cast<std::size_t>(c), [&](const std::vector<Vertex>& succ, double weight) {
      s += parity_sign(n + components(succ)) * weight;
    });
    partial[c] = s;
  }
  double det = 0.0;
  for (double s : partial) det += s;
  return det;
}

std::vector<Connection> enumerate_connections(const WeightedDigraph& d, Vertex v, Vertex w, const Limits& limits) {
  guard(d, limits);
  if (v >= d.size() || w >= d.size()) throw Error(ErrorCode::InvalidArgument, "vertex out of range");
  const std::size_t n = d.size();
  std::vector<Connection> out;
  // v has no incoming edge, w no outgoing edge. When v = w the vertex is isolated.
  Assignments a(d, w, v);
  a.run_all([&](const std::vector<Vertex>& succ, double weight) {
    auto path = trace_path(succ, v, w);
    if (path.empty()) return;
    Connection c;
    c.source = v;
    c.target = w;
    c.successor = succ;
    c.path = std::move(path);
    c.cycles = components(succ) - 1;  // the path's component is not a cycle
    c.sign = parity_sign(n + c.cycles + 1);
    c.weight = weight;
    out.push_back(std::move(c));
  });
  return out;
}

double inverse_entry_via_connections(const WeightedDigraph& d, Vertex v, Vertex w, const Limits& limits) {
  const double det = det_via_linear_subdigraphs(d, limits);
  if (det == 0.0) throw Error(ErrorCode::SingularMatrix, "determinant is zero");
  double s = 0.0;
  for (const auto& c : enumerate_connections(d, v, w, limits)) s += c.sign * c.weight;
  return s / det;
}

Vertex LabeledDigraph::vertex(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw Error(ErrorCode::InvalidArgument, "unknown vertex '" + label + "'");
  return static_cast<Vertex>(it - labels.begin());
}

namespace {

bool is_integer(const std::string& s) {
  long long v;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

LabeledDigraph read_digraph(std::istream& in) {
  struct RawEdge {
    std::string src, dst;
    double w;
  };
  std::vector<RawEdge> raw;
  std::set<std::string> names;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    RawEdge e;
    if (!(ls >> e.src)) continue;
    std::string extra;
    if (!(ls >> e.dst >> e.w) || (ls >> extra))
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected `src dst weight`");
    names.insert(e.src);
    names.insert(e.dst);
    raw.push_back(std::move(e));
  }
  std::vector<std::string> labels(names.begin(), names.end());
  if (std::all_of(labels.begin(), labels.end(), is_integer))
    std::sort(labels.begin(), labels.end(),
              [](const std::string& a, const std::string& b) { return std::stoll(a) < std::stoll(b); });
  auto index = [&](const std::string& s) {
    return static_cast<Vertex>(std::find(labels.begin(), labels.end(), s) - labels.begin());
  };
  std::vector<WeightedEdge> edges;
  for (const auto& e : raw)
    if (e.w != 0.0) edges.push_back({index(e.src), index(e.dst), e.w});
  const std::size_t n = labels.size();
  return {std::move(labels), WeightedDigraph(n, std::move(edges))};
}

void write_digraph(const LabeledDigraph& d, std::ostream& out) {
  for (Vertex v = 0; v < d.graph.size(); ++v)
    for (const auto& e : d.graph.out(v))
      out << d.labels[e.source] << ' ' << d.labels[e.target] << ' ' << format_real(e.weight) << '\n';
}

}  // namespace textmag
