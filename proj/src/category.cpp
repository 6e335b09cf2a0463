#include "textmag/category.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "textmag/error.hpp"
#include "textmag/format.hpp"

namespace textmag {

namespace {

std::size_t saturating_add(std::size_t a, std::size_t b) {
  return a > std::numeric_limits<std::size_t>::max() - b ? std::numeric_limits<std::size_t>::max() : a + b;
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a == 0 || b == 0) return 0;
  return a > std::numeric_limits<std::size_t>::max() / b ? std::numeric_limits<std::size_t>::max() : a * b;
}

}  // namespace

std::size_t expected_object_count(std::size_t alphabet_size, Cutoff cutoff, std::size_t prompt_length,
                                  bool finished) {
  if (finished || prompt_length >= cutoff.value) return 1;
  // Level j >= 1 below the prompt holds #A^j unfinished and #A^(j-1) finished texts.
  std::size_t total = 1;
  std::size_t power = 1;  // #A^(j-1)
  for (std::size_t j = 1; j <= cutoff.value - prompt_length; ++j) {
    const std::size_t next = saturating_mul(power, alphabet_size);
    total = saturating_add(total, saturating_add(next, power));
    power = next;
  }
  return total;
}

TextCategory TextCategory::build(const ModelSpec& model, const Text& root, const Limits& limits) {
  const auto& alphabet = model.alphabet();
  const Cutoff cutoff = model.cutoff();
  if (!is_object(root, alphabet, cutoff))
    throw Error(ErrorCode::NotInCategory, "prompt is not an object for this alphabet and cutoff");

  const std::size_t expected = expected_object_count(alphabet.size(), cutoff, root.length(), root.finished());
  if (expected > limits.max_objects)
    throw Error(ErrorCode::TooLarge, std::to_string(expected) + " objects exceed the cap of " +
                                         std::to_string(limits.max_objects));

  TextCategory cat(alphabet, cutoff, root);
  const std::size_t width = alphabet.continuations();
  cat.nodes_.reserve(expected);
  cat.dist_offset_.assign(expected, 0);

  CategoryNode first;
  first.last = root.back();
  first.length = static_cast<std::uint32_t>(root.length());
  first.finished = root.finished();
  cat.nodes_.push_back(first);

  // Breadth-first: children of node i are appended in slot order, so the
  // vector ends up in canonical (length, lexicographic) order.
  for (ObjectId i = 0; i < cat.nodes_.size(); ++i) {
    CategoryNode& n = cat.nodes_[i];
    n.terminating = n.finished || n.length == cutoff.value;
    if (n.terminating) continue;
    const auto dist = next_token_distribution(model, cat.text(i));
    cat.dist_offset_[i] = cat.dists_.size();
    cat.dists_.insert(cat.dists_.end(), dist.probs().begin(), dist.probs().end());
    cat.nodes_[i].first_child = cat.nodes_.size();
    const double base = cat.nodes_[i].pi_from_root;
    const std::uint32_t len = cat.nodes_[i].length + 1;
    for (std::size_t s = 0; s < width; ++s) {
      CategoryNode c;
      c.parent = i;
      c.last = alphabet.token_at_slot(s);
      c.length = len;
      c.finished = c.last.is_eos();
      c.edge_probability = dist[s];
      c.pi_from_root = base * dist[s];
      cat.nodes_.push_back(c);
    }
  }
  return cat;
}

Text TextCategory::text(ObjectId id) const {
  std::vector<Token> suffix;
  while (id != 0) {
    suffix.push_back(nodes_[id].last);
    id = nodes_[id].parent;
  }
  Text out = root_;
  for (auto it = suffix.rbegin(); it != suffix.rend(); ++it) out = out.extended(*it);
  return out;
}

std::optional<ObjectId> TextCategory::find(const Text& text) const {
  if (!root_.is_prefix_of(text) || text.length() > cutoff_.value) return std::nullopt;
  ObjectId cur = 0;
  const auto toks = text.tokens();
  for (std::size_t i = root_.length(); i < toks.size(); ++i) {
    if (nodes_[cur].first_child == kNoObject) return std::nullopt;
    const Token t = toks[i];
    if (t.is_symbol() && t.index() >= alphabet_.size()) return std::nullopt;
    cur = child(cur, alphabet_.slot(t));
  }
  return cur;
}

ObjectId TextCategory::id(const Text& text) const {
  if (auto found = find(text)) return *found;
  throw Error(ErrorCode::NotInCategory, "'" + spell(alphabet_, text) + "' is not an object");
}

std::span<const double> TextCategory::distribution(ObjectId id) const {
  if (!is_interior(id)) throw Error(ErrorCode::FinishedText, "object carries no next-token distribution");
  return {dists_.data() + dist_offset_[id], branching()};
}

bool TextCategory::precedes(ObjectId x, ObjectId y) const {
  while (nodes_[y].length > nodes_[x].length) y = nodes_[y].parent;
  return x == y;
}

double TextCategory::pi(ObjectId x, ObjectId y) const {
  if (x == y) return 1.0;
  if (nodes_[y].length <= nodes_[x].length) return 0.0;
  // Walk y up to x's depth. Multiply from the x end so that the product is
  // formed in generation order.
  std::vector<double> steps;
  steps.reserve(nodes_[y].length - nodes_[x].length);
  while (nodes_[y].length > nodes_[x].length) {
    steps.push_back(nodes_[y].edge_probability);
    y = nodes_[y].parent;
  }
  if (y != x) return 0.0;
  double p = 1.0;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) p *= *it;
  return p;
}

double TextCategory::distance(ObjectId x, ObjectId y) const {
  const double p = pi(x, y);
  if (p == 0.0) return kInfinity;
  if (p == 1.0) return 0.0;
  return -std::log(p);
}

std::vector<ObjectId> TextCategory::descendants(ObjectId x) const {
  std::vector<ObjectId> out{x};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& n = nodes_[out[i]];
    if (n.first_child == kNoObject) continue;
    for (std::size_t s = 0; s < branching(); ++s) out.push_back(n.first_child + s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ObjectId> TextCategory::chain(ObjectId x, ObjectId y) const {
  std::vector<ObjectId> out;
  if (nodes_[y].length < nodes_[x].length) return out;
  ObjectId cur = y;
  while (nodes_[cur].length > nodes_[x].length) {
    out.push_back(cur);
    cur = nodes_[cur].parent;
  }
  if (cur != x) return {};
  out.push_back(x);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<ObjectId> TextCategory::terminating_states(ObjectId x) const {
  std::vector<ObjectId> out;
  for (ObjectId y : descendants(x))
    if (nodes_[y].terminating) out.push_back(y);
  return out;
}

std::vector<ObjectId> TextCategory::terminating_states(const Text& x) const { return terminating_states(id(x)); }

std::vector<ObjectId> TextCategory::interior_objects() const {
  std::vector<ObjectId> out;
  for (ObjectId i = 0; i < nodes_.size(); ++i)
    if (is_interior(i)) out.push_back(i);
  return out;
}

std::size_t TextCategory::terminating_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const CategoryNode& n) { return n.terminating; }));
}

TextCategory TextCategory::with_edge_probability(ObjectId target, double p) const {
  TextCategory copy = *this;
  if (target == 0 || target >= copy.nodes_.size()) throw Error(ErrorCode::NotInCategory, "no such edge");
  auto& n = copy.nodes_[target];
  n.edge_probability = p;
  copy.dists_[copy.dist_offset_[n.parent] + alphabet_.slot(n.last)] = p;
  for (ObjectId d : copy.descendants(target))
    copy.nodes_[d].pi_from_root = copy.nodes_[copy.nodes_[d].parent].pi_from_root * copy.nodes_[d].edge_probability;
  return copy;
}

EnrichmentReport check_enrichment(const TextCategory& cat, const Tolerances& tol, const Limits& limits) {
  EnrichmentReport rep;
  const std::size_t n = cat.size();

  auto visit = [&](double pxy, double pyz, double pxz, bool chain) {
    ++rep.triples;
    const double lhs = pxy * pyz;
    rep.max_composition_excess = std::max(rep.max_composition_excess, lhs - pxz);
    if (chain) rep.max_chain_defect = std::max(rep.max_chain_defect, std::abs(lhs - pxz));
    const double dxy = pxy == 0.0 ? kInfinity : -std::log(pxy);
    const double dyz = pyz == 0.0 ? kInfinity : -std::log(pyz);
    const double dxz = pxz == 0.0 ? kInfinity : -std::log(pxz);
    const double sum = dxy + dyz;
    if (sum < dxz) {
      if (std::isinf(dxz) || dxz - sum > tol.algebra * std::max(1.0, dxz)) ++rep.triangle_violations;
      if (!std::isinf(dxz)) rep.max_triangle_excess = std::max(rep.max_triangle_excess, dxz - sum);
    }
  };

  if (n <= limits.exhaustive_triples) {
    rep.exhaustive = true;
    std::vector<double> p(n * n);
    for (ObjectId x = 0; x < n; ++x)
      for (ObjectId y = 0; y < n; ++y) p[x * n + y] = cat.pi(x, y);
    for (ObjectId x = 0; x < n; ++x)
      for (ObjectId y = 0; y < n; ++y)
        for (ObjectId z = 0; z < n; ++z)
          visit(p[x * n + y], p[y * n + z], p[x * n + z], cat.precedes(x, y) && cat.precedes(y, z));
  } else {
    // Off-chain triples have π(y|x)π(z|y) = 0 by construction, so only chains carry information.
    for (ObjectId z = 0; z < n; ++z) {
      const auto c = cat.chain(0, z);
      for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i; j < c.size(); ++j)
          visit(cat.pi(c[i], c[j]), cat.pi(c[j], z), cat.pi(c[i], z), true);
    }
  }

  for (ObjectId x = 0; x < n; ++x) {
    if (cat.node(x).finished) continue;
    double sum = 0.0;
    for (ObjectId y : cat.terminating_states(x)) sum += cat.pi(x, y);
    rep.max_pmf_defect = std::max(rep.max_pmf_defect, std::abs(sum - 1.0));
  }

  if (rep.max_composition_excess > tol.algebra)
    rep.failures.push_back("composition inequality violated by " + format_real(rep.max_composition_excess));
  if (rep.max_chain_defect > tol.algebra)
    rep.failures.push_back("compositionality equality off by " + format_real(rep.max_chain_defect));
  if (rep.max_pmf_defect > tol.pmf)
    rep.failures.push_back("terminating-state masses off by " + format_real(rep.max_pmf_defect));
  if (rep.triangle_violations > 0)
    rep.failures.push_back(std::to_string(rep.triangle_violations) + " triangle-inequality violations");
  return rep;
}

void write_category_csv(const TextCategory& cat, std::ostream& out) {
  out << "text,length,finished,pi_from_root\n";
  for (ObjectId i = 0; i < cat.size(); ++i) {
    const auto& n = cat.node(i);
    out << spell(cat.alphabet(), cat.text(i)) << ',' << n.length << ',' << (n.finished ? "true" : "false") << ','
        << format_real(n.pi_from_root) << '\n';
  }
}

}  // namespace textmag
