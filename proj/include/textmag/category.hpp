#pragma once

// The finite category of texts rooted at a prompt, enriched by a model.
//
// Objects are stored in canonical order (length, then token code), which is
// breadth-first order of the prefix tree. All queries are const and the
// structure is never mutated after build(), so concurrent reads are safe.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "textmag/model.hpp"
#include "textmag/text.hpp"
#include "textmag/tolerances.hpp"

namespace textmag {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

using ObjectId = std::size_t;
inline constexpr ObjectId kNoObject = std::numeric_limits<ObjectId>::max();

struct CategoryNode {
  ObjectId parent = kNoObject;
  ObjectId first_child = kNoObject;  // children occupy [first_child, first_child + #A + 1)
  Token last;
  std::uint32_t length = 1;
  bool finished = false;
  bool terminating = false;
  double edge_probability = 1.0;  // p_parent(last)
  double pi_from_root = 1.0;
};

class TextCategory {
 public:
  /// Enumerates every y >= root with |y| <= N. A finished root gives a
  /// single-object category. Throws TooLarge above limits.max_objects.
  static TextCategory build(const ModelSpec& model, const Text& root, const Limits& limits = kDefaultLimits);
  static TextCategory build(const ModelSpec& model) { return build(model, Text::root()); }

  std::size_t size() const { return nodes_.size(); }
  const Alphabet& alphabet() const { return alphabet_; }
  Cutoff cutoff() const { return cutoff_; }
  const Text& root() const { return root_; }

  const CategoryNode& node(ObjectId id) const { return nodes_[id]; }
  Text text(ObjectId id) const;
  std::optional<ObjectId> find(const Text& text) const;
  /// Like find() but throws NotInCategory.
  ObjectId id(const Text& text) const;

  /// Unfinished and shorter than the cutoff: the objects that carry p_x.
  bool is_interior(ObjectId id) const { return nodes_[id].first_child != kNoObject; }
  std::span<const double> distribution(ObjectId id) const;
  std::size_t branching() const { return alphabet_.continuations(); }
  ObjectId child(ObjectId id, std::size_t slot) const { return nodes_[id].first_child + slot; }

  /// Prefix order on objects.
  bool precedes(ObjectId x, ObjectId y) const;

  /// π(y|x): product of next-token probabilities along the chain from x down to y.
  double pi(ObjectId x, ObjectId y) const;
  double pi(const Text& x, const Text& y) const { return pi(id(x), id(y)); }
  /// -ln π(y|x) on [0, +inf].
  double distance(ObjectId x, ObjectId y) const;
  double distance(const Text& x, const Text& y) const { return distance(id(x), id(y)); }

  /// Objects y >= x in canonical order, x first.
  std::vector<ObjectId> descendants(ObjectId x) const;
  /// The saturated chain x = c_0 < c_1 < ... < c_m = y, or empty when x is not a prefix of y.
  std::vector<ObjectId> chain(ObjectId x, ObjectId y) const;
  /// T(x): unfinished descendants of length N plus finished descendants.
  std::vector<ObjectId> terminating_states(ObjectId x) const;
  std::vector<ObjectId> terminating_states(const Text& x) const;
  std::vector<ObjectId> interior_objects() const;
  std::size_t terminating_count() const;

  /// Copy in which the edge into `target` has probability p. Only meant for
  /// fault-injection tests; the enrichment axioms generally fail afterwards.
  TextCategory with_edge_probability(ObjectId target, double p) const;

 private:
  TextCategory(Alphabet alphabet, Cutoff cutoff, Text root)
      : alphabet_(std::move(alphabet)), cutoff_(cutoff), root_(std::move(root)) {}

  Alphabet alphabet_;
  Cutoff cutoff_;
  Text root_;
  std::vector<CategoryNode> nodes_;
  std::vector<std::size_t> dist_offset_;  // into dists_, per node; unused for leaves
  std::vector<double> dists_;
};

/// Objects in the subcategory rooted at a text of the given length, or the
/// full category when prompt_length = 1. Saturates at SIZE_MAX.
std::size_t expected_object_count(std::size_t alphabet_size, Cutoff cutoff, std::size_t prompt_length = 1,
                                  bool finished = false);

struct EnrichmentReport {
  bool exhaustive = false;              // every (x,y,z) visited, not just chains
  std::size_t triples = 0;
  double max_composition_excess = 0.0;  // max of π(y|x)π(z|y) - π(z|x)
  double max_chain_defect = 0.0;        // max |π(y|x)π(z|y) - π(z|x)| over x <= y <= z
  double max_pmf_defect = 0.0;          // max |sum_{T(x)} π(y|x) - 1|
  double max_triangle_excess = 0.0;     // max of d(x,z) - d(x,y) - d(y,z), finite cases
  std::size_t triangle_violations = 0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

/// Checks the [0,1]-enrichment, the terminating-state pmf and the triangle
/// inequality. Violations are reported, never thrown.
EnrichmentReport check_enrichment(const TextCategory& cat, const Tolerances& tol = kDefaultTolerances,
                                  const Limits& limits = kDefaultLimits);

/// `text,length,finished,pi_from_root`, one row per object.
void write_category_csv(const TextCategory& cat, std::ostream& out);

}  // namespace textmag
