#pragma once

#include <cstddef>

namespace textmag {

/// Numerical thresholds shared by every module.
struct Tolerances {
  double pmf = 1e-9;           // sums of probabilities
  double algebra = 1e-12;      // exact-in-theory identities (compositionality)
  double matrix = 1e-8;        // entrywise matrix agreement
  double ingest = 1e-6;        // renormalization window when loading a model
  double grade_merge = 1e-9;   // merging magnitude-homology grades
  double unit_t = 1e-9;        // |t - 1| below this uses the t = 1 branch
};

inline constexpr Tolerances kDefaultTolerances{};

struct Limits {
  std::size_t max_objects = 2'000'000;
  std::size_t max_dense = 2000;
  std::size_t max_digraph_vertices = 12;
  std::size_t max_generators = 200'000;
  std::size_t exhaustive_triples = 250;  // objects up to which enrichment checks every (x,y,z)
};

inline constexpr Limits kDefaultLimits{};

}  // namespace textmag
