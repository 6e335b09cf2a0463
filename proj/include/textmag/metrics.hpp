#pragma once

// Perplexity and diversity. Logarithms are natural throughout, matching
// d = -ln π; a perplexity computed here equals one computed from base-2
// log-probabilities, only the intermediate entropies are in nats.

#include <utility>
#include <vector>

#include "textmag/category.hpp"
#include "textmag/model.hpp"

namespace textmag {

/// exp(-(1/n) sum_{i=1}^{n} ln p(a_i | y_{<i})) for y = a_0 a_1 ... a_n, a_0 = <bos>.
/// Throws TooShort (n = 0), ZeroProbabilityStep, or the model's own errors.
double perplexity(const ModelSpec& model, const Text& y);

/// pmf on objects of a category, as (object, mass) pairs.
using ObjectPmf = std::vector<std::pair<ObjectId, double>>;

/// -sum_y p(y) ln(sum_x π(y|x)^t p(x)). Throws BadPMF unless p is a pmf (1e-9)
/// with distinct objects.
double diversity(const TextCategory& cat, const ObjectPmf& p, double t, const Tolerances& tol = kDefaultTolerances);

/// π(-|x) restricted to T(x).
ObjectPmf terminating_pmf(const TextCategory& cat, ObjectId x);

}  // namespace textmag
