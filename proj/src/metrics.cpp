#include "textmag/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "textmag/error.hpp"

namespace textmag {

double perplexity(const ModelSpec& model, const Text& y) {
  const auto toks = y.tokens();
  const std::size_t n = toks.size() - 1;
  if (n == 0) throw Error(ErrorCode::TooShort, "perplexity needs at least one generated token");
  if (y.length() > model.cutoff().value) throw Error(ErrorCode::OverCutoff, "text longer than the cutoff");
  Text prefix = Text::root();
  double log_sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const auto dist = next_token_distribution(model, prefix);
    const double p = dist[model.alphabet().slot(toks[i])];
    if (p <= 0.0)
      throw Error(ErrorCode::ZeroProbabilityStep,
                  "token " + std::to_string(i) + " has probability 0 after '" + spell(model.alphabet(), prefix) + "'");
    log_sum += std::log(p);
    if (i < n) prefix = prefix.extended(toks[i]);
  }
  return std::exp(-log_sum / static_cast<double>(n));
}

double diversity(const TextCategory& cat, const ObjectPmf& p, double t, const Tolerances& tol) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale t must be positive");
  double total = 0.0;
  std::vector<ObjectId> seen;
  for (const auto& [obj, mass] : p) {
    if (obj >= cat.size()) throw Error(ErrorCode::BadPMF, "support outside the category");
    if (!(mass >= 0.0)) throw Error(ErrorCode::BadPMF, "negative mass");
    seen.push_back(obj);
    total += mass;
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) throw Error(ErrorCode::BadPMF, "repeated object");
  if (std::abs(total - 1.0) > tol.pmf) throw Error(ErrorCode::BadPMF, "masses do not sum to 1");

  double h = 0.0;
  for (const auto& [y, py] : p) {
    if (py == 0.0) continue;
    double similarity = 0.0;
    for (const auto& [x, px] : p) {
      const double pi = cat.pi(x, y);
      if (pi > 0.0) similarity += std::pow(pi, t) * px;
    }
    h -= py * std::log(similarity);
  }
  return h;
}

ObjectPmf terminating_pmf(const TextCategory& cat, ObjectId x) {
  ObjectPmf out;
  for (ObjectId y : cat.terminating_states(x)) out.emplace_back(y, cat.pi(x, y));
  return out;
}

}  // namespace textmag
