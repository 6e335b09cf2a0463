#pragma once

// Next-token probability sources and the JSON interchange format.
//
// A ModelSpec is immutable once loaded and next_token_distribution() is a
// pure function of (model, text): it keeps no cache, so one ModelSpec may be
// queried from any number of threads. Per-node memoization lives in
// TextCategory, which asks for every distribution exactly once.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <json.hpp>

#include "textmag/text.hpp"
#include "textmag/tolerances.hpp"

namespace textmag {

/// pmf over A + eos, stored by Alphabet::slot (symbols first, eos last).
class NextTokenDistribution {
 public:
  NextTokenDistribution() = default;
  /// Takes masses that already form a pmf (checked to 1e-9).
  explicit NextTokenDistribution(std::vector<double> masses);

  static NextTokenDistribution uniform(std::size_t continuations);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t slot) const { return probs_[slot]; }
  std::span<const double> probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

/// Validates and renormalizes raw masses in slot order. Deviations of the sum
/// from 1 up to `window` are corrected; anything larger, or a negative mass,
/// throws BadDistribution. Returns the absolute deviation that was corrected.
double normalize_masses(std::vector<double>& masses, double window);

struct UniformModel {};

struct TableModel {
  std::unordered_map<Text, NextTokenDistribution, TextHash> nodes;
  std::optional<NextTokenDistribution> fallback;  // the file's "default"
};

/// Additive (add-alpha) smoothed n-gram. Contexts are the last order-1 tokens
/// of the text (fewer near the start, the <bos> sentinel included).
struct NgramModel {
  std::size_t order = 1;
  double alpha = 0.0;
  std::map<std::vector<Token>, std::vector<double>> counts;  // context -> counts by slot
};

class ModelSpec {
 public:
  using Kind = std::variant<UniformModel, TableModel, NgramModel>;

  ModelSpec(Alphabet alphabet, Cutoff cutoff, Kind kind);

  const Alphabet& alphabet() const { return alphabet_; }
  Cutoff cutoff() const { return cutoff_; }
  const Kind& kind() const { return kind_; }
  std::string kind_name() const;

 private:
  Alphabet alphabet_;
  Cutoff cutoff_;
  Kind kind_;
};

/// p_x. Throws FinishedText, OverCutoff (|x| > N-1) or MissingEntry.
NextTokenDistribution next_token_distribution(const ModelSpec& model, const Text& x);

struct LoadDiagnostics {
  std::size_t renormalized = 0;   // distributions whose sum was corrected
  double max_deviation = 0.0;     // largest corrected |sum - 1|
};

ModelSpec parse_model_spec(const nlohmann::json& doc, const Tolerances& tol = kDefaultTolerances,
                           LoadDiagnostics* diagnostics = nullptr);
ModelSpec load_model_spec(const std::filesystem::path& path, const Tolerances& tol = kDefaultTolerances,
                          LoadDiagnostics* diagnostics = nullptr);

nlohmann::json to_json(const ModelSpec& model);
void save_model_spec(const ModelSpec& model, const std::filesystem::path& path);

/// Table model with an entry for every unfinished text shorter than N.
/// Each entry draws masses uniformly and zeroes each slot independently with
/// probability `zero_fraction` (always keeping at least one positive slot).
ModelSpec random_table_model(std::size_t alphabet_size, Cutoff cutoff, std::uint64_t seed,
                             double zero_fraction = 0.0);

/// Alphabet {a, b, ..., z, t26, t27, ...}.
Alphabet numbered_alphabet(std::size_t size);

}  // namespace textmag
