#include "textmag/model.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "textmag/error.hpp"

namespace textmag {

using nlohmann::json;

NextTokenDistribution::NextTokenDistribution(std::vector<double> masses) : probs_(std::move(masses)) {
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::BadDistribution, "mass outside [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kDefaultTolerances.pmf)
    throw Error(ErrorCode::BadDistribution, "masses do not sum to 1");
}

NextTokenDistribution NextTokenDistribution::uniform(std::size_t continuations) {
  return NextTokenDistribution(std::vector<double>(continuations, 1.0 / static_cast<double>(continuations)));
}

double normalize_masses(std::vector<double>& masses, double window) {
  double sum = 0.0;
  for (double p : masses) {
    if (!std::isfinite(p) || p < 0.0) throw Error(ErrorCode::BadDistribution, "negative or non-finite mass");
    sum += p;
  }
  const double deviation = std::abs(sum - 1.0);
  if (deviation > window) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "masses sum to " << sum;
    throw Error(ErrorCode::BadDistribution, msg.str());
  }
  if (sum != 1.0)
    for (double& p : masses) p /= sum;
  return deviation;
}

ModelSpec::ModelSpec(Alphabet alphabet, Cutoff cutoff, Kind kind)
    : alphabet_(std::move(alphabet)), cutoff_(cutoff), kind_(std::move(kind)) {
  if (cutoff_.value < 1) throw Error(ErrorCode::ParseError, "cutoff must be >= 1");
  const std::size_t width = alphabet_.continuations();
  if (const auto* table = std::get_if<TableModel>(&kind_)) {
    for (const auto& [text, dist] : table->nodes) {
      if (text.finished() || text.length() + 1 > cutoff_.value || !is_object(text, alphabet_, cutoff_))
        throw Error(ErrorCode::ParseError, "table entry is not an unfinished text shorter than the cutoff");
      if (dist.size() != width) throw Error(ErrorCode::BadDistribution, "distribution width mismatch");
    }
    if (table->fallback && table->fallback->size() != width)
      throw Error(ErrorCode::BadDistribution, "default distribution width mismatch");
  } else if (const auto* ngram = std::get_if<NgramModel>(&kind_)) {
    if (ngram->order < 1) throw Error(ErrorCode::ParseError, "n-gram order must be >= 1");
    if (!(ngram->alpha >= 0.0)) throw Error(ErrorCode::ParseError, "smoothing constant must be >= 0");
    for (const auto& [context, counts] : ngram->counts) {
      if (context.size() > ngram->order - 1) throw Error(ErrorCode::ParseError, "n-gram context too long");
      if (counts.size() != width) throw Error(ErrorCode::ParseError, "n-gram count width mismatch");
      for (double c : counts)
        if (!(c >= 0.0) || !std::isfinite(c)) throw Error(ErrorCode::ParseError, "negative n-gram count");
    }
  }
}

std::string ModelSpec::kind_name() const {
  switch (kind_.index()) {
    case 0: return "uniform";
    case 1: return "table";
    default: return "ngram";
  }
}

namespace {

struct DistributionVisitor {
  const ModelSpec& model;
  const Text& x;

  NextTokenDistribution operator()(const UniformModel&) const {
    return NextTokenDistribution::uniform(model.alphabet().continuations());
  }

  NextTokenDistribution operator()(const TableModel& table) const {
    if (auto it = table.nodes.find(x); it != table.nodes.end()) return it->second;
    if (table.fallback) return *table.fallback;
    throw Error(ErrorCode::MissingEntry, "no table entry for '" + spell(model.alphabet(), x) + "'");
  }

  NextTokenDistribution operator()(const NgramModel& ngram) const {
    const auto toks = x.tokens();
    const std::size_t take = std::min(ngram.order - 1, toks.size());
    std::vector<Token> context(toks.end() - static_cast<std::ptrdiff_t>(take), toks.end());
    const std::size_t width = model.alphabet().continuations();
    std::vector<double> masses(width, ngram.alpha);
    if (auto it = ngram.counts.find(context); it != ngram.counts.end())
      for (std::size_t s = 0; s < width; ++s) masses[s] += it->second[s];
    const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
    // Unseen context with alpha = 0: no evidence at all, fall back to uniform.
    if (total <= 0.0) return NextTokenDistribution::uniform(width);
    for (double& m : masses) m /= total;
    normalize_masses(masses, kDefaultTolerances.pmf);
    return NextTokenDistribution(std::move(masses));
  }
};

std::vector<Token> parse_tokens(const Alphabet& alphabet, const std::string& key) {
  std::istringstream in(key);
  std::vector<Token> out;
  std::string word;
  while (in >> word) out.push_back(alphabet.token(word));
  return out;
}

std::vector<double> parse_masses(const Alphabet& alphabet, const json& obj, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::ParseError, where + ": distribution must be an object");
  std::vector<double> masses(alphabet.continuations(), 0.0);
  for (const auto& [name, value] : obj.items()) {
    Token tok;
    try {
      tok = alphabet.token(name);
    } catch (const Error&) {
      throw Error(ErrorCode::ParseError, where + ": unknown token '" + name + "'");
    }
    if (tok.is_bos()) throw Error(ErrorCode::ParseError, where + ": <bos> cannot be generated");
    if (!value.is_number()) throw Error(ErrorCode::ParseError, where + ": probability must be a number");
    masses[alphabet.slot(tok)] = value.get<double>();
  }
  return masses;
}

NextTokenDistribution ingest(std::vector<double> masses, const Tolerances& tol, LoadDiagnostics* diag,
                             const std::string& where) {
  double deviation = 0.0;
  try {
    deviation = normalize_masses(masses, tol.ingest);
  } catch (const Error& e) {
    throw Error(ErrorCode::BadDistribution, where + ": " + e.what());
  }
  if (diag && deviation > 0.0) {
    ++diag->renormalized;
    diag->max_deviation = std::max(diag->max_deviation, deviation);
  }
  return NextTokenDistribution(std::move(masses));
}

json masses_to_json(const Alphabet& alphabet, std::span<const double> masses) {
  json out = json::object();
  for (std::size_t s = 0; s < masses.size(); ++s) out[alphabet.name(alphabet.token_at_slot(s))] = masses[s];
  return out;
}

std::string spell_tokens(const Alphabet& alphabet, const std::vector<Token>& toks) {
  std::string out;
  for (auto t : toks) {
    if (!out.empty()) out += ' ';
    out += alphabet.name(t);
  }
  return out;
}

}  // namespace

NextTokenDistribution next_token_distribution(const ModelSpec& model, const Text& x) {
  if (x.finished()) throw Error(ErrorCode::FinishedText, "finished texts have no continuation");
  if (x.length() + 1 > model.cutoff().value)
    throw Error(ErrorCode::OverCutoff, "prompt length exceeds N-1");
  return std::visit(DistributionVisitor{model, x}, model.kind());
}

ModelSpec parse_model_spec(const json& doc, const Tolerances& tol, LoadDiagnostics* diag) {
  try {
    if (!doc.is_object()) throw Error(ErrorCode::ParseError, "top level must be an object");
    std::vector<std::string> names;
    for (const auto& v : doc.at("alphabet")) {
      const auto name = v.get<std::string>();
      if (name == kBosSpelling || name == kEosSpelling)
        throw Error(ErrorCode::ReservedTokenInAlphabet, "token '" + name + "' is reserved");
      names.push_back(name);
    }
    Alphabet alphabet(std::move(names));
    const auto n = doc.at("cutoff").get<long long>();
    if (n < 1) throw Error(ErrorCode::ParseError, "cutoff must be >= 1");
    Cutoff cutoff(static_cast<std::size_t>(n));

    const json& m = doc.at("model");
    const auto kind = m.at("kind").get<std::string>();
    if (kind == "uniform") return ModelSpec(std::move(alphabet), cutoff, UniformModel{});

    if (kind == "table") {
      TableModel table;
      if (m.contains("default")) table.fallback = ingest(parse_masses(alphabet, m["default"], "default"), tol, diag, "default");
      if (m.contains("nodes")) {
        for (const auto& [key, value] : m["nodes"].items()) {
          auto toks = parse_tokens(alphabet, key);
          if (toks.empty() || !toks.front().is_bos())
            throw Error(ErrorCode::ParseError, "node key '" + key + "' must start with <bos>");
          Text text = Text::make(std::move(toks));
          auto dist = ingest(parse_masses(alphabet, value, key), tol, diag, key);
          if (!table.nodes.emplace(std::move(text), std::move(dist)).second)
            throw Error(ErrorCode::ParseError, "duplicate node key '" + key + "'");
        }
      }
      return ModelSpec(std::move(alphabet), cutoff, std::move(table));
    }

    if (kind == "ngram") {
      NgramModel ngram;
      const auto order = m.at("order").get<long long>();
      if (order < 1) throw Error(ErrorCode::ParseError, "n-gram order must be >= 1");
      ngram.order = static_cast<std::size_t>(order);
      ngram.alpha = m.value("alpha", 0.0);
      if (m.contains("counts")) {
        for (const auto& [key, value] : m["counts"].items()) {
          auto context = parse_tokens(alphabet, key);
          for (std::size_t i = 0; i < context.size(); ++i)
            if ((context[i].is_bos() && i != 0) || context[i].is_eos())
              throw Error(ErrorCode::ParseError, "bad n-gram context '" + key + "'");
          auto counts = parse_masses(alphabet, value, key);
          ngram.counts.emplace(std::move(context), std::move(counts));
        }
      }
      return ModelSpec(std::move(alphabet), cutoff, std::move(ngram));
    }
    throw Error(ErrorCode::ParseError, "unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

ModelSpec load_model_spec(const std::filesystem::path& path, const Tolerances& tol, LoadDiagnostics* diag) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return parse_model_spec(doc, tol, diag);
}

json to_json(const ModelSpec& model) {
  const auto& alphabet = model.alphabet();
  json doc;
  doc["alphabet"] = alphabet.names();
  doc["cutoff"] = model.cutoff().value;
  json m;
  m["kind"] = model.kind_name();
  if (const auto* table = std::get_if<TableModel>(&model.kind())) {
    if (table->fallback) m["default"] = masses_to_json(alphabet, table->fallback->probs());
    json nodes = json::object();
    for (const auto& [text, dist] : table->nodes) nodes[spell(alphabet, text)] = masses_to_json(alphabet, dist.probs());
    m["nodes"] = std::move(nodes);
  } else if (const auto* ngram = std::get_if<NgramModel>(&model.kind())) {
    m["order"] = ngram->order;
    m["alpha"] = ngram->alpha;
    json counts = json::object();
    for (const auto& [context, c] : ngram->counts) counts[spell_tokens(alphabet, context)] = masses_to_json(alphabet, c);
    m["counts"] = std::move(counts);
  }
  doc["model"] = std::move(m);
  return doc;
}

void save_model_spec(const ModelSpec& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << to_json(model).dump(2) << '\n';
}

Alphabet numbered_alphabet(std::size_t size) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < size; ++i)
    names.push_back(i < 26 ? std::string(1, static_cast<char>('a' + i)) : "t" + std::to_string(i));
  return Alphabet(std::move(names));
}

ModelSpec random_table_model(std::size_t alphabet_size, Cutoff cutoff, std::uint64_t seed, double zero_fraction) {
  Alphabet alphabet = numbered_alphabet(alphabet_size);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mass(0.05, 1.0);
  std::bernoulli_distribution zero(zero_fraction);
  const std::size_t width = alphabet.continuations();

  TableModel table;
  std::vector<Text> frontier{Text::root()};
  while (!frontier.empty()) {
    std::vector<Text> next;
    for (const auto& x : frontier) {
      if (x.finished() || x.length() >= cutoff.value) continue;
      std::vector<double> m(width);
      double sum = 0.0;
      for (auto& v : m) {
        v = zero(rng) ? 0.0 : mass(rng);
        sum += v;
      }
      if (sum == 0.0) {
        m[std::uniform_int_distribution<std::size_t>(0, width - 1)(rng)] = 1.0;
        sum = 1.0;
      }
      for (auto& v : m) v /= sum;
      normalize_masses(m, 1e-12);
      table.nodes.emplace(x, NextTokenDistribution(std::move(m)));
      for (std::size_t s = 0; s < width; ++s) next.push_back(x.extended(alphabet.token_at_slot(s)));
    }
    frontier = std::move(next);
  }
  return ModelSpec(std::move(alphabet), cutoff, std::move(table));
}

}  // namespace textmag
