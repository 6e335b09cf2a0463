#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "textmag/category.hpp"
#include "textmag/error.hpp"
#include "textmag/magnitude.hpp"
#include "textmag/metrics.hpp"
#include "textmag/model.hpp"

using namespace textmag;

namespace {

const Token A = Token::symbol(0);
const Token B = Token::symbol(1);
const Token EOS = Token::eos();

Text txt(std::initializer_list<Token> toks) {
  Text t = Text::root();
  for (auto tok : toks) t = t.extended(tok);
  return t;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

const ModelSpec uniform_ab(Alphabet({"a", "b"}), Cutoff(3), UniformModel{});

}  // namespace

TEST_CASE("perplexity") {
  const auto y = txt({A, B});
  CHECK(perplexity(uniform_ab, y) == doctest::Approx(3.0).epsilon(1e-14));
  const auto cat = TextCategory::build(uniform_ab);
  CHECK(std::pow(cat.pi(Text::root(), y), 0.5) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(perplexity(uniform_ab, txt({A, EOS})) == doctest::Approx(3.0));

  const auto det = parse_model_spec(nlohmann::json::parse(
      R"({"alphabet":["a","b"],"cutoff":4,"model":{"kind":"table","default":{"a":1}}})"));
  CHECK(perplexity(det, txt({A, A, A})) == 1.0);
  CHECK(code_of([&] { perplexity(det, txt({A, B})); }) == ErrorCode::ZeroProbabilityStep);
  CHECK(code_of([&] { perplexity(det, Text::root()); }) == ErrorCode::TooShort);
  CHECK(code_of([&] { perplexity(uniform_ab, txt({A, B, A})); }) == ErrorCode::OverCutoff);
}

TEST_CASE("perplexity times a zeta entry is one") {
  std::mt19937_64 rng(77);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto model = random_table_model(3, Cutoff(5), seed);
    const auto cat = TextCategory::build(model);
    const auto objs = cat.descendants(0);
    for (int rep = 0; rep < 5; ++rep) {
      const ObjectId y = objs[1 + rng() % (objs.size() - 1)];
      const auto text = cat.text(y);
      const double n = double(text.length() - 1);
      CHECK(std::abs(perplexity(model, text) * std::pow(cat.pi(0, y), 1.0 / n) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("diversity") {
  const auto cat = TextCategory::build(uniform_ab);
  const auto p = terminating_pmf(cat, 0);
  REQUIRE(p.size() == 7);
  std::vector<double> masses;
  for (const auto& [y, m] : p) masses.push_back(m);
  CHECK(std::abs(diversity(cat, p, 1.0) - shannon_entropy(masses)) < 1e-12);
  // Six states of mass 1/9 and one of mass 1/3.
  CHECK(diversity(cat, p, 1.0) == doctest::Approx(5.0 / 3 * std::log(3.0)).epsilon(1e-14));

  for (double t : {0.5, 1.0, 3.0}) CHECK(diversity(cat, {{cat.id(txt({A})), 1.0}}, t) == 0.0);
  const ObjectPmf two{{cat.id(txt({A})), 0.5}, {cat.id(txt({B})), 0.5}};
  CHECK(diversity(cat, two, 1.0) == doctest::Approx(std::log(2.0)));

  // Comparable objects: the inner sum picks up π(⊥a|⊥)^t p(⊥).
  const ObjectPmf chain{{0, 0.5}, {cat.id(txt({A})), 0.5}};
  const double inner = std::pow(1.0 / 3, 2.0) * 0.5 + 0.5;
  CHECK(diversity(cat, chain, 2.0) == doctest::Approx(-0.5 * std::log(0.5) - 0.5 * std::log(inner)));

  CHECK(code_of([&] { diversity(cat, {{0, 0.7}}, 1.0); }) == ErrorCode::BadPMF);
  CHECK(code_of([&] { diversity(cat, {{0, 1.5}, {1, -0.5}}, 1.0); }) == ErrorCode::BadPMF);
  CHECK(code_of([&] { diversity(cat, {{0, 0.5}, {0, 0.5}}, 1.0); }) == ErrorCode::BadPMF);
  CHECK(code_of([&] { diversity(cat, {{99, 1.0}}, 1.0); }) == ErrorCode::BadPMF);
}

TEST_CASE("diversity collapses to Shannon entropy on terminating pmfs") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto cat = TextCategory::build(random_table_model(2 + seed % 2, Cutoff(3 + seed % 2), seed, 0.2));
    for (ObjectId x : cat.interior_objects()) {
      const auto p = terminating_pmf(cat, x);
      std::vector<double> masses;
      for (const auto& [y, m] : p) masses.push_back(m);
      CHECK(std::abs(diversity(cat, p, 1.0) - shannon_entropy(masses)) < 1e-9);
    }
  }
}
