#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "textmag/category.hpp"
#include "textmag/error.hpp"
#include "textmag/magnitude.hpp"
#include "textmag/model.hpp"

using namespace textmag;

namespace {

const Token A = Token::symbol(0);
const Token B = Token::symbol(1);
const Token EOS = Token::eos();

ModelSpec uniform(std::size_t k, std::size_t n) { return ModelSpec(numbered_alphabet(k), Cutoff(n), UniformModel{}); }

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

}  // namespace

TEST_CASE("object counts") {
  CHECK(TextCategory::build(uniform(2, 3)).size() == 10);
  CHECK(TextCategory::build(uniform(3, 1)).size() == 1);
  CHECK(TextCategory::build(uniform(1, 2)).size() == 3);
  const auto finished = TextCategory::build(uniform(2, 3), txt({A, EOS}));
  CHECK(finished.size() == 1);
  CHECK(finished.terminating_count() == 1);
  for (std::size_t k = 1; k <= 4; ++k)
    for (std::size_t n = 1; n <= 5; ++n) {
      const auto cat = TextCategory::build(uniform(k, n));
      CHECK(cat.size() == count_objects(k, Cutoff(n)));
      CHECK(cat.size() == expected_object_count(k, Cutoff(n)));
    }
}

TEST_CASE("objects are exactly the texts above the root, in canonical order") {
  const auto m = uniform(2, 4);
  const auto root = txt({B});
  const auto cat = TextCategory::build(m, root);
  for (ObjectId i = 0; i < cat.size(); ++i) {
    const auto t = cat.text(i);
    CHECK(is_prefix(root, t));
    CHECK(is_object(t, m.alphabet(), m.cutoff()));
    CHECK(cat.id(t) == i);
    if (i > 0) CHECK(cat.text(i - 1) < t);
  }
  CHECK(cat.size() == expected_object_count(2, Cutoff(4), 2));
  CHECK_FALSE(cat.find(txt({A})).has_value());
  CHECK(code_of([&] { cat.id(txt({A})); }) == ErrorCode::NotInCategory);
}

TEST_CASE("TooLarge and bad roots") {
  Limits small;
  small.max_objects = 50;
  CHECK(code_of([&] { TextCategory::build(uniform(3, 5), Text::root(), small); }) == ErrorCode::TooLarge);
  CHECK(code_of([] { TextCategory::build(uniform(2, 2), txt({A, B})); }) == ErrorCode::NotInCategory);
}

TEST_CASE("pi and distance") {
  const auto cat = TextCategory::build(uniform(2, 4));
  CHECK(cat.pi(Text::root(), Text::root()) == 1.0);
  CHECK(cat.pi(Text::root(), txt({A, B, EOS})) == doctest::Approx(1.0 / 27).epsilon(1e-14));
  CHECK(cat.pi(txt({A}), txt({B})) == 0.0);
  CHECK(cat.pi(txt({A, B}), txt({A})) == 0.0);
  CHECK(cat.distance(txt({A}), txt({A})) == 0.0);
  CHECK(cat.distance(Text::root(), txt({A})) == doctest::Approx(std::log(3.0)));
  CHECK(cat.distance(txt({A, EOS}), txt({A})) == kInfinity);
  CHECK(code_of([&] { cat.pi(Text::root(), txt({A, A, A, A})); }) == ErrorCode::NotInCategory);
}

TEST_CASE("terminating states") {
  const auto cat = TextCategory::build(uniform(2, 3));
  std::set<std::string> got;
  for (auto y : cat.terminating_states(Text::root())) got.insert(spell(cat.alphabet(), cat.text(y)));
  const std::set<std::string> expected{"<bos> a a", "<bos> a b",     "<bos> b a",    "<bos> b b",
                                       "<bos> <eos>", "<bos> a <eos>", "<bos> b <eos>"};
  CHECK(got == expected);

  const auto one = TextCategory::build(uniform(2, 1));
  CHECK(one.terminating_states(Text::root()) == std::vector<ObjectId>{0});

  const auto a2 = TextCategory::build(uniform(1, 2));
  const auto t = a2.terminating_states(Text::root());
  REQUIRE(t.size() == 2);
  CHECK(a2.text(t[0]) == txt({A}));
  CHECK(a2.text(t[1]) == txt({EOS}));
}

TEST_CASE("terminating states form an antichain and partition the objects") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto cat = TextCategory::build(random_table_model(2, Cutoff(4), seed, 0.25));
    const auto t = cat.terminating_states(0);
    for (auto x : t)
      for (auto y : t)
        if (x != y) CHECK_FALSE(cat.precedes(x, y));
    CHECK(t.size() + cat.interior_objects().size() == cat.size());
    for (ObjectId x = 0; x < cat.size(); ++x)
      for (ObjectId y = 0; y < cat.size(); ++y)
        if (cat.pi(x, y) > 0) CHECK(cat.precedes(x, y));
  }
}

TEST_CASE("enrichment checks pass on valid models") {
  const auto r = check_enrichment(TextCategory::build(uniform(2, 3)));
  CHECK(r.ok());
  CHECK(r.exhaustive);
  CHECK(r.triples == 1000);

  // Zero-mass tokens create infinite distances.
  const auto m = parse_model_spec(nlohmann::json::parse(
      R"({"alphabet":["a","b"],"cutoff":3,"model":{"kind":"table","default":{"a":0.6,"b":0,"<eos>":0.4}}})"));
  const auto cat = TextCategory::build(m);
  CHECK(cat.distance(Text::root(), txt({B})) == kInfinity);
  const auto z = check_enrichment(cat);
  CHECK(z.ok());
  CHECK(z.max_pmf_defect <= 1e-9);
}

TEST_CASE("enrichment on strictly positive random models") {
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    const auto cat = TextCategory::build(random_table_model(3, Cutoff(3), seed));
    const auto r = check_enrichment(cat);
    CHECK(r.ok());
    for (ObjectId x = 0; x < cat.size(); ++x)
      for (ObjectId y = 0; y < cat.size(); ++y)
        if (cat.precedes(x, y) && cat.pi(x, y) == 1.0) CHECK(x == y);
  }
}

TEST_CASE("doubling one edge probability breaks the pmf check") {
  const auto cat = TextCategory::build(uniform(2, 3));
  const auto a = cat.id(txt({A}));
  const auto bad = cat.with_edge_probability(a, 2.0 * cat.node(a).edge_probability);
  const auto r = check_enrichment(bad);
  CHECK_FALSE(r.ok());
  CHECK(r.max_pmf_defect == doctest::Approx(1.0 / 3));
}

TEST_CASE("chain-only enrichment above the exhaustive limit") {
  const auto cat = TextCategory::build(random_table_model(2, Cutoff(8), 3));
  REQUIRE(cat.size() > kDefaultLimits.exhaustive_triples);
  const auto r = check_enrichment(cat);
  CHECK_FALSE(r.exhaustive);
  CHECK(r.ok());
}

TEST_CASE("chains and descendants") {
  const auto cat = TextCategory::build(uniform(2, 4));
  const auto x = cat.id(txt({A}));
  const auto y = cat.id(txt({A, B, EOS}));
  const auto c = cat.chain(x, y);
  REQUIRE(c.size() == 3);
  CHECK(c[1] == cat.id(txt({A, B})));
  CHECK(cat.chain(y, x).empty());
  const auto d = cat.descendants(x);
  CHECK(d.front() == x);
  CHECK(d.size() == expected_object_count(2, Cutoff(4), 2));
  CHECK(std::is_sorted(d.begin(), d.end()));
}

TEST_CASE("category dump") {
  std::ostringstream out;
  write_category_csv(TextCategory::build(uniform(1, 2)), out);
  CHECK(out.str() ==
        "text,length,finished,pi_from_root\n"
        "<bos>,1,false,1\n"
        "<bos> a,2,false,0.5\n"
        "<bos> <eos>,2,true,0.5\n");
}
