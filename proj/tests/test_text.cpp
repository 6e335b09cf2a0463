#include <doctest.h>

#include <algorithm>
#include <vector>

#include "textmag/error.hpp"
#include "textmag/model.hpp"
#include "textmag/text.hpp"

using namespace textmag;

namespace {

const Alphabet ab({"a", "b"});
const Token A = Token::symbol(0);
const Token B = Token::symbol(1);
const Token BOS = Token::bos();
const Token EOS = Token::eos();

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

// Every object of the poset for a small alphabet and cutoff.
std::vector<Text> universe(const Alphabet& alpha, Cutoff n) {
  std::vector<Text> out{Text::root()};
  for (std::size_t i = 0; i < out.size(); ++i)
    for (auto& y : one_token_extensions(out[i], alpha, n)) out.push_back(y);
  return out;
}

}  // namespace

TEST_CASE("make_text validates sentinel placement") {
  const auto root = Text::make({BOS});
  CHECK(root.length() == 1);
  CHECK_FALSE(root.finished());

  const auto fin = Text::make({BOS, A, B, EOS});
  CHECK(fin.length() == 4);
  CHECK(fin.finished());

  CHECK(code_of([] { Text::make({A, B}); }) == ErrorCode::MissingBOS);
  CHECK(code_of([] { Text::make({}); }) == ErrorCode::Empty);
  CHECK(code_of([] { Text::make({BOS, BOS}); }) == ErrorCode::InteriorSpecial);
  CHECK(code_of([] { Text::make({BOS, EOS, A}); }) == ErrorCode::InteriorSpecial);
  CHECK(code_of([&] { fin.extended(A); }) == ErrorCode::InteriorSpecial);
}

TEST_CASE("is_prefix") {
  const auto x = Text::make({BOS, A});
  CHECK(is_prefix(x, Text::make({BOS, A, B, EOS})));
  CHECK(is_prefix(x, x));
  CHECK_FALSE(is_prefix(Text::make({BOS, A, EOS}), Text::make({BOS, A, B})));
  CHECK_FALSE(is_prefix(Text::make({BOS, A, B}), x));
}

TEST_CASE("one_token_extensions") {
  const Cutoff n3(3);
  const auto ext = one_token_extensions(Text::root(), ab, n3);
  REQUIRE(ext.size() == 3);
  CHECK(ext[0] == Text::make({BOS, A}));
  CHECK(ext[1] == Text::make({BOS, B}));
  CHECK(ext[2] == Text::make({BOS, EOS}));
  CHECK(one_token_extensions(Text::make({BOS, A, B}), ab, n3).empty());
  CHECK(one_token_extensions(Text::make({BOS, A, EOS}), ab, n3).empty());
}

TEST_CASE("prefix order is a partial order with strictly increasing grading") {
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto alpha = numbered_alphabet(k);
    const auto u = universe(alpha, Cutoff(4 - (k == 3)));
    for (const auto& x : u) {
      CHECK(is_prefix(x, x));
      if (!x.finished() && x.length() < (k == 3 ? 3u : 4u))
        CHECK(one_token_extensions(x, alpha, Cutoff(4 - (k == 3))).size() == k + 1);
      for (const auto& y : u) {
        if (x != y && is_prefix(x, y)) CHECK(x.length() < y.length());
        if (is_prefix(x, y) && is_prefix(y, x)) CHECK(x == y);
        for (const auto& z : u)
          if (is_prefix(x, y) && is_prefix(y, z)) CHECK(is_prefix(x, z));
      }
    }
  }
}

TEST_CASE("canonical order is length then token code and extends the prefix order") {
  auto u = universe(ab, Cutoff(4));
  CHECK(std::is_sorted(u.begin(), u.end()));
  CHECK(Text::make({BOS, B}) < Text::make({BOS, EOS}));
  CHECK(Text::make({BOS, EOS}) < Text::make({BOS, A, A}));
  for (const auto& x : u)
    for (const auto& y : u)
      if (x != y && is_prefix(x, y)) CHECK(x < y);
}

TEST_CASE("alphabet rejects reserved, duplicate and empty names") {
  CHECK(code_of([] { Alphabet({"a", "<eos>"}); }) == ErrorCode::ReservedTokenInAlphabet);
  CHECK(code_of([] { Alphabet({"<bos>"}); }) == ErrorCode::ReservedTokenInAlphabet);
  CHECK(code_of([] { Alphabet({"a", "a"}); }) == ErrorCode::ParseError);
  CHECK(code_of([] { Alphabet({"a b"}); }) == ErrorCode::ParseError);
  CHECK(code_of([] { Alphabet(std::vector<std::string>{}); }) == ErrorCode::Empty);
  CHECK(ab.slot(EOS) == 2);
  CHECK(ab.token_at_slot(1) == B);
  CHECK(code_of([] { ab.token("c"); }) == ErrorCode::UnknownToken);
}

TEST_CASE("parse_text and spell round-trip") {
  const auto t = parse_text(ab, "a b <eos>");
  CHECK(t == Text::make({BOS, A, B, EOS}));
  CHECK(parse_text(ab, "<bos> a b <eos>") == t);
  CHECK(spell(ab, t) == "<bos> a b <eos>");
  CHECK(parse_text(ab, "") == Text::root());
  CHECK(spell(ab, Text::root()) == "<bos>");
  CHECK(code_of([] { parse_text(ab, "a <bos>"); }) == ErrorCode::InteriorSpecial);
}

TEST_CASE("is_object") {
  CHECK(is_object(Text::make({BOS, A, B}), ab, Cutoff(3)));
  CHECK(is_object(Text::make({BOS, A, EOS}), ab, Cutoff(3)));
  CHECK_FALSE(is_object(Text::make({BOS, A, B, EOS}), ab, Cutoff(3)));
  CHECK_FALSE(is_object(Text::make({BOS, Token::symbol(5)}), ab, Cutoff(3)));
}

TEST_CASE("hash agrees with equality") {
  const auto u = universe(ab, Cutoff(3));
  for (const auto& x : u) {
    const auto copy = Text::make(std::vector<Token>(x.tokens().begin(), x.tokens().end()));
    CHECK(copy == x);
    CHECK(copy.hash() == x.hash());
  }
}
