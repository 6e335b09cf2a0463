#pragma once

// Tokens, texts and the prefix order on texts.
//
// A text is a sequence that starts with the beginning-of-sentence sentinel,
// continues with alphabet tokens and optionally ends with the
// end-of-sentence sentinel. Texts are ordered first by length and then
// lexicographically by token code; that order is a linear extension of the
// prefix order and fixes the row/column order of every matrix downstream.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace textmag {

inline constexpr std::string_view kBosSpelling = "<bos>";
inline constexpr std::string_view kEosSpelling = "<eos>";

/// An alphabet token (code = index into the alphabet) or one of the two sentinels.
class Token {
 public:
  constexpr Token() = default;
  static constexpr Token bos() { return Token(kBosCode); }
  static constexpr Token eos() { return Token(kEosCode); }
  static constexpr Token symbol(std::uint32_t index) { return Token(static_cast<std::int32_t>(index)); }

  constexpr bool is_bos() const { return code_ == kBosCode; }
  constexpr bool is_eos() const { return code_ == kEosCode; }
  constexpr bool is_symbol() const { return code_ >= 0 && code_ != kEosCode; }
  /// Alphabet index; only meaningful for is_symbol().
  constexpr std::uint32_t index() const { return static_cast<std::uint32_t>(code_); }
  constexpr std::int32_t code() const { return code_; }

  constexpr auto operator<=>(const Token&) const = default;

 private:
  static constexpr std::int32_t kBosCode = -1;
  static constexpr std::int32_t kEosCode = std::numeric_limits<std::int32_t>::max();
  constexpr explicit Token(std::int32_t code) : code_(code) {}
  std::int32_t code_ = kBosCode;
};

/// Finite ordered set of token names. The sentinels are never members.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  /// Number of possible next tokens: every symbol plus end-of-sentence.
  std::size_t continuations() const { return names_.size() + 1; }
  const std::vector<std::string>& names() const { return names_; }

  /// Parses a single token name, including the reserved spellings.
  Token token(std::string_view name) const;
  std::string name(Token tok) const;

  /// Position of a continuation token in a next-token distribution: symbols first, eos last.
  std::size_t slot(Token tok) const;
  Token token_at_slot(std::size_t slot) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> lookup_;
};

/// Maximum text length N.
struct Cutoff {
  std::size_t value = 1;
  constexpr explicit Cutoff(std::size_t n) : value(n) {}
  constexpr auto operator<=>(const Cutoff&) const = default;
};

/// Validated immutable token sequence.
class Text {
 public:
  /// Validates a raw sequence; throws Error{Empty, MissingBOS, InteriorSpecial}.
  static Text make(std::vector<Token> raw);
  /// The one-token text consisting of the beginning-of-sentence sentinel.
  static Text root();

  std::size_t length() const { return tokens_.size(); }
  bool finished() const { return tokens_.back().is_eos(); }
  std::span<const Token> tokens() const { return tokens_; }
  Token back() const { return tokens_.back(); }

  /// Appends one token; throws InteriorSpecial when extending a finished text.
  Text extended(Token tok) const;
  /// The text without its last token; the root has no parent and throws.
  Text parent() const;

  /// tokens() is an initial segment of other.tokens() (reflexive).
  bool is_prefix_of(const Text& other) const;

  friend bool operator==(const Text&, const Text&) = default;
  /// Canonical order: length, then lexicographic by token code.
  friend std::strong_ordering operator<=>(const Text& a, const Text& b);

  std::size_t hash() const;

 private:
  explicit Text(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}
  std::vector<Token> tokens_;
};

inline bool is_prefix(const Text& x, const Text& y) { return x.is_prefix_of(y); }

/// Parses whitespace-separated names. A leading `<bos>` is optional and is
/// added when absent, so "a b" and "<bos> a b" denote the same text.
Text parse_text(const Alphabet& alphabet, std::string_view spelled);
/// Space-separated spelling, always starting with `<bos>`; this is the node-key syntax.
std::string spell(const Alphabet& alphabet, const Text& text);

/// {xa : a in A + eos} when x is unfinished and shorter than the cutoff, else empty.
/// Returned in canonical order.
std::vector<Text> one_token_extensions(const Text& x, const Alphabet& alphabet, Cutoff cutoff);

/// Whether `text` is an object of the poset of texts with this alphabet and cutoff.
bool is_object(const Text& text, const Alphabet& alphabet, Cutoff cutoff);

struct TextHash {
  std::size_t operator()(const Text& t) const { return t.hash(); }
};

}  // namespace textmag
