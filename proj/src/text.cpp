#include "textmag/text.hpp"

#include <algorithm>
#include <sstream>

#include "textmag/error.hpp"

namespace textmag {

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw Error(ErrorCode::Empty, "alphabet has no tokens");
  for (std::uint32_t i = 0; i < names_.size(); ++i) {
    const auto& n = names_[i];
    if (n == kBosSpelling || n == kEosSpelling)
      throw Error(ErrorCode::ReservedTokenInAlphabet, "token '" + n + "' is reserved");
    if (n.empty() || std::any_of(n.begin(), n.end(), [](unsigned char c) { return std::isspace(c); }))
      throw Error(ErrorCode::ParseError, "token names must be nonempty and contain no whitespace");
    if (!lookup_.emplace(n, i).second)
      throw Error(ErrorCode::ParseError, "duplicate token '" + n + "'");
  }
}

Token Alphabet::token(std::string_view name) const {
  if (name == kBosSpelling) return Token::bos();
  if (name == kEosSpelling) return Token::eos();
  auto it = lookup_.find(std::string(name));
  if (it == lookup_.end()) throw Error(ErrorCode::UnknownToken, "'" + std::string(name) + "'");
  return Token::symbol(it->second);
}

std::string Alphabet::name(Token tok) const {
  if (tok.is_bos()) return std::string(kBosSpelling);
  if (tok.is_eos()) return std::string(kEosSpelling);
  if (tok.index() >= names_.size())
    throw Error(ErrorCode::UnknownToken, "symbol #" + std::to_string(tok.index()) + " is outside the alphabet");
  return names_[tok.index()];
}

std::size_t Alphabet::slot(Token tok) const {
  if (tok.is_eos()) return names_.size();
  if (tok.is_bos() || tok.index() >= names_.size())
    throw Error(ErrorCode::UnknownToken, "not a continuation token");
  return tok.index();
}

Token Alphabet::token_at_slot(std::size_t slot) const {
  if (slot == names_.size()) return Token::eos();
  return Token::symbol(static_cast<std::uint32_t>(slot));
}

Text Text::make(std::vector<Token> raw) {
  if (raw.empty()) throw Error(ErrorCode::Empty, "text has no tokens");
  if (!raw.front().is_bos()) throw Error(ErrorCode::MissingBOS, "text must start with <bos>");
  for (std::size_t i = 1; i < raw.size(); ++i) {
    if (raw[i].is_bos()) throw Error(ErrorCode::InteriorSpecial, "<bos> after position 0");
    if (raw[i].is_eos() && i + 1 != raw.size())
      throw Error(ErrorCode::InteriorSpecial, "<eos> before the last position");
  }
  return Text(std::move(raw));
}

Text Text::root() { return Text({Token::bos()}); }

Text Text::extended(Token tok) const {
  if (finished()) throw Error(ErrorCode::InteriorSpecial, "cannot extend a finished text");
  if (tok.is_bos()) throw Error(ErrorCode::InteriorSpecial, "<bos> after position 0");
  auto next = tokens_;
  next.push_back(tok);
  return Text(std::move(next));
}

Text Text::parent() const {
  if (tokens_.size() == 1) throw Error(ErrorCode::Empty, "the root text has no parent");
  return Text(std::vector<Token>(tokens_.begin(), tokens_.end() - 1));
}

bool Text::is_prefix_of(const Text& other) const {
  return tokens_.size() <= other.tokens_.size() &&
         std::equal(tokens_.begin(), tokens_.end(), other.tokens_.begin());
}

std::strong_ordering operator<=>(const Text& a, const Text& b) {
  if (auto c = a.tokens_.size() <=> b.tokens_.size(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.tokens_.begin(), a.tokens_.end(),
                                                b.tokens_.begin(), b.tokens_.end());
}

std::size_t Text::hash() const {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (auto t : tokens_) {
    h ^= static_cast<std::uint32_t>(t.code());
    h *= 0x100000001b3ULL;
  }
  return h;
}

Text parse_text(const Alphabet& alphabet, std::string_view spelled) {
  std::istringstream in{std::string(spelled)};
  std::vector<Token> raw;
  std::string word;
  while (in >> word) raw.push_back(alphabet.token(word));
  if (raw.empty() || !raw.front().is_bos()) raw.insert(raw.begin(), Token::bos());
  return Text::make(std::move(raw));
}

std::string spell(const Alphabet& alphabet, const Text& text) {
  std::string out;
  for (auto tok : text.tokens()) {
    if (!out.empty()) out += ' ';
    out += tok.is_symbol() && tok.index() >= alphabet.size() ? "#" + std::to_string(tok.index()) : alphabet.name(tok);
  }
  return out;
}

std::vector<Text> one_token_extensions(const Text& x, const Alphabet& alphabet, Cutoff cutoff) {
  std::vector<Text> out;
  if (x.finished() || x.length() >= cutoff.value) return out;
  out.reserve(alphabet.continuations());
  for (std::size_t s = 0; s < alphabet.continuations(); ++s) out.push_back(x.extended(alphabet.token_at_slot(s)));
  return out;
}

bool is_object(const Text& text, const Alphabet& alphabet, Cutoff cutoff) {
  if (text.length() > cutoff.value) return false;
  for (auto tok : text.tokens())
    if (tok.is_symbol() && tok.index() >= alphabet.size()) return false;
  return true;
}

}  // namespace textmag
