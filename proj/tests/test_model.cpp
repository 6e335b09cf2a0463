#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "textmag/error.hpp"
#include "textmag/model.hpp"

using namespace textmag;
using nlohmann::json;

namespace {

const Token A = Token::symbol(0);
const Token B = Token::symbol(1);

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

ModelSpec from_string(const std::string& s, LoadDiagnostics* diag = nullptr) {
  return parse_model_spec(json::parse(s), kDefaultTolerances, diag);
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("textmag_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("uniform model") {
  const auto m = from_string(R"({"alphabet":["a","b"],"cutoff":3,"model":{"kind":"uniform"}})");
  const auto p = next_token_distribution(m, Text::root());
  REQUIRE(p.size() == 3);
  for (double v : p.probs()) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(m.kind_name() == "uniform");
}

TEST_CASE("table model lookup, default and missing entries") {
  const auto m = from_string(R"({"alphabet":["a","b"],"cutoff":3,"model":{"kind":"table",
      "nodes":{"<bos>":{"a":0.5,"b":0.3,"<eos>":0.2}}}})");
  const auto p = next_token_distribution(m, Text::root());
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 0.3);
  CHECK(p[2] == 0.2);
  CHECK(code_of([&] { next_token_distribution(m, Text::root().extended(A)); }) == ErrorCode::MissingEntry);

  const auto d = load_model_spec(TEXTMAG_MODELS_DIR "/table_ab_n3.json");
  CHECK(next_token_distribution(d, Text::root())[2] == 0.2);
  CHECK(next_token_distribution(d, Text::root().extended(A))[2] == 0.8);
  CHECK(next_token_distribution(d, Text::root().extended(B))[0] == 0.4);
}

TEST_CASE("omitted tokens have zero mass") {
  const auto m = from_string(R"({"alphabet":["a","b"],"cutoff":2,"model":{"kind":"table",
      "default":{"a":1}}})");
  const auto p = next_token_distribution(m, Text::root());
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
  CHECK(p[2] == 0.0);
}

TEST_CASE("n-gram relative frequencies") {
  const auto m = from_string(R"({"alphabet":["a","b"],"cutoff":3,"model":{"kind":"ngram","order":1,"alpha":0,
      "counts":{"":{"a":3,"b":1,"<eos>":0}}}})");
  const auto p = next_token_distribution(m, Text::root());
  CHECK(p[0] == doctest::Approx(0.75));
  CHECK(p[1] == doctest::Approx(0.25));
  CHECK(p[2] == 0.0);
  // Order 1 ignores the context entirely.
  const auto q = next_token_distribution(m, Text::root().extended(B));
  CHECK(q[0] == doctest::Approx(0.75));
}

TEST_CASE("n-gram uses the last order-1 tokens with add-alpha smoothing") {
  const auto m = load_model_spec(TEXTMAG_MODELS_DIR "/bigram_abc_n4.json");
  // Context "a": counts {1,5,2,2}, alpha 0.5 over 4 slots.
  const auto p = next_token_distribution(m, Text::root().extended(B).extended(A));
  CHECK(p[0] == doctest::Approx(1.5 / 12));
  CHECK(p[1] == doctest::Approx(5.5 / 12));
  CHECK(p[2] == doctest::Approx(2.5 / 12));
  CHECK(p[3] == doctest::Approx(2.5 / 12));
  // Context "<bos>": counts {6,3,1,0}.
  const auto r = next_token_distribution(m, Text::root());
  CHECK(r[3] == doctest::Approx(0.5 / 12));
}

TEST_CASE("n-gram with an unseen context and no smoothing falls back to uniform") {
  const auto m = from_string(R"({"alphabet":["a","b"],"cutoff":3,"model":{"kind":"ngram","order":2,"alpha":0,
      "counts":{"a":{"a":1}}}})");
  const auto p = next_token_distribution(m, Text::root().extended(B));
  for (double v : p.probs()) CHECK(v == doctest::Approx(1.0 / 3));
  CHECK(next_token_distribution(m, Text::root().extended(A))[0] == 1.0);
}

TEST_CASE("next_token_distribution preconditions") {
  const auto m = from_string(R"({"alphabet":["a"],"cutoff":2,"model":{"kind":"uniform"}})");
  CHECK(code_of([&] { next_token_distribution(m, Text::root().extended(Token::eos())); }) ==
        ErrorCode::FinishedText);
  CHECK(code_of([&] { next_token_distribution(m, Text::root().extended(A)); }) == ErrorCode::OverCutoff);
}

TEST_CASE("loader renormalizes small deviations and rejects large ones") {
  LoadDiagnostics diag;
  const auto m = from_string(R"({"alphabet":["a","b"],"cutoff":2,"model":{"kind":"table",
      "default":{"a":0.5000004,"b":0.3,"<eos>":0.2}}})",
                             &diag);
  CHECK(diag.renormalized == 1);
  CHECK(diag.max_deviation == doctest::Approx(4e-7).epsilon(1e-6));
  const auto p = next_token_distribution(m, Text::root());
  double s = 0;
  for (double v : p.probs()) s += v;
  CHECK(std::abs(s - 1.0) < 1e-12);

  CHECK(code_of([] {
          from_string(R"({"alphabet":["a","b"],"cutoff":2,"model":{"kind":"table",
              "default":{"a":0.5,"b":0.1,"<eos>":0.2}}})");
        }) == ErrorCode::BadDistribution);
  CHECK(code_of([] {
          from_string(R"({"alphabet":["a","b"],"cutoff":2,"model":{"kind":"table",
              "default":{"a":1.2,"b":-0.2}}})");
        }) == ErrorCode::BadDistribution);
}

TEST_CASE("loader errors") {
  CHECK(code_of([] { from_string(R"({"alphabet":["a","<bos>"],"cutoff":2,"model":{"kind":"uniform"}})"); }) ==
        ErrorCode::ReservedTokenInAlphabet);
  CHECK(code_of([] { from_string(R"({"alphabet":["a"],"cutoff":0,"model":{"kind":"uniform"}})"); }) ==
        ErrorCode::ParseError);
  CHECK(code_of([] { from_string(R"({"alphabet":["a"],"cutoff":2,"model":{"kind":"lstm"}})"); }) ==
        ErrorCode::ParseError);
  CHECK(code_of([] { from_string(R"({"alphabet":["a"],"cutoff":2})"); }) == ErrorCode::ParseError);
  CHECK(code_of([] {
          from_string(R"({"alphabet":["a"],"cutoff":2,"model":{"kind":"table","default":{"c":1}}})");
        }) == ErrorCode::ParseError);
  CHECK(code_of([] {
          from_string(R"({"alphabet":["a"],"cutoff":2,"model":{"kind":"table","nodes":{"a":{"a":1}}}})");
        }) == ErrorCode::ParseError);
  CHECK(code_of([] { load_model_spec("/nonexistent/model.json"); }) == ErrorCode::ParseError);

  const auto bad = temp_file("broken.json");
  std::ofstream(bad) << "{ not json";
  CHECK(code_of([&] { load_model_spec(bad); }) == ErrorCode::ParseError);
  std::filesystem::remove(bad);
}

TEST_CASE("the meta field is ignored") {
  const auto m = from_string(R"({"alphabet":["a"],"cutoff":2,"model":{"kind":"uniform"},
      "meta":{"model_id":"x","date":"2024-01-01","note":"restricted softmax"}})");
  CHECK(m.alphabet().size() == 1);
}

TEST_CASE("save then load reproduces every distribution") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto m = random_table_model(3, Cutoff(4), seed, 0.2);
    const auto path = temp_file("roundtrip.json");
    save_model_spec(m, path);
    const auto r = load_model_spec(path);
    save_model_spec(r, path);
    const auto rr = load_model_spec(path);
    std::filesystem::remove(path);
    const auto& table = std::get<TableModel>(m.kind());
    for (const auto& [text, dist] : table.nodes) {
      const auto a = next_token_distribution(rr, text);
      for (std::size_t s = 0; s < dist.size(); ++s) CHECK(std::abs(a[s] - dist[s]) <= 1e-12);
    }
  }
  const auto g = load_model_spec(TEXTMAG_MODELS_DIR "/bigram_abc_n4.json");
  const auto back = parse_model_spec(to_json(g));
  const auto x = Text::root().extended(B);
  for (std::size_t s = 0; s < 4; ++s)
    CHECK(next_token_distribution(back, x)[s] == next_token_distribution(g, x)[s]);
}

TEST_CASE("random table models are pmfs and reproducible") {
  const auto m1 = random_table_model(2, Cutoff(4), 7, 0.3);
  const auto m2 = random_table_model(2, Cutoff(4), 7, 0.3);
  const auto& t1 = std::get<TableModel>(m1.kind()).nodes;
  CHECK(t1.size() == 1 + 2 + 4);
  for (const auto& [text, dist] : t1) {
    double s = 0;
    bool positive = false;
    for (double v : dist.probs()) {
      s += v;
      positive = positive || v > 0;
    }
    CHECK(std::abs(s - 1) < 1e-12);
    CHECK(positive);
    const auto other = next_token_distribution(m2, text);
    for (std::size_t i = 0; i < dist.size(); ++i) CHECK(other[i] == dist[i]);
  }
}

TEST_CASE("a ModelSpec can be queried from many threads") {
  const auto m = load_model_spec(TEXTMAG_MODELS_DIR "/bigram_abc_n4.json");
  const auto x = Text::root().extended(A).extended(B);
  const auto expected = next_token_distribution(m, x);
  std::vector<int> ok(8, 1);
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < ok.size(); ++i)
    pool.emplace_back([&, i] {
      for (int rep = 0; rep < 2000; ++rep) {
        const auto p = next_token_distribution(m, x);
        for (std::size_t s = 0; s < p.size(); ++s)
          if (p[s] != expected[s]) ok[i] = 0;
      }
    });
  for (auto& t : pool) t.join();
  for (int v : ok) CHECK(v == 1);
}

TEST_CASE("NextTokenDistribution checks its masses") {
  CHECK(code_of([] { NextTokenDistribution({0.5, 0.4}); }) == ErrorCode::BadDistribution);
  std::vector<double> m{0.8};
  CHECK(code_of([&] { normalize_masses(m, 1e-6); }) == ErrorCode::BadDistribution);
  std::vector<double> ok{0.25, 0.75};
  CHECK(normalize_masses(ok, 1e-6) == 0.0);
}
