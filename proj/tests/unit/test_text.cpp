#include <doctest.h>

#include <random>
#include <set>

#include "litgraph/error.hpp"
#include "litgraph/text.hpp"

using namespace litgraph;
using text::Span;

TEST_CASE("utf8 decode and encode round-trip multilingual text") {
  const std::string s = "Zürich – Πρωτόκολλο 😀 ledger";
  const std::u32string cps = text::decode_utf8(s);
  CHECK(cps.size() == 28);
  CHECK(text::encode_utf8(cps) == s);
}

TEST_CASE("invalid utf8 is rejected") {
  CHECK_THROWS_AS(text::decode_utf8("\xC3"), ParseError);
  CHECK_THROWS_AS(text::decode_utf8("\xC3\x28"), ParseError);
  CHECK_THROWS_AS(text::decode_utf8("\xC0\xAF"), ParseError);     // overlong
  CHECK_THROWS_AS(text::decode_utf8("\xED\xA0\x80"), ParseError); // surrogate
  CHECK_THROWS_AS(text::decode_utf8("\xFF"), ParseError);
}

TEST_CASE("surface normalization collides spelling variants") {
  CHECK(text::normalize_surface("Proof-of-Work") == "proof of work");
  CHECK(text::normalize_surface("proof  of\twork") == "proof of work");
  CHECK(text::normalize_surface("PROOF_OF_WORK") == "proof of work");
  CHECK(text::normalize_surface("( PoW )") == "pow");
  CHECK(text::normalize_surface("“finality”,") == "finality");
  CHECK(text::normalize_surface("51% attack") == "51% attack");
  CHECK(text::normalize_surface("ÉNERGIE") == "énergie");
  CHECK(text::normalize_surface("...") == "");
}

TEST_CASE("normalization is idempotent") {
  for (const char* s : {"Proof-of-Work", "  Sybil   Attack. ", "(PoS)", "e-waste", "Zürich’s"}) {
    const std::string once = text::normalize_surface(s);
    CHECK(text::normalize_surface(once) == once);
  }
}

TEST_CASE("word tokens split on whitespace and joiners and trim punctuation") {
  const std::u32string t = text::decode_utf8("Proof-of-Work, (PoS) and 51% attack.");
  const auto toks = text::word_tokens(t);
  std::vector<std::string> words;
  for (const auto& sp : toks) words.push_back(text::encode_utf8(t.substr(sp.begin, sp.end - sp.begin)));
  CHECK(words == std::vector<std::string>{"Proof", "of", "Work", "PoS", "and", "51", "attack"});
}

TEST_CASE("bio tokens keep punctuation as separate tokens") {
  const std::u32string t = text::decode_utf8("(PoS) uses Proof-of-Stake.");
  std::vector<std::string> words;
  for (const auto& sp : text::bio_tokens(t)) words.push_back(text::encode_utf8(t.substr(sp.begin, sp.end - sp.begin)));
  CHECK(words == std::vector<std::string>{"(", "PoS", ")", "uses", "Proof", "-", "of", "-", "Stake", "."});
}

TEST_CASE("every word token boundary is a bio token boundary") {
  std::mt19937 rng(7);
  const std::u32string alphabet = U"ab -_.,()\n–é";
  for (int round = 0; round < 500; ++round) {
    std::u32string t;
    const int len = std::uniform_int_distribution<int>(0, 40)(rng);
    for (int i = 0; i < len; ++i) t.push_back(alphabet[rng() % alphabet.size()]);
    std::set<std::size_t> starts, ends;
    for (const auto& sp : text::bio_tokens(t)) {
      starts.insert(sp.begin);
      ends.insert(sp.end);
      CHECK(sp.begin < sp.end);
    }
    for (const auto& sp : text::word_tokens(t)) {
      CHECK(starts.contains(sp.begin));
      CHECK(ends.contains(sp.end));
    }
  }
}

TEST_CASE("file stems round-trip arbitrary ids") {
  for (const std::string id : {"P01", "DOI:10.1145/3292500.3330701", "arXiv:2401.00001", ".hidden", "a b%c", "ü"}) {
    const std::string stem = text::file_stem(id);
    CHECK(stem.find('/') == std::string::npos);
    CHECK(stem.front() != '.');
    CHECK(text::from_file_stem(stem) == id);
  }
}

TEST_CASE("two-column tables") {
  const auto rows = text::parse_two_column("# comment\nproof of work\tPoW\n\n  btc \t Bitcoin \n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].key == "proof of work");
  CHECK(rows[1].key == "btc");
  CHECK(rows[1].value == "Bitcoin");
  CHECK(rows[1].line == 4);
  CHECK_THROWS_AS(text::parse_two_column("no tab here\n"), ParseError);
  CHECK_THROWS_AS(text::parse_two_column("\tPoW\n"), ParseError);
}

TEST_CASE("csv quoting and number formatting") {
  CHECK(text::csv_field("plain") == "plain");
  CHECK(text::csv_field("a,b") == "\"a,b\"");
  CHECK(text::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(text::format_number(0.0) == "0");
  CHECK(text::format_number(-0.0) == "0");
  CHECK(text::format_number(1.0) == "1");
  CHECK(text::format_number(1.0 / 3.0) == "0.3333333333");
}
