#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "litgraph/annotations.hpp"
#include "litgraph/error.hpp"
#include "litgraph/text.hpp"
#include "oracles.hpp"

using namespace litgraph;
using annotations::AnnotationSet;
using annotations::EntityAnnotation;

namespace {

const taxonomy::Taxonomy& tax() {
  static const taxonomy::Taxonomy t = taxonomy::Taxonomy::shipped();
  return t;
}

std::vector<std::string> tags(const std::vector<annotations::BioSentence>& sentences) {
  std::vector<std::string> out;
  for (const auto& s : sentences) {
    for (const auto& t : s) out.push_back(t.tag);
  }
  return out;
}

}  // namespace

TEST_CASE("standoff entity lines parse with offsets in code points") {
  const std::string doc = "Zürich uses Proof of Work.";
  const auto set = annotations::parse_standoff("T1\tPoW 12 25\tProof of Work\n", doc, "d");
  REQUIRE(set.entities.size() == 1);
  CHECK(set.entities[0].label == "PoW");
  CHECK(set.entities[0].start == 12);
  CHECK(set.entities[0].end == 25);
  CHECK(set.publication_id == "d");
}

TEST_CASE("non-entity lines are counted and skipped") {
  const std::string doc = "Bitcoin";
  const auto set = annotations::parse_standoff("T1\tBitcoin 0 7\tBitcoin\nA1\tNegated T1\n#1\tAnnotatorNotes T1\tok\n",
                                               doc, "d");
  CHECK(set.entities.size() == 1);
  CHECK(set.ignored_lines == 2);
}

TEST_CASE("standoff errors carry the line number") {
  const std::string doc = "Bitcoin and Ethereum";
  CHECK_THROWS_AS(annotations::parse_standoff("T1\tBitcoin 0 7\tBitcoiN\n", doc, "d"), ParseError);
  CHECK_THROWS_AS(annotations::parse_standoff("T1\tBitcoin 0 70\tBitcoin\n", doc, "d"), ParseError);
  CHECK_THROWS_AS(annotations::parse_standoff("T1\tBitcoin 7 7\t\n", doc, "d"), ParseError);
  CHECK_THROWS_AS(annotations::parse_standoff("T1\tBitcoin 0 3;4 7\tBit coin\n", doc, "d"), ParseError);
  CHECK_THROWS_AS(annotations::parse_standoff("T1\tBitcoin x 7\tBitcoin\n", doc, "d"), ParseError);
  CHECK_THROWS_AS(annotations::parse_standoff("T1 Bitcoin 0 7 Bitcoin\n", doc, "d"), ParseError);
  try {
    annotations::parse_standoff("T1\tBitcoin 0 7\tBitcoin\nT1\tEthereum 12 20\tEthereum\n", doc, "d");
    FAIL("expected duplicate id error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("golden standoff files round-trip byte for byte") {
  for (int i = 1; i <= 10; ++i) {
    const std::string stem = std::string("doc") + (i < 10 ? "0" : "") + std::to_string(i);
    const std::string doc = text::read_file(testing::fixture("standoff/" + stem + ".txt"));
    const std::string ann = text::read_file(testing::fixture("standoff/" + stem + ".ann"));
    CAPTURE(stem);
    CHECK(annotations::serialize_standoff(annotations::parse_standoff(ann, doc, stem)) == ann);
  }
}

TEST_CASE("BIO conversion tags multi-word entities with B then I") {
  const std::string doc = "Bitcoin uses Proof of Work.\nIt consumes electrical energy.";
  const auto set = annotations::parse_standoff(
      "T1\tBitcoin 0 7\tBitcoin\nT2\tPoW 13 26\tProof of Work\nT3\tEnergy_Consumption 40 57\telectrical energy\n", doc,
      "d");
  const auto bio = annotations::to_bio(doc, set, tax());
  REQUIRE(bio.size() == 2);
  CHECK(tags({bio[0]}) == std::vector<std::string>{"B-Blockchain_Name", "O", "B-Consensus", "I-Consensus",
                                                   "I-Consensus", "O"});
  CHECK(tags({bio[1]}) == std::vector<std::string>{"O", "O", "B-ESG", "I-ESG", "O"});
  CHECK(bio[0][5].token == ".");
}

TEST_CASE("BIO output format") {
  const std::string doc = "PoW";
  const auto set = annotations::parse_standoff("T1\tPoW 0 3\tPoW\n", doc, "d");
  std::ostringstream out;
  annotations::write_bio(out, annotations::to_bio(doc, set, tax()), "d");
  CHECK(out.str() == "-DOCSTART-\td\n\nPoW\tB-Consensus\n\n");
}

TEST_CASE("an annotation spanning a newline keeps its sentence together") {
  const std::string doc = "carbon\nemissions rise\nnext";
  AnnotationSet set{"d", {{"T1", "Carbon_Emissions", 0, 16, "carbon\nemissions"}}, 0};
  const auto bio = annotations::to_bio(doc, set, tax());
  REQUIRE(bio.size() == 2);
  CHECK(tags({bio[0]}) == std::vector<std::string>{"B-ESG", "I-ESG", "O"});
}

TEST_CASE("BIO conversion refuses overlapping annotations") {
  const std::string doc = "energy consumption";
  AnnotationSet set{"d", {{"T1", "Energy_Consumption", 0, 18, "energy consumption"},
                          {"T2", "Energy_Consumption", 0, 6, "energy"}}, 0};
  CHECK_THROWS_AS(annotations::to_bio(doc, set, tax()), PreconditionError);
}

TEST_CASE("BIO conversion refuses two annotations inside one token") {
  const std::string doc = "PoW/PoS";
  AnnotationSet set{"d", {{"T1", "PoW", 0, 3, "PoW"}, {"T2", "PoS", 4, 7, "PoS"}}, 0};
  CHECK_THROWS_AS(annotations::to_bio(doc, set, tax()), PreconditionError);
}

TEST_CASE("BIO validity on every fixture conversion") {
  const std::set<std::string> roots(tax().top_level().begin(), tax().top_level().end());
  for (int i = 1; i <= 10; ++i) {
    const std::string stem = std::string("doc") + (i < 10 ? "0" : "") + std::to_string(i);
    const std::string doc = text::read_file(testing::fixture("standoff/" + stem + ".txt"));
    const auto set = annotations::parse_standoff(text::read_file(testing::fixture("standoff/" + stem + ".ann")), doc, stem);
    const auto all = tags(annotations::to_bio(doc, set, tax()));
    std::size_t b = 0;
    std::string prev = "O";
    for (const auto& t : all) {
      if (t.rfind("B-", 0) == 0) ++b;
      if (t.rfind("I-", 0) == 0) CHECK(prev.substr(2) == t.substr(2));
      if (t != "O") CHECK(roots.contains(t.substr(2)));
      prev = t;
    }
    CHECK(b == set.entities.size());
  }
}

TEST_CASE("context-free map flags and fixes inconsistent labels") {
  const auto map = annotations::build_context_free_map({{"Sybil attack", "Sybil_Attack", 1}}, tax());
  CHECK(map.at("sybil attack") == "Security_Privacy");
  std::vector<AnnotationSet> corpus{
      {"doc1", {{"T1", "Consensus", 0, 12, "Sybil attack"}}, 0},
      {"doc2", {{"T1", "Sybil_Attack", 4, 16, "Sybil Attack"}}, 0},
  };
  const auto report = annotations::check_consistency(corpus, map, tax());
  REQUIRE(report.conflicts.size() == 1);
  CHECK(report.conflicts[0].surface == "sybil attack");
  CHECK(report.conflicts[0].counts.size() == 2);
  CHECK(report.conflicts[0].counts.at("Consensus") == 1);
  CHECK(report.conflicts[0].counts.at("Security_Privacy") == 1);

  std::size_t fixes = 0;
  const auto fixed = annotations::apply_canonical_labels(corpus, map, tax(), &fixes);
  CHECK(fixes == 1);
  CHECK(fixed[0].entities[0].label == "Security_Privacy");
  CHECK(fixed[1].entities[0].label == "Sybil_Attack");  // already consistent, left alone
  std::size_t again = 1;
  CHECK(annotations::apply_canonical_labels(fixed, map, tax(), &again) == fixed);
  CHECK(again == 0);
  CHECK(annotations::check_consistency(fixed, map, tax()).conflicts.empty());
}

TEST_CASE("unmapped surfaces with several labels become advisories") {
  std::vector<AnnotationSet> corpus{{"a", {{"T1", "Consensus", 0, 5, "nodes"}, {"T2", "Codebase", 6, 11, "Nodes"}}, 0}};
  const auto report = annotations::check_consistency(corpus, {}, tax());
  CHECK(report.conflicts.empty());
  REQUIRE(report.advisories.size() == 1);
  CHECK(report.advisories[0].surface == "nodes");
}

TEST_CASE("resampling splits the nested example into two copies") {
  const std::string doc = "energy consumption";
  AnnotationSet set{"d", {{"T1", "Energy_Consumption", 0, 18, "energy consumption"},
                          {"T2", "Energy_Consumption", 0, 6, "energy"}}, 0};
  const auto copies = annotations::resample_overlaps(doc, set);
  REQUIRE(copies.size() == 2);
  for (const auto& c : copies) {
    CHECK(c.text == doc);
    CHECK(c.annotations.entities.size() == 1);
    CHECK_NOTHROW(annotations::to_bio(c.text, c.annotations, tax()));
  }
}

TEST_CASE("resampling a non-overlapping set yields the set itself") {
  const std::string doc = "Bitcoin and Ethereum";
  AnnotationSet set{"d", {{"T2", "Ethereum", 12, 20, "Ethereum"}, {"T1", "Bitcoin", 0, 7, "Bitcoin"}}, 0};
  const auto copies = annotations::resample_overlaps(doc, set);
  REQUIRE(copies.size() == 1);
  CHECK(copies[0].annotations.entities == set.entities);
  CHECK(annotations::resample_overlaps(doc, AnnotationSet{"d", {}, 0}).size() == 1);
}

TEST_CASE("resampling conserves annotations on random overlapping sets") {
  std::mt19937 rng(11);
  for (int round = 0; round < 200; ++round) {
    const std::string doc(60, 'x');
    AnnotationSet set{"d", {}, 0};
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    for (int i = 0; i < n; ++i) {
      const std::size_t s = rng() % 55;
      const std::size_t e = s + 1 + rng() % 5;
      set.entities.push_back({"T" + std::to_string(i + 1), "PoW", s, e, doc.substr(s, e - s)});
    }
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (const auto& e : set.entities) spans.emplace_back(e.start, e.end);
    const auto copies = annotations::resample_overlaps(doc, set);
    CHECK(copies.size() == oracle::max_depth(spans));
    std::multiset<std::string> seen;
    for (const auto& c : copies) {
      CHECK_FALSE(annotations::has_overlaps(c.annotations));
      for (const auto& e : c.annotations.entities) seen.insert(e.ann_id);
    }
    std::multiset<std::string> expected;
    for (const auto& e : set.entities) expected.insert(e.ann_id);
    CHECK(seen == expected);
  }
}
