#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "litgraph/density.hpp"
#include "litgraph/error.hpp"
#include "litgraph/text.hpp"
#include "oracles.hpp"

using namespace litgraph;
using density::Density;
using density::DensityReport;

namespace {

const taxonomy::Taxonomy& tax() {
  static const taxonomy::Taxonomy t = taxonomy::Taxonomy::shipped();
  return t;
}

std::vector<DensityReport> random_corpus(std::mt19937& rng, int n) {
  std::vector<DensityReport> out;
  for (int i = 0; i < n; ++i) {
    const std::int64_t tokens = std::uniform_int_distribution<std::int64_t>(1, 3000)(rng);
    const std::int64_t dlt = std::uniform_int_distribution<std::int64_t>(0, tokens / 5)(rng);
    const std::int64_t esg = std::uniform_int_distribution<std::int64_t>(0, tokens / 8)(rng);
    out.push_back({"d" + std::to_string(i), tokens, dlt, esg});
  }
  return out;
}

}  // namespace

TEST_CASE("content density examples") {
  CHECK(density::content_density(12, 3, 1000) == Density(3, 200));
  CHECK(density::content_density(0, 0, 500) == Density(0));
  CHECK(density::content_density(5, 5, 10) == Density(1));
  CHECK_THROWS_AS(density::content_density(1, 0, 0), DomainError);
  CHECK_THROWS_AS(density::content_density(-1, 0, 10), DomainError);
}

TEST_CASE("report densities split by category") {
  const DensityReport r{"x", 1000, 12, 3};
  CHECK(r.dlt() == Density(12, 1000));
  CHECK(r.esg() == Density(3, 1000));
  CHECK(r.combined() == Density(15, 1000));
}

TEST_CASE("reports count entities by pruned category") {
  const std::string text = "Bitcoin uses Proof of Work and energy plus a protocol upgrade";
  annotations::AnnotationSet set{"x", {{"T1", "Bitcoin", 0, 7, "Bitcoin"},
                                       {"T2", "PoW", 13, 26, "Proof of Work"},
                                       {"T3", "Energy_Consumption", 31, 37, "energy"},
                                       {"T4", "Misc_Term", 45, 61, "protocol upgrade"}}, 0};
  const auto r = density::make_report("x", text, set, tax());
  CHECK(r.n_tokens == 11);
  CHECK(r.n_dlt == 2);
  CHECK(r.n_esg == 1);
  CHECK(density::make_report("x", text, set, tax(), {true}).n_dlt == 3);
  CHECK_THROWS_AS(density::make_report("x", " .. ", {"x", {}, 0}, tax()), DomainError);
}

TEST_CASE("density equals an independent fraction for random documents") {
  std::mt19937 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t tokens = std::uniform_int_distribution<std::int64_t>(1, 100000)(rng);
    const std::int64_t dlt = std::uniform_int_distribution<std::int64_t>(0, tokens)(rng);
    const std::int64_t esg = std::uniform_int_distribution<std::int64_t>(0, tokens)(rng);
    const auto [num, den] = oracle::density(dlt, esg, tokens);
    const Density d = density::content_density(dlt, esg, tokens);
    CHECK(d.numerator() == num);
    CHECK(d.denominator() == den);
  }
}

TEST_CASE("percentile uses linear interpolation") {
  const std::vector<double> v{10, 20, 30, 40, 50};
  CHECK(density::percentile(v, 0) == 10);
  CHECK(density::percentile(v, 100) == 50);
  CHECK(density::percentile(v, 50) == 30);
  CHECK(density::percentile(v, 10) == doctest::Approx(14));
  CHECK(density::percentile(std::vector<double>{7}, 90) == 7);
  CHECK_THROWS_AS(density::percentile(std::vector<double>{}, 10), DomainError);
  CHECK_THROWS_AS(density::percentile(v, 101), DomainError);
}

TEST_CASE("token floor drops short documents") {
  std::vector<DensityReport> reports;
  for (int i = 0; i < 10; ++i) reports.push_back({"d" + std::to_string(i), 50 + 100 * i, 0, 0});
  density::FilterConfig cfg;
  cfg.dlt_pct = 0;  // keep every positive density
  const auto f = density::filter_corpus(reports, cfg);
  REQUIRE(f.stages.size() == 3);
  CHECK(f.stages[0].stage == "token_floor");
  CHECK(f.stages[0].input == 10);
  CHECK(f.stages[0].retained == 9);  // d0 has 50 tokens, below both floors
  CHECK(*f.stages[0].threshold == doctest::Approx(140));
}

TEST_CASE("strictly-above comparisons exclude ties at the threshold") {
  std::vector<DensityReport> reports;
  for (int i = 0; i < 10; ++i) reports.push_back({"d" + std::to_string(i), 1000, 10, 10});
  const auto f = density::filter_corpus(reports, {});
  CHECK(f.kept.empty());
  CHECK(f.stages[1].retained == 0);
  CHECK_FALSE(f.stages[2].threshold.has_value());
}

TEST_CASE("seeds survive filtering") {
  std::vector<DensityReport> reports;
  for (int i = 0; i < 20; ++i) reports.push_back({"d" + std::to_string(i), 1000 + i, i, 20 - i});
  density::FilterConfig cfg;
  cfg.seeds = {"d0", "d1", "missing"};
  const auto f = density::filter_corpus(reports, cfg);
  CHECK(f.kept.contains("d0"));
  CHECK(f.kept.contains("d1"));
  CHECK_FALSE(f.kept.contains("missing"));
  CHECK(f.absent_seeds == std::vector<std::string>{"missing"});
}

TEST_CASE("filter matches the brute-force oracle on random corpora") {
  std::mt19937 rng(5);
  for (int round = 0; round < 100; ++round) {
    const auto reports = random_corpus(rng, std::uniform_int_distribution<int>(1, 120)(rng));
    density::FilterConfig cfg;
    cfg.token_floor_pct = std::uniform_real_distribution<double>(0, 50)(rng);
    cfg.dlt_pct = std::uniform_real_distribution<double>(0, 100)(rng);
    cfg.esg_pct = std::uniform_real_distribution<double>(0, 100)(rng);
    cfg.token_abs_floor = std::uniform_int_distribution<std::int64_t>(0, 500)(rng);
    for (const auto& r : reports) {
      if (rng() % 10 == 0) cfg.seeds.insert(r.publication_id);
    }
    std::vector<oracle::Doc> docs;
    for (const auto& r : reports) docs.push_back({r.publication_id, r.n_tokens, r.n_dlt, r.n_esg});
    const auto expected =
        oracle::filter(docs, cfg.seeds, cfg.token_floor_pct, cfg.dlt_pct, cfg.esg_pct, cfg.token_abs_floor);
    const auto got = density::filter_corpus(reports, cfg);
    CHECK(got.kept == expected);
    for (const auto& s : got.stages) CHECK(s.input == s.excluded + s.retained);
    CHECK(got.stages[1].input == got.stages[0].retained);
    CHECK(got.stages[2].input == got.stages[1].retained);
  }
}

TEST_CASE("filter rejects duplicate ids and empty input") {
  const std::vector<DensityReport> dup{{"a", 10, 1, 1}, {"a", 20, 1, 1}};
  CHECK_THROWS_AS(density::filter_corpus(dup, {}), ValidationError);
  CHECK_THROWS_AS(density::filter_corpus(std::vector<DensityReport>{}, {}), DomainError);
}

TEST_CASE("density CSV round-trips counts exactly") {
  testing::TempDir dir("density");
  std::mt19937 rng(9);
  const auto reports = random_corpus(rng, 30);
  density::write_reports_csv(dir / "d.csv", reports);
  CHECK(density::read_reports_csv(dir / "d.csv") == reports);
  const std::string csv = text::read_file(dir / "d.csv");
  CHECK(csv.rfind("id,n_tokens,n_dlt,n_esg,d_dlt,d_esg,d_combined\n", 0) == 0);
}

TEST_CASE("exact decimal rendering of densities") {
  CHECK(density::format_density(Density(1, 3)) == "0.3333333333");
  CHECK(density::format_density(Density(2, 3)) == "0.6666666667");
  CHECK(density::format_density(Density(0)) == "0.0000000000");
  CHECK(density::format_density(Density(1)) == "1.0000000000");
  CHECK(density::format_density(Density(1, 20000000000LL)) == "0.0000000001");  // half rounds up
}

TEST_CASE("filtered id lists round-trip") {
  testing::TempDir dir("ids");
  density::FilteredCorpus f;
  f.kept = {"b", "a", "c"};
  density::write_filtered(dir / "k.txt", f);
  CHECK(text::read_file(dir / "k.txt") == "a\nb\nc\n");
  CHECK(density::read_id_list(dir / "k.txt") == f.kept);
}
