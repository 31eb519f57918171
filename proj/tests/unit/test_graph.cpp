#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "litgraph/error.hpp"
#include "litgraph/graph.hpp"
#include "litgraph/text.hpp"
#include "oracles.hpp"

using namespace litgraph;
using graph::TemporalGraph;
using graph::WindowMode;

namespace {

ingest::PublicationRecord rec(std::string id, std::optional<int> year, std::vector<std::string> refs,
                              std::vector<std::string> topics = {}) {
  ingest::PublicationRecord r;
  r.id = std::move(id);
  r.year = year;
  r.references = std::move(refs);
  r.topics = std::move(topics);
  return r;
}

/// Six papers, eight citations.
ingest::CorpusStore six_papers() {
  ingest::CorpusStore s;
  s.put_record(rec("A", 2018, {}));
  s.put_record(rec("B", 2019, {"A"}));
  s.put_record(rec("C", 2019, {"A", "B"}));
  s.put_record(rec("D", 2020, {"A", "C"}));
  s.put_record(rec("E", 2020, {"B", "D"}));
  s.put_record(rec("F", 2021, {"E"}));
  return s;
}

std::set<std::string> all_ids(const ingest::CorpusStore& s) {
  std::set<std::string> out;
  for (const auto& [id, r] : s.records()) out.insert(id);
  return out;
}

TemporalGraph random_temporal(std::mt19937& rng, int nodes, int edges, bool directed) {
  TemporalGraph g(directed);
  for (int i = 0; i < edges; ++i) {
    const int a = static_cast<int>(rng() % nodes);
    int b = static_cast<int>(rng() % nodes);
    if (a == b) b = (b + 1) % nodes;
    const std::optional<int> year =
        rng() % 10 == 0 ? std::nullopt : std::optional<int>(2000 + static_cast<int>(rng() % 15));
    g.add_edge("n" + std::to_string(a), "n" + std::to_string(b), year);
  }
  return g;
}

}  // namespace

TEST_CASE("citation graph counts match the hand enumeration") {
  const auto corpus = six_papers();
  const TemporalGraph g = graph::build_citation_graph(corpus, all_ids(corpus));
  CHECK(g.nodes().size() == 6);
  CHECK(g.edges().size() == 8);
  const auto tumbling = graph::window_slices(g, WindowMode::tumbling);
  REQUIRE(tumbling.size() == 3);  // 2019, 2020, 2021
  CHECK(tumbling[0].end_year == 2019);
  CHECK(tumbling[0].edge_count() == 3);
  CHECK(tumbling[0].node_count() == 3);
  CHECK(tumbling[1].edge_count() == 4);
  CHECK(tumbling[1].node_count() == 5);
  CHECK(tumbling[2].edge_count() == 1);
  const auto cumulative = graph::window_slices(g, WindowMode::cumulative);
  CHECK(cumulative[2].edge_count() == 8);
  CHECK(cumulative[2].node_count() == 6);
  CHECK(cumulative[2].avg_degree() == doctest::Approx(8.0 / 6.0));
}

TEST_CASE("citation graph uses kept papers as citing side only") {
  const auto corpus = six_papers();
  const TemporalGraph g = graph::build_citation_graph(corpus, {"E"});
  CHECK(g.edges().size() == 2);
  CHECK(g.nodes().size() == 3);
  CHECK(g.nodes().at("B") == 2019);  // cited node keeps its own year
}

TEST_CASE("undated papers only reach the static graph") {
  ingest::CorpusStore s;
  s.put_record(rec("A", 2020, {}));
  s.put_record(rec("B", std::nullopt, {"A"}));
  const TemporalGraph g = graph::build_citation_graph(s, all_ids(s));
  CHECK(g.dated_edge_count() == 0);
  CHECK(graph::window_slices(g, WindowMode::tumbling).empty());
  CHECK(graph::static_snapshot(g).edge_count() == 1);
}

TEST_CASE("topic graph links every pair of a paper's topics") {
  ingest::CorpusStore s;
  s.put_record(rec("A", 2020, {}, {"CS", "Econ", "Env"}));
  s.put_record(rec("B", 2021, {}, {"CS", "Econ"}));
  const TemporalGraph g = graph::build_topics_graph(s);
  CHECK_FALSE(g.directed());
  CHECK(g.edges().size() == 4);
  const auto edges = g.static_edges();
  REQUIRE(edges.size() == 3);
  CHECK(edges[0].src == "CS");
  CHECK(edges[0].dst == "Econ");
  CHECK(edges[0].weight == 2);
  CHECK(edges[0].instances == 2);
  const auto snap = graph::static_snapshot(g);
  CHECK(snap.avg_degree() == doctest::Approx(2.0));
  CHECK_THROWS_AS(graph::hits(snap), PreconditionError);
}

TEST_CASE("edges validate weight and endpoints") {
  TemporalGraph g(true);
  CHECK_THROWS_AS(g.add_edge("a", "a", 2020), ValidationError);
  CHECK_THROWS_AS(g.add_edge("a", "b", 2020, 0.5), ValidationError);
  g.add_node("a", 2021);
  g.add_node("a", 2019);
  CHECK(g.nodes().at("a") == 2019);
}

TEST_CASE("tumbling windows partition dated edges and cumulative ones grow") {
  std::mt19937 rng(21);
  for (int round = 0; round < 20; ++round) {
    const TemporalGraph g = random_temporal(rng, 30, 200, round % 2 == 0);
    const auto tumbling = graph::window_slices(g, WindowMode::tumbling);
    std::size_t total = 0;
    for (const auto& w : tumbling) total += w.temporal_edge_count;
    CHECK(total == g.dated_edge_count());
    const auto cumulative = graph::window_slices(g, WindowMode::cumulative);
    REQUIRE(cumulative.size() == tumbling.size());
    for (std::size_t i = 1; i < cumulative.size(); ++i) {
      CHECK(cumulative[i].node_count() >= cumulative[i - 1].node_count());
      CHECK(cumulative[i].edge_count() >= cumulative[i - 1].edge_count());
      CHECK(cumulative[i].temporal_edge_count >= cumulative[i - 1].temporal_edge_count);
    }
    CHECK(cumulative.back().temporal_edge_count == g.dated_edge_count());
  }
}

TEST_CASE("HITS on two citations of one paper") {
  TemporalGraph g(true);
  g.add_edge("A", "B", 2020);
  g.add_edge("C", "B", 2020);
  const auto s = graph::hits(graph::static_snapshot(g));
  CHECK(s.converged);
  CHECK(s.authority.at("B") == doctest::Approx(1.0));
  CHECK(s.authority.at("A") == doctest::Approx(0.0));
  CHECK(s.authority.at("C") == doctest::Approx(0.0));
  CHECK(s.hub.at("A") == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(s.hub.at("C") == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(s.hub.at("B") == doctest::Approx(0.0));
}

TEST_CASE("HITS on an empty snapshot") {
  const auto s = graph::hits(graph::WindowSnapshot{});
  CHECK(s.converged);
  CHECK(s.iterations == 0);
  CHECK(s.authority.empty());
}

TEST_CASE("HITS agrees with a dense power iteration") {
  std::mt19937 rng(33);
  for (int round = 0; round < 5; ++round) {
    const int n = 40;
    std::vector<std::vector<double>> adj(n, std::vector<double>(n, 0.0));
    TemporalGraph g(true);
    for (int i = 0; i < n; ++i) g.add_node("n" + std::to_string(100 + i));
    for (int k = 0; k < 160; ++k) {
      const int a = static_cast<int>(rng() % n);
      const int b = static_cast<int>(rng() % n);
      if (a == b) continue;
      g.add_edge("n" + std::to_string(100 + a), "n" + std::to_string(100 + b), 2020);
      adj[a][b] += 1.0;
    }
    const auto snap = graph::static_snapshot(g);
    const auto got = graph::hits(snap, {1000, 1e-12});
    const auto want = oracle::hits(adj);
    CHECK(got.converged);
    for (int i = 0; i < n; ++i) {
      const std::string id = "n" + std::to_string(100 + i);
      CHECK(std::fabs(got.authority.at(id) - want.authority[i]) < 1e-6);
      CHECK(std::fabs(got.hub.at(id) - want.hub[i]) < 1e-6);
    }
  }
}

TEST_CASE("degree centrality normalizes by the window maximum") {
  TemporalGraph g(true);
  g.add_edge("A", "B", 2020);
  g.add_edge("C", "B", 2020);
  g.add_edge("C", "B", 2020);
  g.add_edge("B", "D", 2020);
  const auto c = graph::degree_centrality(graph::static_snapshot(g));
  CHECK(c.at("B") == 1.0);
  CHECK(c.at("C") == doctest::Approx(0.5));
  CHECK(c.at("A") == doctest::Approx(0.25));
  const auto global = graph::degree_centrality(graph::static_snapshot(g), 8.0);
  CHECK(global.at("B") == doctest::Approx(0.5));
}

TEST_CASE("an isolated node has centrality zero") {
  TemporalGraph g(false);
  g.add_node("lonely", 2020);
  const auto c = graph::degree_centrality(graph::static_snapshot(g));
  CHECK(c.at("lonely") == 0.0);
}

TEST_CASE("growth reproduces reported percentages from rounded centralities") {
  const auto pct = [](double a, double b) { return graph::growth({{2015, a}, {2022, b}}, 2015, 2022); };
  CHECK(pct(0.056, 1.0) == doctest::Approx(1685.714285714).epsilon(1e-9));
  CHECK(std::fabs(pct(0.056, 1.0) - 1692.42) / 1692.42 < 0.05);
  CHECK(std::fabs(pct(0.088, 0.419) - 376.64) / 376.64 < 0.05);
  CHECK(std::fabs(pct(0.011, 0.472) - 4299.04) / 4299.04 < 0.05);
  CHECK(std::fabs(pct(0.017, 0.152) - 768.68) / 768.68 < 0.05);
}

TEST_CASE("growth edge cases") {
  const std::map<int, double> s{{2019, 0.0}, {2020, 0.5}, {2021, 0.25}};
  CHECK(graph::growth(s, 2020, 2020) == 0.0);
  CHECK(graph::growth(s, 2020, 2021) == doctest::Approx(-50.0));
  CHECK_THROWS_AS(graph::growth(s, 2019, 2020), DomainError);
  CHECK_THROWS_AS(graph::growth(s, 2018, 2020), LookupError);
}

TEST_CASE("entity prevalence counts canonical entities per year") {
  ingest::CorpusStore s;
  s.put_record(rec("a", 2020, {}));
  s.put_record(rec("b", 2021, {}));
  s.put_record(rec("c", std::nullopt, {}));
  std::map<std::string, annotations::AnnotationSet> sets{
      {"a", {"a", {{"T1", "PoW", 0, 3, "PoW"}, {"T2", "PoW", 4, 17, "Proof-of-Work"}}, 0}},
      {"b", {"b", {{"T1", "PoW", 0, 13, "proof of work"}}, 0}},
      {"c", {"c", {{"T1", "PoW", 0, 3, "PoW"}}, 0}},
  };
  const auto aliases = tagging::AliasTable::load(taxonomy::data_path("entity_aliases.txt"));
  const auto series = graph::entity_prevalence_series(sets, s, aliases);
  REQUIRE(series.size() == 1);
  CHECK(series.at("PoW").at(2020) == 2);
  CHECK(series.at("PoW").at(2021) == 1);
  CHECK(series.at("PoW").size() == 2);
}

TEST_CASE("era year is the last snapshot inside the era") {
  const std::vector<int> years{2016, 2017, 2018, 2020};
  CHECK(graph::era_year({"late", 2015, 2019}, years) == 2018);
  CHECK(graph::era_year({"now", 2020, 2029}, years) == 2020);
  CHECK_FALSE(graph::era_year({"gap", 2019, 2019}, years).has_value());
}

TEST_CASE("metric CSVs are written with documented headers") {
  testing::TempDir dir("csv");
  const auto corpus = six_papers();
  const TemporalGraph g = graph::build_citation_graph(corpus, all_ids(corpus));
  const auto windows = graph::window_slices(g, WindowMode::cumulative);
  graph::write_counts_csv(dir / "counts.csv", windows);
  const std::string counts = text::read_file(dir / "counts.csv");
  CHECK(counts.rfind("# avg_degree = edge_count / node_count", 0) == 0);
  CHECK(counts.find("window,node_count,edge_count,avg_degree\n2019,3,3,1\n") != std::string::npos);
  std::vector<std::pair<std::string, graph::HitsScores>> rows;
  for (const auto& w : windows) rows.emplace_back(std::to_string(w.end_year), graph::hits(w));
  graph::write_hits_csv(dir / "hits.csv", rows);
  CHECK(text::read_file(dir / "hits.csv").rfind("window,node,authority,hub\n", 0) == 0);
}
