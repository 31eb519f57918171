#include "litgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "litgraph/error.hpp"
#include "litgraph/text.hpp"

namespace litgraph::graph {

void TemporalGraph::add_node(const std::string& id, std::optional<int> year) {
  auto [it, inserted] = nodes_.try_emplace(id, year);
  if (!inserted && year && (!it->second || *year < *it->second)) it->second = year;
}

void TemporalGraph::add_edge(const std::string& src, const std::string& dst, std::optional<int> year,
                             double weight) {
  if (!(weight >= 1.0)) throw ValidationError("edge weight must be at least 1");
  if (src == dst) throw ValidationError("self-loop on '" + src + "'");
  add_node(src, year);
  add_node(dst, year);
  if (!directed_ && dst < src) {
    edges_.push_back({dst, src, year, weight});
  } else {
    edges_.push_back({src, dst, year, weight});
  }
}

std::size_t TemporalGraph::dated_edge_count() const {
  return static_cast<std::size_t>(std::count_if(edges_.begin(), edges_.end(), [](const auto& e) { return e.year.has_value(); }));
}

std::optional<std::pair<int, int>> TemporalGraph::year_span() const {
  std::optional<std::pair<int, int>> span;
  for (const auto& e : edges_) {
    if (!e.year) continue;
    if (!span) span = std::pair{*e.year, *e.year};
    span->first = std::min(span->first, *e.year);
    span->second = std::max(span->second, *e.year);
  }
  return span;
}

std::vector<TemporalGraph::StaticEdge> TemporalGraph::static_edges() const {
  std::map<std::pair<std::string, std::string>, StaticEdge> agg;
  for (const auto& e : edges_) {
    auto& s = agg[{e.src, e.dst}];
    s.src = e.src;
    s.dst = e.dst;
    s.weight += e.weight;
    ++s.instances;
  }
  std::vector<StaticEdge> out;
  out.reserve(agg.size());
  for (auto& [key, s] : agg) out.push_back(std::move(s));
  return out;
}

TemporalGraph build_citation_graph(const ingest::CorpusStore& corpus, const std::set<std::string>& kept) {
  TemporalGraph g(true);
  const auto year_of = [&](const std::string& id) -> std::optional<int> {
    const auto* r = corpus.find(id);
    return r ? r->year : std::nullopt;
  };
  for (const auto& id : kept) {
    const auto* record = corpus.find(id);
    if (!record) continue;
    g.add_node(id, record->year);
    for (const auto& ref : record->references) {
      g.add_node(ref, year_of(ref));
      g.add_edge(id, ref, record->year);
    }
  }
  return g;
}

TemporalGraph build_topics_graph(const ingest::CorpusStore& corpus, const std::set<std::string>* only) {
  TemporalGraph g(false);
  for (const auto& [id, record] : corpus.records()) {
    if (only && !only->contains(id)) continue;
    const auto& topics = record.topics;  // sorted, unique
    for (const auto& t : topics) g.add_node(t, record.year);
    for (std::size_t i = 0; i < topics.size(); ++i) {
      for (std::size_t j = i + 1; j < topics.size(); ++j) g.add_edge(topics[i], topics[j], record.year);
    }
  }
  return g;
}

std::string_view to_string(WindowMode mode) noexcept {
  return mode == WindowMode::tumbling ? "tumbling" : "cumulative";
}

double WindowSnapshot::avg_degree() const noexcept {
  if (nodes.empty()) return 0.0;
  const double e = static_cast<double>(edges.size());
  return (directed ? e : 2.0 * e) / static_cast<double>(nodes.size());
}

namespace {

template <typename Pred>
WindowSnapshot make_snapshot(const TemporalGraph& graph, Pred include_edge, bool all_nodes) {
  WindowSnapshot snap;
  snap.directed = graph.directed();

  std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> agg;
  std::set<std::string> nodes;
  if (all_nodes) {
    for (const auto& [id, year] : graph.nodes()) nodes.insert(id);
  }
  for (const auto& e : graph.edges()) {
    if (!include_edge(e)) continue;
    auto& a = agg[{e.src, e.dst}];
    a.first += e.weight;
    ++a.second;
    ++snap.temporal_edge_count;
    nodes.insert(e.src);
    nodes.insert(e.dst);
  }
  snap.nodes.assign(nodes.begin(), nodes.end());
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::uint32_t i = 0; i < snap.nodes.size(); ++i) index.emplace(snap.nodes[i], i);
  snap.edges.reserve(agg.size());
  for (const auto& [key, a] : agg) {
    snap.edges.push_back({index.at(key.first), index.at(key.second), a.first, a.second});
  }
  std::sort(snap.edges.begin(), snap.edges.end(),
            [](const auto& x, const auto& y) { return std::tie(x.src, x.dst) < std::tie(y.src, y.dst); });
  return snap;
}

}  // namespace

std::vector<WindowSnapshot> window_slices(const TemporalGraph& graph, WindowMode mode,
                                          std::optional<YearRange> range) {
  const auto span = graph.year_span();
  if (!range) {
    if (!span) return {};
    range = YearRange{span->first, span->second};
  }
  if (range->last < range->first) throw ConfigError("empty year range");

  // Bucket dated edges by year once; snapshots are then built per window.
  std::vector<WindowSnapshot> out;
  for (int y = range->first; y <= range->last; ++y) {
    WindowSnapshot snap;
    if (mode == WindowMode::tumbling) {
      snap = make_snapshot(graph, [y](const TemporalEdge& e) { return e.year && *e.year == y; }, false);
      snap.start_year = y - 1;
    } else {
      snap = make_snapshot(graph, [y](const TemporalEdge& e) { return e.year && *e.year <= y; }, false);
      snap.start_year = (span ? std::min(span->first, range->first) : range->first) - 1;
    }
    snap.mode = mode;
    snap.end_year = y;
    out.push_back(std::move(snap));
  }
  return out;
}

WindowSnapshot static_snapshot(const TemporalGraph& graph) {
  WindowSnapshot snap = make_snapshot(graph, [](const TemporalEdge&) { return true; }, true);
  snap.mode = WindowMode::cumulative;
  if (const auto span = graph.year_span()) {
    snap.start_year = span->first - 1;
    snap.end_year = span->second;
  }
  return snap;
}

namespace {

struct Csr {
  std::vector<std::uint32_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<double> weight;

  kernels::CsrView view() const { return {row_ptr, col, weight}; }
};

Csr build_csr(std::size_t n, const std::vector<SnapshotEdge>& edges, bool transpose) {
  Csr m;
  m.row_ptr.assign(n + 1, 0);
  for (const auto& e : edges) ++m.row_ptr[(transpose ? e.dst : e.src) + 1];
  for (std::size_t i = 0; i < n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  m.col.resize(edges.size());
  m.weight.resize(edges.size());
  std::vector<std::uint32_t> fill(m.row_ptr.begin(), m.row_ptr.end() - 1);
  for (const auto& e : edges) {
    const std::uint32_t row = transpose ? e.dst : e.src;
    const std::uint32_t k = fill[row]++;
    m.col[k] = transpose ? e.src : e.dst;
    m.weight[k] = e.weight;
  }
  return m;
}

void normalize(std::span<double> v, const kernels::KernelTable& k) {
  const double norm = std::sqrt(k.sum_squares(v));
  if (norm > 0) k.scale(v, 1.0 / norm);
}

}  // namespace

HitsScores hits(const WindowSnapshot& snapshot, HitsOptions options, const kernels::KernelTable& k) {
  if (!snapshot.directed) throw PreconditionError("HITS needs a directed graph");
  HitsScores out;
  const std::size_t n = snapshot.nodes.size();
  if (n == 0) {
    out.converged = true;
    return out;
  }
  const Csr forward = build_csr(n, snapshot.edges, false);
  const Csr backward = build_csr(n, snapshot.edges, true);

  std::vector<double> hub(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> auth(n, 0.0);
  std::vector<double> next_auth(n);
  std::vector<double> next_hub(n);
  for (int it = 1; it <= options.max_iter; ++it) {
    k.spmv(backward.view(), hub, next_auth);
    normalize(next_auth, k);
    k.spmv(forward.view(), next_auth, next_hub);
    normalize(next_hub, k);
    const double delta = std::max(k.max_abs_diff(auth, next_auth), k.max_abs_diff(hub, next_hub));
    auth.swap(next_auth);
    hub.swap(next_hub);
    out.iterations = it;
    if (delta < options.tol) {
      out.converged = true;
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.authority.emplace(snapshot.nodes[i], auth[i]);
    out.hub.emplace(snapshot.nodes[i], hub[i]);
  }
  return out;
}

std::vector<double> weighted_degrees(const WindowSnapshot& snapshot) {
  std::vector<double> deg(snapshot.nodes.size(), 0.0);
  for (const auto& e : snapshot.edges) {
    deg[e.src] += e.weight;
    deg[e.dst] += e.weight;
  }
  return deg;
}

std::map<std::string, double> degree_centrality(const WindowSnapshot& snapshot, std::optional<double> max_degree,
                                                const kernels::KernelTable& k) {
  std::map<std::string, double> out;
  if (snapshot.nodes.empty()) return out;
  const std::vector<double> deg = weighted_degrees(snapshot);
  const double max = max_degree ? *max_degree : k.max_value(deg);
  std::vector<double> score(deg.size(), 0.0);
  if (max > 0) k.divide(deg, max, score);
  for (std::size_t i = 0; i < deg.size(); ++i) out.emplace(snapshot.nodes[i], score[i]);
  return out;
}

double growth(const std::map<int, double>& series, int y0, int y1) {
  const auto a = series.find(y0);
  const auto b = series.find(y1);
  if (a == series.end() || b == series.end()) {
    throw LookupError("growth needs values at " + std::to_string(y0) + " and " + std::to_string(y1));
  }
  if (a->second == 0.0) throw DomainError("emerged: value at " + std::to_string(y0) + " is zero");
  return 100.0 * (b->second - a->second) / a->second;
}

EntitySeries entity_prevalence_series(const std::map<std::string, annotations::AnnotationSet>& corpus,
                                      const ingest::CorpusStore& records, const tagging::AliasTable& aliases) {
  EntitySeries out;
  for (const auto& [id, set] : corpus) {
    const auto* record = records.find(id);
    if (!record || !record->year) continue;
    for (const auto& e : set.entities) ++out[tagging::normalize_entity(e.surface, aliases)][*record->year];
  }
  return out;
}

std::optional<int> era_year(const Era& era, const std::vector<int>& years) {
  std::optional<int> best;
  for (int y : years) {
    if (y >= era.first_year && y <= era.last_year && (!best || y > *best)) best = y;
  }
  return best;
}

void write_counts_csv(const std::filesystem::path& path, const std::vector<WindowSnapshot>& snapshots) {
  std::ostringstream out;
  const bool directed = snapshots.empty() || snapshots.front().directed;
  out << (directed ? "# avg_degree = edge_count / node_count (directed, mean out-degree)\n"
                   : "# avg_degree = 2 * edge_count / node_count (undirected)\n");
  out << "window,node_count,edge_count,avg_degree\n";
  for (const auto& s : snapshots) {
    out << s.end_year << ',' << s.node_count() << ',' << s.edge_count() << ',' << text::format_number(s.avg_degree())
        << '\n';
  }
  text::write_file(path, out.str());
}

void write_hits_csv(const std::filesystem::path& path, const std::vector<std::pair<std::string, HitsScores>>& windows) {
  std::ostringstream out;
  out << "window,node,authority,hub\n";
  for (const auto& [label, scores] : windows) {
    for (const auto& [node, a] : scores.authority) {
      out << label << ',' << text::csv_field(node) << ',' << text::format_number(a) << ','
          << text::format_number(scores.hub.at(node)) << '\n';
    }
  }
  text::write_file(path, out.str());
}

void write_degree_csv(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::map<std::string, double>>>& windows) {
  std::ostringstream out;
  out << "window,node,degree\n";
  for (const auto& [label, scores] : windows) {
    for (const auto& [node, d] : scores) {
      out << label << ',' << text::csv_field(node) << ',' << text::format_number(d) << '\n';
    }
  }
  text::write_file(path, out.str());
}

void write_entity_series_csv(const std::filesystem::path& path, const EntitySeries& series) {
  std::ostringstream out;
  out << "entity,year,count\n";
  for (const auto& [entity, years] : series) {
    for (const auto& [year, count] : years) out << text::csv_field(entity) << ',' << year << ',' << count << '\n';
  }
  text::write_file(path, out.str());
}

}  // namespace litgraph::graph
