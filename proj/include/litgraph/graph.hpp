#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "litgraph/annotations.hpp"
#include "litgraph/ingest.hpp"
#include "litgraph/kernels.hpp"
#include "litgraph/tagging.hpp"

namespace litgraph::graph {

struct TemporalEdge {
  std::string src;
  std::string dst;
  std::optional<int> year;  // undated edges appear only in the static graph
  double weight = 1.0;
};

/// Timestamped multigraph. Every call to add_edge is one temporal edge
/// instance; static_edges() aggregates instances per endpoint pair.
class TemporalGraph {
 public:
  explicit TemporalGraph(bool directed) : directed_(directed) {}

  /// Records the node; its first-seen year is the earliest year given.
  void add_node(const std::string& id, std::optional<int> year = {});
  /// Throws ValidationError for weights below 1 or self-loops.
  void add_edge(const std::string& src, const std::string& dst, std::optional<int> year, double weight = 1.0);

  bool directed() const noexcept { return directed_; }
  const std::map<std::string, std::optional<int>>& nodes() const noexcept { return nodes_; }
  const std::vector<TemporalEdge>& edges() const noexcept { return edges_; }
  std::size_t dated_edge_count() const;
  std::optional<std::pair<int, int>> year_span() const;

  struct StaticEdge {
    std::string src;
    std::string dst;
    double weight = 0;
    std::size_t instances = 0;
  };
  /// Undirected pairs are keyed with src < dst.
  std::vector<StaticEdge> static_edges() const;

 private:
  bool directed_;
  std::map<std::string, std::optional<int>> nodes_;
  std::vector<TemporalEdge> edges_;
};

/// Citing -> cited edges for every kept publication, timestamped with the
/// citing paper's year.
TemporalGraph build_citation_graph(const ingest::CorpusStore& corpus, const std::set<std::string>& kept);

/// One node per topic; each paper adds a weight-1 instance for every
/// unordered pair of its topics. `only`, when given, restricts the papers.
TemporalGraph build_topics_graph(const ingest::CorpusStore& corpus, const std::set<std::string>* only = nullptr);

enum class WindowMode { tumbling, cumulative };
std::string_view to_string(WindowMode mode) noexcept;

struct SnapshotEdge {
  std::uint32_t src = 0;  // index into WindowSnapshot::nodes
  std::uint32_t dst = 0;
  double weight = 0;
  std::size_t instances = 0;
};

/// Induced subgraph of one window (start_year, end_year].
struct WindowSnapshot {
  WindowMode mode = WindowMode::tumbling;
  int start_year = 0;
  int end_year = 0;
  bool directed = true;
  std::vector<std::string> nodes;   // sorted
  std::vector<SnapshotEdge> edges;  // sorted by (src, dst)
  std::size_t temporal_edge_count = 0;

  std::size_t node_count() const noexcept { return nodes.size(); }
  std::size_t edge_count() const noexcept { return edges.size(); }
  /// Directed: edge_count / node_count (mean out-degree).
  /// Undirected: 2 * edge_count / node_count.
  double avg_degree() const noexcept;
};

struct YearRange {
  int first = 0;
  int last = 0;
};

/// One snapshot per calendar year of `range` (default: the span of dated
/// edges). Tumbling snapshots hold the edges of that year; cumulative ones
/// every edge up to and including it. Nodes are the edge endpoints.
std::vector<WindowSnapshot> window_slices(const TemporalGraph& graph, WindowMode mode,
                                          std::optional<YearRange> range = {});

/// Every node and every edge, dated or not.
WindowSnapshot static_snapshot(const TemporalGraph& graph);

struct HitsOptions {
  int max_iter = 100;
  double tol = 1e-8;
};

struct HitsScores {
  std::map<std::string, double> authority;
  std::map<std::string, double> hub;
  int iterations = 0;
  bool converged = false;
};

/// Mutual-reinforcement iteration from a uniform hub vector:
/// authority = A^T hub, hub = A authority, each scaled to unit Euclidean
/// norm. Converged once no score moves by `tol` or more.
HitsScores hits(const WindowSnapshot& snapshot, HitsOptions options = {},
                const kernels::KernelTable& kernels = kernels::active());

/// Weighted degree (in + out for directed graphs) per node index.
std::vector<double> weighted_degrees(const WindowSnapshot& snapshot);

/// Weighted degree divided by `max_degree`, or by the snapshot's own
/// maximum when not given. A zero maximum yields all zeros.
std::map<std::string, double> degree_centrality(const WindowSnapshot& snapshot,
                                                std::optional<double> max_degree = {},
                                                const kernels::KernelTable& kernels = kernels::active());

/// 100 * (v1 - v0) / v0. Throws LookupError for a missing year and
/// DomainError when v0 is zero (the series emerged rather than grew).
double growth(const std::map<int, double>& series, int y0, int y1);

/// canonical entity -> year -> occurrences, over documents with a year.
using EntitySeries = std::map<std::string, std::map<int, std::size_t>>;
EntitySeries entity_prevalence_series(const std::map<std::string, annotations::AnnotationSet>& corpus,
                                      const ingest::CorpusStore& records, const tagging::AliasTable& aliases);

struct Era {
  std::string name;
  int first_year = 0;
  int last_year = 0;
};

/// Latest snapshot year inside the era; nullopt when none falls in it.
std::optional<int> era_year(const Era& era, const std::vector<int>& years);

void write_counts_csv(const std::filesystem::path& path, const std::vector<WindowSnapshot>& snapshots);
void write_hits_csv(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, HitsScores>>& windows);
void write_degree_csv(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::map<std::string, double>>>& windows);
void write_entity_series_csv(const std::filesystem::path& path, const EntitySeries& series);

}  // namespace litgraph::graph
