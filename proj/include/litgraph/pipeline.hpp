#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "litgraph/density.hpp"
#include "litgraph/graph.hpp"
#include "litgraph/ingest.hpp"
#include "litgraph/tagging.hpp"

namespace litgraph::pipeline {

enum class Normalization { window, global };

/// Declarative pipeline configuration. Relative paths in a config file are
/// resolved against the file's directory.
struct PipelineConfig {
  std::filesystem::path seeds;
  int depth = 1;
  std::filesystem::path cache;
  bool offline = false;
  std::string api_base = "https://api.semanticscholar.org/graph/v1";
  std::string api_key_env = "S2_API_KEY";
  double rate_limit = 1.0;
  std::optional<std::filesystem::path> fulltext_dir;
  std::string pdf_converter;

  std::filesystem::path taxonomy;
  std::filesystem::path gazetteer_aliases;
  std::filesystem::path entity_aliases;
  std::optional<std::filesystem::path> canonical_labels;

  tagging::TaggingMode tagging = tagging::TaggingMode::gazetteer;
  std::optional<std::filesystem::path> import_dir;
  bool export_bio = true;

  double token_pct = 10;
  double dlt_pct = 90;
  double esg_pct = 70;
  std::int64_t token_floor = 100;
  bool count_misc = false;

  bool citation_graph = true;
  bool topics_graph = true;
  graph::WindowMode mode = graph::WindowMode::cumulative;
  bool metric_counts = true;
  bool metric_hits = true;
  bool metric_degree = true;
  Normalization normalization = Normalization::window;
  std::vector<graph::Era> eras;

  std::filesystem::path output;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys and
/// malformed values raise ConfigError.
PipelineConfig parse_config(std::string_view contents, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

/// Applies one `key = value` setting; used for CLI overrides.
void set_option(PipelineConfig& config, const std::string& key, const std::string& value,
                const std::filesystem::path& base_dir = {});

/// Checks required keys and that referenced paths exist. Throws ConfigError.
void validate(const PipelineConfig& config);

/// Canonical text form: one `key = value` line per setting, sorted by key.
std::string canonical_form(const PipelineConfig& config);
std::string config_hash(const PipelineConfig& config);

std::string sha256_hex(std::string_view data);

inline constexpr const char* kStages[] = {"ingest", "tag", "density", "filter", "graphs", "reports"};

struct RunOptions {
  bool resume = false;
  bool dry_run = false;
  std::ostream* log = nullptr;
};

struct StageRecord {
  std::string name;
  std::string status;  // ok | skipped | failed | planned
  std::string input_hash;
  std::vector<std::string> outputs;
  std::string error;
};

struct RunResult {
  bool ok = true;
  std::string config_hash;
  std::vector<StageRecord> stages;
};

/// Ingest stage: expands the seeds through the cache (and the metadata API
/// unless offline) and attaches full texts.
ingest::CorpusStore collect_corpus(const PipelineConfig& config, std::ostream* log = nullptr);

/// Graph stage: builds the requested graphs over `kept`, slices them into
/// windows and writes `<graph>_{counts,hits,degree}.csv` into `out_dir`.
void write_graph_metrics(const PipelineConfig& config, const ingest::CorpusStore& corpus,
                         const std::set<std::string>& kept, const std::filesystem::path& out_dir,
                         std::ostream* log = nullptr);

/// Runs every stage in order and writes `manifest.json` into the output
/// directory. A failing stage stops the run, is recorded in the manifest
/// and leaves earlier artifacts in place.
RunResult run_pipeline(const PipelineConfig& config, const RunOptions& options = {});

}  // namespace litgraph::pipeline
