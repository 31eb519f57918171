#include "litgraph/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "litgraph/annotations.hpp"
#include "litgraph/error.hpp"
#include "litgraph/ingest.hpp"
#include "litgraph/kernels.hpp"
#include "litgraph/taxonomy.hpp"
#include "litgraph/text.hpp"

namespace litgraph::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T value{};
  in >> value;
  if (!in || !in.eof()) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return value;
}

double parse_pct(const std::string& key, const std::string& v) {
  const double p = parse_number<double>(key, v);
  if (!(p >= 0 && p <= 100)) throw ConfigError("'" + key + "' must lie in [0, 100]");
  return p;
}

fs::path resolve(const fs::path& base, const std::string& v) {
  fs::path p(v);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = text::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

std::string mode_name(tagging::TaggingMode m) {
  switch (m) {
    case tagging::TaggingMode::gazetteer: return "gazetteer";
    case tagging::TaggingMode::import: return "import";
    case tagging::TaggingMode::hybrid: return "hybrid";
  }
  return "gazetteer";
}

std::string num(double v) { return text::format_number(v); }

std::map<std::string, std::string> entries(const PipelineConfig& c) {
  std::map<std::string, std::string> e;
  e["seeds"] = c.seeds.string();
  e["depth"] = std::to_string(c.depth);
  e["cache"] = c.cache.string();
  e["offline"] = c.offline ? "true" : "false";
  e["api_base"] = c.api_base;
  e["api_key_env"] = c.api_key_env;
  e["rate_limit"] = num(c.rate_limit);
  e["fulltext_dir"] = c.fulltext_dir ? c.fulltext_dir->string() : "";
  e["pdf_converter"] = c.pdf_converter;
  e["taxonomy"] = c.taxonomy.string();
  e["gazetteer_aliases"] = c.gazetteer_aliases.string();
  e["entity_aliases"] = c.entity_aliases.string();
  e["canonical_labels"] = c.canonical_labels ? c.canonical_labels->string() : "none";
  e["tagging"] = mode_name(c.tagging);
  e["import_dir"] = c.import_dir ? c.import_dir->string() : "";
  e["export_bio"] = c.export_bio ? "true" : "false";
  e["filter.token_pct"] = num(c.token_pct);
  e["filter.dlt_pct"] = num(c.dlt_pct);
  e["filter.esg_pct"] = num(c.esg_pct);
  e["filter.token_floor"] = std::to_string(c.token_floor);
  e["filter.count_misc"] = c.count_misc ? "true" : "false";
  std::vector<std::string> graphs;
  if (c.citation_graph) graphs.emplace_back("citation");
  if (c.topics_graph) graphs.emplace_back("topics");
  e["graphs"] = join(graphs);
  e["mode"] = std::string(graph::to_string(c.mode));
  std::vector<std::string> metrics;
  if (c.metric_counts) metrics.emplace_back("counts");
  if (c.metric_degree) metrics.emplace_back("degree");
  if (c.metric_hits) metrics.emplace_back("hits");
  e["metrics"] = join(metrics);
  e["normalization"] = c.normalization == Normalization::window ? "window" : "global";
  for (const auto& era : c.eras) {
    e["era." + era.name] = std::to_string(era.first_year) + "-" + std::to_string(era.last_year);
  }
  e["output"] = c.output.string();
  return e;
}

}  // namespace

void set_option(PipelineConfig& c, const std::string& key, const std::string& value, const fs::path& base) {
  const std::string& v = value;
  if (key == "seeds") {
    c.seeds = resolve(base, v);
  } else if (key == "depth") {
    c.depth = parse_number<int>(key, v);
  } else if (key == "cache") {
    c.cache = resolve(base, v);
  } else if (key == "offline") {
    c.offline = parse_bool(key, v);
  } else if (key == "api_base") {
    c.api_base = v;
  } else if (key == "api_key_env") {
    c.api_key_env = v;
  } else if (key == "rate_limit") {
    c.rate_limit = parse_number<double>(key, v);
  } else if (key == "fulltext_dir") {
    c.fulltext_dir = v.empty() ? std::nullopt : std::optional(resolve(base, v));
  } else if (key == "pdf_converter") {
    c.pdf_converter = v;
  } else if (key == "taxonomy") {
    c.taxonomy = resolve(base, v);
  } else if (key == "gazetteer_aliases") {
    c.gazetteer_aliases = resolve(base, v);
  } else if (key == "entity_aliases") {
    c.entity_aliases = resolve(base, v);
  } else if (key == "canonical_labels") {
    c.canonical_labels = v == "none" || v.empty() ? std::nullopt : std::optional(resolve(base, v));
  } else if (key == "tagging") {
    if (v == "gazetteer") {
      c.tagging = tagging::TaggingMode::gazetteer;
    } else if (v == "import") {
      c.tagging = tagging::TaggingMode::import;
    } else if (v == "hybrid") {
      c.tagging = tagging::TaggingMode::hybrid;
    } else {
      throw ConfigError("'tagging' expects gazetteer, import or hybrid, got '" + v + "'");
    }
  } else if (key == "import_dir") {
    c.import_dir = v.empty() ? std::nullopt : std::optional(resolve(base, v));
  } else if (key == "export_bio") {
    c.export_bio = parse_bool(key, v);
  } else if (key == "filter.token_pct") {
    c.token_pct = parse_pct(key, v);
  } else if (key == "filter.dlt_pct") {
    c.dlt_pct = parse_pct(key, v);
  } else if (key == "filter.esg_pct") {
    c.esg_pct = parse_pct(key, v);
  } else if (key == "filter.token_floor") {
    c.token_floor = parse_number<std::int64_t>(key, v);
  } else if (key == "filter.count_misc") {
    c.count_misc = parse_bool(key, v);
  } else if (key == "graphs") {
    c.citation_graph = c.topics_graph = false;
    for (const auto& g : split_list(v)) {
      if (g == "citation") {
        c.citation_graph = true;
      } else if (g == "topics") {
        c.topics_graph = true;
      } else {
        throw ConfigError("unknown graph '" + g + "'");
      }
    }
  } else if (key == "mode") {
    if (v == "tumbling") {
      c.mode = graph::WindowMode::tumbling;
    } else if (v == "cumulative") {
      c.mode = graph::WindowMode::cumulative;
    } else {
      throw ConfigError("'mode' expects tumbling or cumulative, got '" + v + "'");
    }
  } else if (key == "metrics") {
    c.metric_counts = c.metric_hits = c.metric_degree = false;
    for (const auto& m : split_list(v)) {
      if (m == "counts") {
        c.metric_counts = true;
      } else if (m == "hits") {
        c.metric_hits = true;
      } else if (m == "degree") {
        c.metric_degree = true;
      } else {
        throw ConfigError("unknown metric '" + m + "'");
      }
    }
  } else if (key == "normalization") {
    if (v == "window") {
      c.normalization = Normalization::window;
    } else if (v == "global") {
      c.normalization = Normalization::global;
    } else {
      throw ConfigError("'normalization' expects window or global, got '" + v + "'");
    }
  } else if (key.rfind("era.", 0) == 0 && key.size() > 4) {
    const auto dash = v.find('-');
    if (dash == std::string::npos) throw ConfigError("'" + key + "' expects <first>-<last>");
    graph::Era era{key.substr(4), parse_number<int>(key, text::trim(v.substr(0, dash))),
                   parse_number<int>(key, text::trim(v.substr(dash + 1)))};
    if (era.last_year < era.first_year) throw ConfigError("'" + key + "' ends before it starts");
    std::erase_if(c.eras, [&](const graph::Era& e) { return e.name == era.name; });
    c.eras.push_back(era);
    std::sort(c.eras.begin(), c.eras.end(), [](const auto& a, const auto& b) {
      return std::tie(a.first_year, a.last_year, a.name) < std::tie(b.first_year, b.last_year, b.name);
    });
  } else if (key == "output") {
    c.output = resolve(base, v);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

PipelineConfig parse_config(std::string_view contents, const fs::path& base_dir) {
  PipelineConfig c;
  c.taxonomy = taxonomy::data_path("taxonomy.txt");
  c.gazetteer_aliases = taxonomy::data_path("gazetteer_aliases.txt");
  c.entity_aliases = taxonomy::data_path("entity_aliases.txt");
  c.canonical_labels = taxonomy::data_path("canonical_labels.txt");

  std::istringstream in{std::string(contents)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      set_option(c, text::trim(line.substr(0, eq)), text::trim(line.substr(eq + 1)), base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw ConfigError("config file not found: " + path.string());
  return parse_config(text::read_file(path), fs::absolute(path).parent_path());
}

void validate(const PipelineConfig& c) {
  const auto need_file = [](const fs::path& p, const char* key) {
    if (p.empty()) throw ConfigError(std::string("missing required key '") + key + "'");
    if (!fs::is_regular_file(p)) throw ConfigError(std::string("'") + key + "' not found: " + p.string());
  };
  const auto need_dir = [](const fs::path& p, const char* key) {
    if (!fs::is_directory(p)) throw ConfigError(std::string("'") + key + "' is not a directory: " + p.string());
  };
  need_file(c.seeds, "seeds");
  if (c.depth < 0) throw ConfigError("'depth' must be at least 0");
  if (c.cache.empty()) throw ConfigError("missing required key 'cache'");
  if (c.offline) need_dir(c.cache, "cache");
  if (c.output.empty()) throw ConfigError("missing required key 'output'");
  if (!(c.rate_limit > 0)) throw ConfigError("'rate_limit' must be positive");
  if (c.fulltext_dir) need_dir(*c.fulltext_dir, "fulltext_dir");
  need_file(c.taxonomy, "taxonomy");
  need_file(c.gazetteer_aliases, "gazetteer_aliases");
  need_file(c.entity_aliases, "entity_aliases");
  if (c.canonical_labels) need_file(*c.canonical_labels, "canonical_labels");
  if (c.tagging != tagging::TaggingMode::gazetteer) {
    if (!c.import_dir) throw ConfigError("tagging mode '" + mode_name(c.tagging) + "' needs 'import_dir'");
    need_dir(*c.import_dir, "import_dir");
  }
  if (c.token_floor < 0) throw ConfigError("'filter.token_floor' must be at least 0");
}

std::string canonical_form(const PipelineConfig& config) {
  std::string out;
  for (const auto& [k, v] : entries(config)) out += k + " = " + v + "\n";
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::string config_hash(const PipelineConfig& config) { return sha256_hex(canonical_form(config)); }

namespace {

std::string now_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Digest of a file or, for a directory, of every file below it by
/// relative path. Missing paths hash as a marker.
std::string hash_path(const fs::path& p) {
  if (fs::is_regular_file(p)) return sha256_hex(text::read_file(p));
  if (!fs::is_directory(p)) return "missing";
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(p)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::string acc;
  for (const auto& f : files) acc += fs::relative(f, p).generic_string() + ":" + sha256_hex(text::read_file(f)) + "\n";
  return sha256_hex(acc);
}

class OfflineDocuments final : public ingest::DocumentSource {
 public:
  std::optional<std::string> fetch_text(const ingest::PublicationRecord&) override { return std::nullopt; }
  ingest::TextSource kind() const override { return ingest::TextSource::retrieved; }
};

struct Stage {
  std::string name;
  std::vector<std::string> config_keys;
  std::vector<fs::path> inputs;
  std::vector<std::string> outputs;  // relative to the output directory
  std::function<void()> run;
};

struct Paths {
  fs::path out;
  fs::path corpus() const { return out / "corpus.ndjson"; }
  fs::path undated() const { return out / "undated.txt"; }
  fs::path annotations() const { return out / "annotations"; }
  fs::path bio() const { return out / "bio.txt"; }
  fs::path consistency() const { return out / "consistency.csv"; }
  fs::path density() const { return out / "density.csv"; }
  fs::path filtered() const { return out / "filtered.txt"; }
  fs::path filter_stages() const { return out / "filter_stages.csv"; }
  fs::path growth() const { return out / "growth.csv"; }
  fs::path entity_series() const { return out / "entity_series.csv"; }
};

void log_line(const RunOptions& o, const std::string& s) {
  if (o.log) *o.log << s << '\n';
}

}  // namespace

ingest::CorpusStore collect_corpus(const PipelineConfig& c, std::ostream* log) {
  const RunOptions o{false, false, log};
  const std::vector<std::string> seeds = text::read_list(c.seeds);
  ingest::DiskCache cache(c.cache);

  std::unique_ptr<ingest::MetadataSource> upstream;
  if (!c.offline) {
    ingest::HttpMetadataConfig hc;
    hc.base_url = c.api_base;
    hc.requests_per_second = c.rate_limit;
    if (const char* key = std::getenv(c.api_key_env.c_str())) hc.api_key = key;
    upstream = std::make_unique<ingest::HttpMetadataSource>(hc);
  }
  ingest::CachedMetadataSource source(cache, upstream.get());
  ingest::CorpusStore store = ingest::expand_citation_network(seeds, c.depth, source);

  std::unique_ptr<ingest::DocumentSource> docs;
  const ingest::DiskCache* text_cache = &cache;
  if (c.fulltext_dir) {
    docs = std::make_unique<ingest::SuppliedTextSource>(*c.fulltext_dir);
    text_cache = nullptr;  // supplied texts are read fresh every run
  } else if (c.offline) {
    docs = std::make_unique<OfflineDocuments>();
  } else {
    docs = std::make_unique<ingest::HttpDocumentSource>(c.rate_limit, http::RetryPolicy{}, c.pdf_converter);
  }
  std::size_t with_text = 0;
  std::vector<ingest::PublicationRecord> records;
  for (const auto& [id, record] : store.records()) records.push_back(record);
  for (const auto& record : records) {
    if (record.stub) continue;
    if (ingest::fetch_fulltext(record, *docs, store, text_cache).outcome == ingest::FetchOutcome::ok) ++with_text;
  }
  log_line(o, "  records: " + std::to_string(store.size()) + ", with text: " + std::to_string(with_text) +
                  ", upstream calls: " + std::to_string(source.upstream_calls()));

  return store;
}

namespace {

void run_ingest(const PipelineConfig& c, const Paths& p, const RunOptions& o) {
  const ingest::CorpusStore store = collect_corpus(c, o.log);
  ingest::export_corpus(store, p.corpus());
  std::string undated;
  for (const auto& id : store.undated()) undated += id + "\n";
  text::write_file(p.undated(), undated);
}

void run_tag(const PipelineConfig& c, const Paths& p, const RunOptions& o) {
  const ingest::CorpusStore corpus = ingest::import_corpus(p.corpus());
  const taxonomy::Taxonomy tax = taxonomy::Taxonomy::load(c.taxonomy);
  const taxonomy::Gazetteer gaz = taxonomy::build_gazetteer(tax, text::read_two_column(c.gazetteer_aliases));
  auto sets = tagging::tag_corpus(corpus, c.tagging, tax, gaz, c.import_dir);

  std::string report = "kind,surface,canonical,label,count\n";
  if (c.canonical_labels) {
    const auto map = annotations::build_context_free_map(text::read_two_column(*c.canonical_labels), tax);
    std::vector<annotations::AnnotationSet> list;
    for (auto& [id, set] : sets) list.push_back(set);
    const auto consistency = annotations::check_consistency(list, map, tax);
    const auto emit = [&](const char* kind, const auto& items) {
      for (const auto& conflict : items) {
        for (const auto& [label, count] : conflict.counts) {
          report += std::string(kind) + "," + text::csv_field(conflict.surface) + "," +
                    text::csv_field(conflict.canonical) + "," + label + "," + std::to_string(count) + "\n";
        }
      }
    };
    emit("conflict", consistency.conflicts);
    emit("advisory", consistency.advisories);
    std::size_t fixes = 0;
    list = annotations::apply_canonical_labels(list, map, tax, &fixes);
    for (auto& set : list) sets[set.publication_id] = std::move(set);
    log_line(o, "  conflicts: " + std::to_string(consistency.conflicts.size()) +
                    ", canonical fixes: " + std::to_string(fixes));
  }
  text::write_file(p.consistency(), report);

  std::error_code ec;
  fs::remove_all(p.annotations(), ec);
  tagging::write_standoff_dir(p.annotations(), corpus, sets);

  if (c.export_bio) {
    std::ostringstream bio;
    for (const auto& [id, set] : sets) {
      const auto* doc = corpus.document(id);
      if (!doc) continue;
      const auto copies = annotations::resample_overlaps(doc->text, set);
      for (std::size_t k = 0; k < copies.size(); ++k) {
        const std::string doc_id = copies.size() == 1 ? id : id + "#" + std::to_string(k + 1);
        annotations::write_bio(bio, annotations::to_bio(copies[k].text, copies[k].annotations, tax), doc_id);
      }
    }
    text::write_file(p.bio(), bio.str());
  }
  std::size_t entities = 0;
  for (const auto& [id, set] : sets) entities += set.entities.size();
  log_line(o, "  documents: " + std::to_string(sets.size()) + ", entities: " + std::to_string(entities));
}

std::map<std::string, annotations::AnnotationSet> load_annotations(const Paths& p, const ingest::CorpusStore& corpus,
                                                                   const taxonomy::Taxonomy& tax) {
  return tagging::import_annotations(p.annotations(), corpus, tax);
}

void run_density(const PipelineConfig& c, const Paths& p, const RunOptions& o) {
  const ingest::CorpusStore corpus = ingest::import_corpus(p.corpus());
  const taxonomy::Taxonomy tax = taxonomy::Taxonomy::load(c.taxonomy);
  const auto sets = load_annotations(p, corpus, tax);
  std::vector<density::DensityReport> reports;
  std::size_t skipped = 0;
  for (const auto& [id, doc] : corpus.documents()) {
    const auto it = sets.find(id);
    const annotations::AnnotationSet empty{id, {}, 0};
    if (density::count_tokens(doc.text) == 0) {
      ++skipped;
      continue;
    }
    reports.push_back(density::make_report(id, doc.text, it == sets.end() ? empty : it->second, tax,
                                           density::CategoryPolicy{c.count_misc}));
  }
  density::write_reports_csv(p.density(), reports);
  log_line(o, "  reports: " + std::to_string(reports.size()) + ", zero-token documents: " + std::to_string(skipped));
}

void run_filter(const PipelineConfig& c, const Paths& p, const RunOptions& o) {
  const auto reports = density::read_reports_csv(p.density());
  density::FilterConfig fc;
  fc.token_floor_pct = c.token_pct;
  fc.dlt_pct = c.dlt_pct;
  fc.esg_pct = c.esg_pct;
  fc.token_abs_floor = c.token_floor;
  for (const auto& s : text::read_list(c.seeds)) fc.seeds.insert(s);
  const auto filtered = density::filter_corpus(reports, fc);
  density::write_filtered(p.filtered(), filtered);
  density::write_stage_log_csv(p.filter_stages(), filtered);
  for (const auto& s : filtered.absent_seeds) log_line(o, "  seed without a density report: " + s);
  log_line(o, "  kept: " + std::to_string(filtered.kept.size()) + " of " + std::to_string(reports.size()));
}

std::vector<std::string> graph_names(const PipelineConfig& c) {
  std::vector<std::string> out;
  if (c.citation_graph) out.emplace_back("citation");
  if (c.topics_graph) out.emplace_back("topics");
  return out;
}

graph::TemporalGraph build_graph(const std::string& name, const ingest::CorpusStore& corpus,
                                 const std::set<std::string>& kept) {
  return name == "citation" ? graph::build_citation_graph(corpus, kept) : graph::build_topics_graph(corpus, &kept);
}

std::optional<double> global_max(const graph::TemporalGraph& g, Normalization n) {
  if (n == Normalization::window) return std::nullopt;
  return kernels::active().max_value(graph::weighted_degrees(graph::static_snapshot(g)));
}

std::vector<std::string> graph_outputs(const PipelineConfig& c) {
  std::vector<std::string> out;
  for (const auto& g : graph_names(c)) {
    if (c.metric_counts) out.push_back(g + "_counts.csv");
    if (c.metric_hits && g == "citation") out.push_back(g + "_hits.csv");
    if (c.metric_degree) out.push_back(g + "_degree.csv");
  }
  return out;
}

}  // namespace

void write_graph_metrics(const PipelineConfig& c, const ingest::CorpusStore& corpus, const std::set<std::string>& kept,
                         const fs::path& out_dir, std::ostream* log) {
  const RunOptions o{false, false, log};
  const Paths p{out_dir};
  for (const auto& name : graph_names(c)) {
    const graph::TemporalGraph g = build_graph(name, corpus, kept);
    const auto windows = graph::window_slices(g, c.mode);
    log_line(o, "  " + name + ": " + std::to_string(g.nodes().size()) + " nodes, " +
                    std::to_string(g.edges().size()) + " edges, " + std::to_string(windows.size()) + " windows");
    if (c.metric_counts) graph::write_counts_csv(p.out / (name + "_counts.csv"), windows);

    // Windows are independent; scores are merged back in window order.
    if (c.metric_hits && g.directed()) {
      std::vector<std::future<graph::HitsScores>> jobs;
      for (const auto& w : windows) jobs.push_back(std::async(std::launch::async, [&w] { return graph::hits(w); }));
      std::vector<std::pair<std::string, graph::HitsScores>> rows;
      for (std::size_t i = 0; i < windows.size(); ++i) {
        rows.emplace_back(std::to_string(windows[i].end_year), jobs[i].get());
        if (!rows.back().second.converged) {
          log_line(o, "  warning: HITS did not converge in window " + rows.back().first);
        }
      }
      graph::write_hits_csv(p.out / (name + "_hits.csv"), rows);
    }
    if (c.metric_degree) {
      const auto max = global_max(g, c.normalization);
      std::vector<std::future<std::map<std::string, double>>> jobs;
      for (const auto& w : windows) {
        jobs.push_back(std::async(std::launch::async, [&w, max] { return graph::degree_centrality(w, max); }));
      }
      std::vector<std::pair<std::string, std::map<std::string, double>>> rows;
      for (std::size_t i = 0; i < windows.size(); ++i) rows.emplace_back(std::to_string(windows[i].end_year), jobs[i].get());
      graph::write_degree_csv(p.out / (name + "_degree.csv"), rows);
    }
  }
}

namespace {

void run_graphs(const PipelineConfig& c, const Paths& p, const RunOptions& o) {
  write_graph_metrics(c, ingest::import_corpus(p.corpus()), density::read_id_list(p.filtered()), p.out, o.log);
}

void run_reports(const PipelineConfig& c, const Paths& p, const RunOptions& o) {
  const ingest::CorpusStore corpus = ingest::import_corpus(p.corpus());
  const taxonomy::Taxonomy tax = taxonomy::Taxonomy::load(c.taxonomy);
  const auto aliases = tagging::AliasTable::load(c.entity_aliases);
  const std::set<std::string> kept = density::read_id_list(p.filtered());
  const auto sets = load_annotations(p, corpus, tax);
  graph::write_entity_series_csv(p.entity_series(), graph::entity_prevalence_series(sets, corpus, aliases));

  // Era values come from cumulative snapshots at each era's last available year.
  std::ostringstream out;
  out << "graph,node,from_era,to_era,from_value,to_value,growth_pct\n";
  for (const auto& name : graph_names(c)) {
    const graph::TemporalGraph g = build_graph(name, corpus, kept);
    const auto windows = graph::window_slices(g, graph::WindowMode::cumulative);
    std::vector<int> years;
    for (const auto& w : windows) years.push_back(w.end_year);
    const auto max = global_max(g, c.normalization);
    std::vector<std::pair<const graph::Era*, std::map<std::string, double>>> values;
    for (const auto& era : c.eras) {
      const auto year = graph::era_year(era, years);
      if (!year) {
        log_line(o, "  era '" + era.name + "' has no " + name + " snapshot");
        continue;
      }
      values.emplace_back(&era, graph::degree_centrality(windows[static_cast<std::size_t>(*year - years.front())], max));
    }
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      const auto& from = values[k].second;
      const auto& to = values[k + 1].second;
      std::set<std::string> nodes;
      for (const auto& [n, v] : from) nodes.insert(n);
      for (const auto& [n, v] : to) nodes.insert(n);
      for (const auto& n : nodes) {
        const double v0 = from.contains(n) ? from.at(n) : 0.0;
        const double v1 = to.contains(n) ? to.at(n) : 0.0;
        std::string pct;
        try {
          pct = num(graph::growth({{0, v0}, {1, v1}}, 0, 1));
        } catch (const DomainError&) {
          pct = "emerged";
        }
        out << name << ',' << text::csv_field(n) << ',' << text::csv_field(values[k].first->name) << ','
            << text::csv_field(values[k + 1].first->name) << ',' << num(v0) << ',' << num(v1) << ',' << pct << '\n';
      }
    }
  }
  text::write_file(p.growth(), out.str());
}

std::string stage_hash(const Stage& s, const std::map<std::string, std::string>& cfg) {
  std::string acc = s.name + "\n";
  for (const auto& k : s.config_keys) {
    if (k == "era.*") {
      for (const auto& [key, v] : cfg) {
        if (key.rfind("era.", 0) == 0) acc += key + "=" + v + "\n";
      }
    } else {
      acc += k + "=" + cfg.at(k) + "\n";
    }
  }
  for (const auto& in : s.inputs) acc += in.filename().string() + ":" + hash_path(in) + "\n";
  return sha256_hex(acc);
}

json read_manifest(const fs::path& path) {
  if (!fs::is_regular_file(path)) return json::object();
  try {
    return json::parse(text::read_file(path));
  } catch (const json::exception&) {
    return json::object();
  }
}

}  // namespace

RunResult run_pipeline(const PipelineConfig& config, const RunOptions& options) {
  validate(config);
  const Paths p{config.output};
  const auto cfg = entries(config);
  const PipelineConfig& c = config;

  std::vector<fs::path> tag_inputs{p.corpus(), c.taxonomy, c.gazetteer_aliases};
  if (c.canonical_labels) tag_inputs.push_back(*c.canonical_labels);
  if (c.import_dir && c.tagging != tagging::TaggingMode::gazetteer) tag_inputs.push_back(*c.import_dir);
  std::vector<fs::path> ingest_inputs{c.seeds};
  if (c.fulltext_dir) ingest_inputs.push_back(*c.fulltext_dir);

  std::vector<Stage> stages{
      {"ingest", {"seeds", "depth", "cache", "offline", "api_base", "fulltext_dir", "pdf_converter"},
       ingest_inputs, {"corpus.ndjson", "undated.txt"}, [&] { run_ingest(c, p, options); }},
      {"tag", {"tagging", "import_dir", "export_bio", "canonical_labels"}, tag_inputs,
       c.export_bio ? std::vector<std::string>{"annotations", "consistency.csv", "bio.txt"}
                    : std::vector<std::string>{"annotations", "consistency.csv"},
       [&] { run_tag(c, p, options); }},
      {"density", {"filter.count_misc"}, {p.corpus(), p.annotations(), c.taxonomy}, {"density.csv"},
       [&] { run_density(c, p, options); }},
      {"filter", {"filter.token_pct", "filter.dlt_pct", "filter.esg_pct", "filter.token_floor"},
       {p.density(), c.seeds}, {"filtered.txt", "filter_stages.csv"}, [&] { run_filter(c, p, options); }},
      {"graphs", {"graphs", "mode", "metrics", "normalization"}, {p.corpus(), p.filtered()}, graph_outputs(c),
       [&] { run_graphs(c, p, options); }},
      {"reports", {"graphs", "normalization", "era.*"},
       {p.corpus(), p.filtered(), p.annotations(), c.taxonomy, c.entity_aliases},
       {"entity_series.csv", "growth.csv"}, [&] { run_reports(c, p, options); }},
  };

  RunResult result;
  result.config_hash = config_hash(config);

  if (options.dry_run) {
    log_line(options, "plan (config " + result.config_hash.substr(0, 12) + ", output " + p.out.string() + "):");
    for (const auto& s : stages) {
      std::string line = "  " + s.name + " ->";
      for (const auto& out : s.outputs) line += " " + out;
      log_line(options, line);
      result.stages.push_back({s.name, "planned", {}, s.outputs, {}});
    }
    return result;
  }

  fs::create_directories(p.out);
  const json previous = options.resume ? read_manifest(p.out / "manifest.json") : json::object();
  const auto previous_hash = [&](const std::string& name) -> std::string {
    if (!previous.contains("stages")) return {};
    for (const auto& s : previous["stages"]) {
      if (s.value("name", "") == name && (s.value("status", "") == "ok" || s.value("status", "") == "skipped")) {
        return s.value("input_hash", "");
      }
    }
    return {};
  };

  json manifest{{"config_hash", result.config_hash},
                {"config", canonical_form(config)},
                {"versions", {{"litgraph", kVersion}, {"kernels", std::string(kernels::isa_name(kernels::active().isa))}}},
                {"started", now_utc()}};

  for (const auto& s : stages) {
    StageRecord rec{s.name, "ok", {}, s.outputs, {}};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      // Inputs are hashed just before the stage runs so upstream artifacts
      // written earlier in this run are taken into account.
      rec.input_hash = stage_hash(s, cfg);
      const bool outputs_present = std::all_of(s.outputs.begin(), s.outputs.end(),
                                               [&](const std::string& o) { return fs::exists(p.out / o); });
      if (options.resume && outputs_present && previous_hash(s.name) == rec.input_hash) {
        rec.status = "skipped";
        log_line(options, "[" + s.name + "] skipped: inputs unchanged");
      } else {
        log_line(options, "[" + s.name + "]");
        s.run();
      }
    } catch (const std::exception& e) {
      rec.status = "failed";
      rec.error = e.what();
      result.ok = false;
      log_line(options, "[" + s.name + "] failed: " + rec.error);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["stages"].push_back({{"name", rec.name},
                                  {"status", rec.status},
                                  {"input_hash", rec.input_hash},
                                  {"outputs", rec.outputs},
                                  {"seconds", secs},
                                  {"error", rec.error}});
    result.stages.push_back(rec);
    if (!result.ok) break;
  }
  manifest["finished"] = now_utc();
  manifest["status"] = result.ok ? "ok" : "failed";
  text::write_file(p.out / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

}  // namespace litgraph::pipeline
