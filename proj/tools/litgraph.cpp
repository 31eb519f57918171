#include <filesystem>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "litgraph/annotations.hpp"
#include "litgraph/density.hpp"
#include "litgraph/error.hpp"
#include "litgraph/graph.hpp"
#include "litgraph/ingest.hpp"
#include "litgraph/pipeline.hpp"
#include "litgraph/tagging.hpp"
#include "litgraph/taxonomy.hpp"
#include "litgraph/text.hpp"

namespace fs = std::filesystem;
using namespace litgraph;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kFailed = 3;

struct IngestArgs {
  std::string seeds;
  int depth = 2;
  std::string cache;
  bool offline = false;
  std::string api = "https://api.semanticscholar.org/graph/v1";
  double rate = 1.0;
  std::string fulltext_dir;
  std::string out = "corpus.ndjson";
};

int cmd_ingest(const IngestArgs& a) {
  pipeline::PipelineConfig c;
  c.seeds = a.seeds;
  c.depth = a.depth;
  c.cache = a.cache;
  c.offline = a.offline;
  c.api_base = a.api;
  c.rate_limit = a.rate;
  if (!a.fulltext_dir.empty()) c.fulltext_dir = a.fulltext_dir;
  if (c.depth < 0) throw ConfigError("--depth must be at least 0");

  const ingest::CorpusStore store = pipeline::collect_corpus(c, &std::cerr);
  ingest::export_corpus(store, a.out);
  std::cerr << "undated: " << store.undated().size() << "\n";
  return kOk;
}

/// A corpus is either a manifest file or a directory of `<stem>.txt` files.
ingest::CorpusStore load_corpus(const fs::path& path) {
  if (fs::is_regular_file(path)) return ingest::import_corpus(path);
  if (!fs::is_directory(path)) throw ConfigError("corpus not found: " + path.string());
  ingest::CorpusStore store;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(path)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    ingest::PublicationRecord r;
    r.id = text::from_file_stem(f.stem().string());
    r.title = r.id;
    store.put_record(r);
    const std::string body = text::read_file(f);
    if (!body.empty()) store.put_document(ingest::make_document(r.id, body, ingest::TextSource::supplied));
  }
  return store;
}

struct TagArgs {
  std::string corpus;
  bool gazetteer = false;
  std::string import_dir;
  std::string out;
  std::string reports;
  std::string bio;
  std::string taxonomy = taxonomy::data_path("taxonomy.txt").string();
  std::string aliases = taxonomy::data_path("gazetteer_aliases.txt").string();
  bool count_misc = false;
};

int cmd_tag(const TagArgs& a) {
  if (a.gazetteer && !a.import_dir.empty()) throw ConfigError("--gazetteer and --import are exclusive");
  const ingest::CorpusStore corpus = load_corpus(a.corpus);
  const taxonomy::Taxonomy tax = taxonomy::Taxonomy::load(a.taxonomy);
  const taxonomy::Gazetteer gaz = taxonomy::build_gazetteer(tax, text::read_two_column(a.aliases));
  const auto mode = a.import_dir.empty() ? tagging::TaggingMode::gazetteer : tagging::TaggingMode::import;
  const std::optional<fs::path> import_dir =
      a.import_dir.empty() ? std::nullopt : std::optional<fs::path>(a.import_dir);
  const auto sets = tagging::tag_corpus(corpus, mode, tax, gaz, import_dir);

  if (!a.out.empty()) tagging::write_standoff_dir(a.out, corpus, sets);
  if (!a.reports.empty()) {
    std::vector<density::DensityReport> reports;
    for (const auto& [id, doc] : corpus.documents()) {
      if (density::count_tokens(doc.text) == 0) continue;
      reports.push_back(density::make_report(id, doc.text, sets.at(id), tax, density::CategoryPolicy{a.count_misc}));
    }
    density::write_reports_csv(a.reports, reports);
  }
  if (!a.bio.empty()) {
    std::ostringstream bio;
    for (const auto& [id, set] : sets) {
      const auto copies = annotations::resample_overlaps(corpus.document(id)->text, set);
      for (std::size_t k = 0; k < copies.size(); ++k) {
        annotations::write_bio(bio, annotations::to_bio(copies[k].text, copies[k].annotations, tax),
                               copies.size() == 1 ? id : id + "#" + std::to_string(k + 1));
      }
    }
    text::write_file(a.bio, bio.str());
  }
  std::size_t n = 0;
  for (const auto& [id, set] : sets) n += set.entities.size();
  std::cerr << "documents: " << sets.size() << ", entities: " << n << "\n";
  return kOk;
}

struct FilterArgs {
  std::string reports;
  std::string seeds;
  double dlt_pct = 90;
  double esg_pct = 70;
  double token_pct = 10;
  std::int64_t token_floor = 100;
  std::string out;
  std::string stages;
};

int cmd_filter(const FilterArgs& a) {
  density::FilterConfig fc;
  fc.dlt_pct = a.dlt_pct;
  fc.esg_pct = a.esg_pct;
  fc.token_floor_pct = a.token_pct;
  fc.token_abs_floor = a.token_floor;
  if (!a.seeds.empty()) {
    for (const auto& s : text::read_list(a.seeds)) fc.seeds.insert(s);
  }
  const auto reports = density::read_reports_csv(a.reports);
  const auto filtered = density::filter_corpus(reports, fc);
  if (a.out.empty()) {
    for (const auto& id : filtered.kept) std::cout << id << "\n";
  } else {
    density::write_filtered(a.out, filtered);
  }
  if (!a.stages.empty()) density::write_stage_log_csv(a.stages, filtered);
  for (const auto& s : filtered.stages) {
    std::cerr << s.stage << ": " << s.input << " in, " << s.excluded << " excluded";
    if (s.threshold) std::cerr << " (threshold " << text::format_number(*s.threshold) << ")";
    std::cerr << "\n";
  }
  for (const auto& s : filtered.absent_seeds) std::cerr << "seed without a report: " << s << "\n";
  return kOk;
}

struct GraphArgs {
  bool citation = false;
  bool topics = false;
  std::string corpus;
  std::string kept;
  std::string mode = "tumbling";
  std::string metrics = "counts,hits,degree";  // hits is skipped for the undirected topics graph
  std::string normalization = "window";
  std::string out = ".";
};

int cmd_graph(const GraphArgs& a) {
  if (a.citation == a.topics) throw ConfigError("choose exactly one of --citation and --topics");
  pipeline::PipelineConfig c;
  pipeline::set_option(c, "mode", a.mode);
  pipeline::set_option(c, "metrics", a.metrics);
  pipeline::set_option(c, "normalization", a.normalization);

  const ingest::CorpusStore corpus = ingest::import_corpus(a.corpus);
  std::set<std::string> kept;
  if (a.kept.empty()) {
    for (const auto& [id, r] : corpus.records()) kept.insert(id);
  } else {
    kept = density::read_id_list(a.kept);
  }
  c.citation_graph = a.citation;
  c.topics_graph = a.topics;
  if (a.topics) c.metric_hits = false;
  pipeline::write_graph_metrics(c, corpus, kept, a.out, &std::cerr);
  return kOk;
}

struct RunArgs {
  std::string config;
  bool resume = false;
  bool dry_run = false;
  std::vector<std::string> sets;
  std::string seeds;
  std::string cache;
  std::string output;
  std::string mode;
  int depth = -1;
  bool offline = false;
};

int cmd_run(const RunArgs& a) {
  pipeline::PipelineConfig c = pipeline::load_config(a.config);
  const fs::path cwd = fs::current_path();
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    pipeline::set_option(c, text::trim(kv.substr(0, eq)), text::trim(kv.substr(eq + 1)), cwd);
  }
  if (!a.seeds.empty()) pipeline::set_option(c, "seeds", a.seeds, cwd);
  if (!a.cache.empty()) pipeline::set_option(c, "cache", a.cache, cwd);
  if (!a.output.empty()) pipeline::set_option(c, "output", a.output, cwd);
  if (!a.mode.empty()) pipeline::set_option(c, "mode", a.mode, cwd);
  if (a.depth >= 0) c.depth = a.depth;
  if (a.offline) c.offline = true;

  pipeline::RunOptions options;
  options.resume = a.resume;
  options.dry_run = a.dry_run;
  options.log = &std::cerr;
  const auto result = pipeline::run_pipeline(c, options);
  if (!a.dry_run) std::cerr << "config " << result.config_hash << ": " << (result.ok ? "ok" : "failed") << "\n";
  return result.ok ? kOk : kFailed;
}

int cmd_taxonomy_validate(const std::string& file) {
  const taxonomy::Taxonomy tax = taxonomy::Taxonomy::load(file);
  std::cout << tax.size() << " labels under " << tax.top_level().size() << " top-level categories\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"litgraph: citation expansion, entity density filtering and temporal graph metrics"};
  app.require_subcommand(1);
  int code = kOk;

  IngestArgs ia;
  auto* ingest_cmd = app.add_subcommand("ingest", "Expand a citation network from seed ids");
  ingest_cmd->add_option("--seeds", ia.seeds, "File with one seed id per line")->required();
  ingest_cmd->add_option("--depth", ia.depth, "Expansion depth")->capture_default_str();
  ingest_cmd->add_option("--cache", ia.cache, "Cache directory")->required();
  ingest_cmd->add_flag("--offline", ia.offline, "Serve from the cache only");
  ingest_cmd->add_option("--api", ia.api, "Metadata API base URL")->capture_default_str();
  ingest_cmd->add_option("--rate", ia.rate, "Requests per second")->capture_default_str();
  ingest_cmd->add_option("--fulltext-dir", ia.fulltext_dir, "Directory of pre-extracted <id>.txt files");
  ingest_cmd->add_option("--manifest,--out", ia.out, "Corpus manifest to write")->capture_default_str();
  ingest_cmd->callback([&] { code = cmd_ingest(ia); });

  TagArgs ta;
  auto* tag_cmd = app.add_subcommand("tag", "Annotate a corpus");
  tag_cmd->add_option("--corpus", ta.corpus, "Corpus manifest or directory of <id>.txt files")->required();
  tag_cmd->add_flag("--gazetteer", ta.gazetteer, "Use the built-in gazetteer tagger (default)");
  tag_cmd->add_option("--import", ta.import_dir, "Import <id>.ann files from this directory");
  tag_cmd->add_option("--out", ta.out, "Write a standoff directory");
  tag_cmd->add_option("--reports", ta.reports, "Write density reports CSV");
  tag_cmd->add_option("--bio", ta.bio, "Write a BIO export");
  tag_cmd->add_option("--taxonomy", ta.taxonomy, "Taxonomy file")->capture_default_str();
  tag_cmd->add_option("--aliases", ta.aliases, "Gazetteer alias table")->capture_default_str();
  tag_cmd->add_flag("--count-misc", ta.count_misc, "Count Miscellaneous entities as DLT content");
  tag_cmd->callback([&] { code = cmd_tag(ta); });

  FilterArgs fa;
  auto* filter_cmd = app.add_subcommand("filter", "Percentile filter over density reports");
  filter_cmd->add_option("--reports", fa.reports, "Density reports CSV")->required();
  filter_cmd->add_option("--seeds", fa.seeds, "Seed id list");
  filter_cmd->add_option("--dlt-pct", fa.dlt_pct)->capture_default_str();
  filter_cmd->add_option("--esg-pct", fa.esg_pct)->capture_default_str();
  filter_cmd->add_option("--token-pct", fa.token_pct)->capture_default_str();
  filter_cmd->add_option("--token-floor", fa.token_floor)->capture_default_str();
  filter_cmd->add_option("--out", fa.out, "Kept id list (default stdout)");
  filter_cmd->add_option("--stages", fa.stages, "Per-stage log CSV");
  filter_cmd->callback([&] { code = cmd_filter(fa); });

  GraphArgs ga;
  auto* graph_cmd = app.add_subcommand("graph", "Temporal graph metrics");
  graph_cmd->add_flag("--citation", ga.citation);
  graph_cmd->add_flag("--topics", ga.topics);
  graph_cmd->add_option("--corpus", ga.corpus, "Corpus manifest")->required();
  graph_cmd->add_option("--kept", ga.kept, "Kept id list (default all records)");
  graph_cmd->add_option("--mode", ga.mode)->check(CLI::IsMember({"tumbling", "cumulative"}))->capture_default_str();
  graph_cmd->add_option("--metrics", ga.metrics)->capture_default_str();
  graph_cmd->add_option("--normalization", ga.normalization)
      ->check(CLI::IsMember({"window", "global"}))
      ->capture_default_str();
  graph_cmd->add_option("--out", ga.out, "Output directory")->capture_default_str();
  graph_cmd->callback([&] { code = cmd_graph(ga); });

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "Run the whole pipeline from a config file");
  run_cmd->add_option("--config", ra.config, "Pipeline config")->required();
  run_cmd->add_flag("--resume", ra.resume, "Skip stages whose inputs are unchanged");
  run_cmd->add_flag("--dry-run", ra.dry_run, "Print the stage plan only");
  run_cmd->add_option("--set", ra.sets, "Override a config key (key=value)");
  run_cmd->add_option("--seeds", ra.seeds);
  run_cmd->add_option("--cache", ra.cache);
  run_cmd->add_option("--output", ra.output);
  run_cmd->add_option("--mode", ra.mode);
  run_cmd->add_option("--depth", ra.depth);
  run_cmd->add_flag("--offline", ra.offline);
  run_cmd->callback([&] { code = cmd_run(ra); });

  std::string tax_file;
  auto* tax_cmd = app.add_subcommand("taxonomy", "Taxonomy tools");
  tax_cmd->require_subcommand(1);
  auto* validate_cmd = tax_cmd->add_subcommand("validate", "Check a taxonomy file");
  validate_cmd->add_option("file", tax_file)->required();
  validate_cmd->callback([&] { code = cmd_taxonomy_validate(tax_file); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return code;
}
