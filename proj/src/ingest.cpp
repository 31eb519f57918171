#include "litgraph/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "litgraph/error.hpp"
#include "litgraph/text.hpp"

namespace litgraph::ingest {

using nlohmann::json;

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void dedupe_references(PublicationRecord& record) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  for (auto& ref : record.references) {
    if (ref.empty() || ref == record.id) continue;
    if (seen.insert(ref).second) out.push_back(std::move(ref));
  }
  record.references = std::move(out);
}

void normalize_topics(std::vector<std::string>& topics) {
  std::erase_if(topics, [](const std::string& t) { return t.empty(); });
  std::sort(topics.begin(), topics.end());
  topics.erase(std::unique(topics.begin(), topics.end()), topics.end());
}

const char* source_name(TextSource s) { return s == TextSource::retrieved ? "retrieved" : "supplied"; }

TextSource parse_source(const std::string& s) {
  if (s == "retrieved") return TextSource::retrieved;
  if (s == "supplied") return TextSource::supplied;
  throw ParseError("unknown document source '" + s + "'");
}

json record_json(const PublicationRecord& r) {
  json j;
  j["id"] = r.id;
  j["title"] = r.title;
  j["year"] = r.year ? json(*r.year) : json(nullptr);
  j["topics"] = r.topics;
  j["references"] = r.references;
  j["fulltext_url"] = r.fulltext_url ? json(*r.fulltext_url) : json(nullptr);
  j["is_seed"] = r.is_seed;
  j["depth"] = r.depth;
  j["stub"] = r.stub;
  return j;
}

PublicationRecord record_from(const json& j) {
  PublicationRecord r;
  r.id = j.at("id").get<std::string>();
  if (r.id.empty()) throw ValidationError("record with empty id");
  r.title = j.value("title", std::string{});
  if (j.contains("year") && !j.at("year").is_null()) r.year = j.at("year").get<int>();
  if (j.contains("topics")) r.topics = j.at("topics").get<std::vector<std::string>>();
  if (j.contains("references")) r.references = j.at("references").get<std::vector<std::string>>();
  if (j.contains("fulltext_url") && !j.at("fulltext_url").is_null()) {
    r.fulltext_url = j.at("fulltext_url").get<std::string>();
  }
  r.is_seed = j.value("is_seed", false);
  r.depth = j.value("depth", 0);
  r.stub = j.value("stub", false);
  normalize_topics(r.topics);
  dedupe_references(r);
  return r;
}

}  // namespace

std::string to_string(FetchOutcome outcome) {
  switch (outcome) {
    case FetchOutcome::ok: return "ok";
    case FetchOutcome::unavailable: return "unavailable";
    case FetchOutcome::error: return "error";
  }
  return "error";
}

TextDocument make_document(std::string publication_id, std::string text, TextSource source) {
  TextDocument doc;
  doc.publication_id = std::move(publication_id);
  doc.char_count = text::decode_utf8(text).size();
  doc.text = std::move(text);
  doc.source = source;
  return doc;
}

void CorpusStore::put_record(PublicationRecord record) {
  if (record.id.empty()) throw ValidationError("record with empty id");
  dedupe_references(record);
  normalize_topics(record.topics);
  const std::string id = record.id;
  records_.insert_or_assign(id, std::move(record));
}

void CorpusStore::put_document(TextDocument document) {
  if (!records_.contains(document.publication_id)) {
    throw ValidationError("document for unknown record '" + document.publication_id + "'");
  }
  if (document.source == TextSource::retrieved && document.text.empty()) {
    throw ValidationError("retrieved document '" + document.publication_id + "' is empty");
  }
  const std::string id = document.publication_id;
  documents_.insert_or_assign(id, std::move(document));
}

void CorpusStore::log(FetchLogEntry entry) { fetch_log_.push_back(std::move(entry)); }

const PublicationRecord* CorpusStore::find(const std::string& id) const {
  const auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

const TextDocument* CorpusStore::document(const std::string& id) const {
  const auto it = documents_.find(id);
  return it == documents_.end() ? nullptr : &it->second;
}

std::vector<std::string> CorpusStore::undated() const {
  std::vector<std::string> out;
  for (const auto& [id, r] : records_) {
    if (!r.year) out.push_back(id);
  }
  return out;
}

bool CorpusStore::same_contents(const CorpusStore& other) const {
  return records_ == other.records_ && documents_ == other.documents_;
}

PublicationRecord parse_paper_json(const std::string& body, const std::string& requested_id) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw FetchError("malformed metadata for '" + requested_id + "': " + e.what(), 200, false);
  }
  if (!j.is_object()) throw FetchError("metadata for '" + requested_id + "' is not an object", 200, false);

  PublicationRecord r;
  r.id = j.contains("paperId") && j["paperId"].is_string() ? j["paperId"].get<std::string>() : requested_id;
  if (j.contains("title") && j["title"].is_string()) r.title = j["title"].get<std::string>();
  if (j.contains("year") && j["year"].is_number_integer()) r.year = j["year"].get<int>();

  if (j.contains("references") && j["references"].is_array()) {
    for (const auto& ref : j["references"]) {
      if (ref.is_object() && ref.contains("paperId") && ref["paperId"].is_string()) {
        r.references.push_back(ref["paperId"].get<std::string>());
      } else if (ref.is_string()) {
        r.references.push_back(ref.get<std::string>());
      }
    }
  }
  if (j.contains("openAccessPdf") && j["openAccessPdf"].is_object()) {
    const auto& pdf = j["openAccessPdf"];
    if (pdf.contains("url") && pdf["url"].is_string() && !pdf["url"].get<std::string>().empty()) {
      r.fulltext_url = pdf["url"].get<std::string>();
    }
  }
  if (j.contains("s2FieldsOfStudy") && j["s2FieldsOfStudy"].is_array()) {
    for (const auto& f : j["s2FieldsOfStudy"]) {
      if (f.is_object() && f.contains("category") && f["category"].is_string()) {
        r.topics.push_back(f["category"].get<std::string>());
      }
    }
  }
  if (j.contains("fieldsOfStudy") && j["fieldsOfStudy"].is_array()) {
    for (const auto& f : j["fieldsOfStudy"]) {
      if (f.is_string()) r.topics.push_back(f.get<std::string>());
    }
  }
  if (j.contains("topics") && j["topics"].is_array()) {
    for (const auto& t : j["topics"]) {
      if (t.is_object() && t.contains("topic") && t["topic"].is_string()) {
        r.topics.push_back(t["topic"].get<std::string>());
      } else if (t.is_string()) {
        r.topics.push_back(t.get<std::string>());
      }
    }
  }
  normalize_topics(r.topics);
  dedupe_references(r);
  return r;
}

HttpMetadataSource::HttpMetadataSource(HttpMetadataConfig config)
    : config_(std::move(config)),
      limiter_(config_.requests_per_second),
      client_(limiter_, config_.retry,
              config_.api_key.empty() ? std::map<std::string, std::string>{}
                                      : std::map<std::string, std::string>{{"x-api-key", config_.api_key}}) {}

PublicationRecord HttpMetadataSource::fetch(const std::string& id) {
  std::string base = config_.base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  const std::string url = base + "/paper/" + http::url_encode(id) + "?fields=" + config_.fields;
  const http::Response res = client_.get(url);
  if (res.status != 200) {
    throw FetchError("metadata for '" + id + "': HTTP " + std::to_string(res.status), res.status, false);
  }
  return parse_paper_json(res.body, id);
}

DiskCache::DiskCache(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_ / "records");
  std::filesystem::create_directories(root_ / "texts");
}

std::optional<PublicationRecord> DiskCache::load_record(const std::string& id) const {
  const auto path = root_ / "records" / (text::file_stem(id) + ".json");
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    return record_from(json::parse(text::read_file(path)));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void DiskCache::save_record(const PublicationRecord& record, const std::string& key) const {
  json j = record_json(record);
  j.erase("is_seed");
  j.erase("depth");
  const std::string& stem_id = key.empty() ? record.id : key;
  text::write_file(root_ / "records" / (text::file_stem(stem_id) + ".json"), j.dump(2) + "\n");
}

std::optional<std::string> DiskCache::load_text(const std::string& id) const {
  const auto path = root_ / "texts" / (text::file_stem(id) + ".txt");
  if (!std::filesystem::exists(path)) return std::nullopt;
  return text::read_file(path);
}

void DiskCache::save_text(const std::string& id, const std::string& contents) const {
  text::write_file(root_ / "texts" / (text::file_stem(id) + ".txt"), contents);
}

void DiskCache::append_log(const FetchLogEntry& entry) const {
  std::ofstream out(root_ / "fetch_log.ndjson", std::ios::app);
  if (!out) throw IoError("cannot append to fetch log in " + root_.string());
  json j{{"id", entry.id}, {"outcome", to_string(entry.outcome)}, {"timestamp", entry.timestamp},
         {"detail", entry.detail}};
  out << j.dump() << '\n';
}

CachedMetadataSource::CachedMetadataSource(const DiskCache& cache, MetadataSource* upstream)
    : cache_(cache), upstream_(upstream) {}

PublicationRecord CachedMetadataSource::fetch(const std::string& id) {
  if (auto cached = cache_.load_record(id)) return *cached;
  if (!upstream_) throw FetchError("'" + id + "' not in cache (offline)", 0, false);
  ++upstream_calls_;
  PublicationRecord record = upstream_->fetch(id);
  cache_.save_record(record);
  if (record.id != id) {
    // Requested under an alias (e.g. "DOI:..."); cache under both keys.
    cache_.save_record(record, id);
  }
  return record;
}

CorpusStore expand_citation_network(const std::vector<std::string>& seeds, int depth,
                                    MetadataSource& source) {
  if (seeds.empty()) throw ConfigError("seed list is empty");
  if (depth < 0) throw ConfigError("expansion depth must be non-negative");

  CorpusStore store;
  std::map<std::string, int> level;  // id -> shortest distance from a seed
  std::deque<std::string> frontier;
  std::set<std::string> seed_ids;

  for (const auto& seed : seeds) {
    const std::string trimmed = text::trim(seed);
    if (trimmed.empty()) continue;
    PublicationRecord record;
    try {
      record = source.fetch(trimmed);
    } catch (const FetchError& e) {
      throw FetchError("seed '" + trimmed + "': " + e.what(), e.status(), e.retriable());
    }
    store.log({record.id, FetchOutcome::ok, utc_timestamp(), "metadata"});
    record.is_seed = true;
    record.depth = 0;
    record.stub = false;
    if (seed_ids.insert(record.id).second) {
      level[record.id] = 0;
      frontier.push_back(record.id);
      store.put_record(std::move(record));
    }
  }
  if (seed_ids.empty()) throw ConfigError("seed list is empty");

  while (!frontier.empty()) {
    const std::string id = frontier.front();
    frontier.pop_front();
    const int d = level.at(id);
    if (d >= depth) continue;
    const std::vector<std::string> refs = store.find(id)->references;
    for (const auto& ref : refs) {
      if (level.contains(ref)) continue;
      level[ref] = d + 1;
      PublicationRecord record;
      try {
        record = source.fetch(ref);
        store.log({ref, FetchOutcome::ok, utc_timestamp(), "metadata"});
      } catch (const FetchError& e) {
        store.log({ref, FetchOutcome::error, utc_timestamp(), e.what()});
        record = PublicationRecord{};
        record.stub = true;
      }
      record.id = ref;
      record.is_seed = false;
      record.depth = d + 1;
      if (record.stub) record.references.clear();
      store.put_record(std::move(record));
      frontier.push_back(ref);
    }
  }
  return store;
}

SuppliedTextSource::SuppliedTextSource(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::optional<std::string> SuppliedTextSource::fetch_text(const PublicationRecord& record) {
  const auto path = dir_ / (text::file_stem(record.id) + ".txt");
  if (!std::filesystem::exists(path)) return std::nullopt;
  return text::read_file(path);
}

HttpDocumentSource::HttpDocumentSource(double requests_per_second, http::RetryPolicy retry,
                                       std::string converter)
    : limiter_(requests_per_second), client_(limiter_, retry), converter_(std::move(converter)) {}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  return out + "'";
}

}  // namespace

std::optional<std::string> HttpDocumentSource::fetch_text(const PublicationRecord& record) {
  if (!record.fulltext_url) return std::nullopt;
  const http::Response res = client_.get(*record.fulltext_url);
  if (res.status != 200) {
    throw FetchError("fulltext for '" + record.id + "': HTTP " + std::to_string(res.status), res.status,
                     false);
  }
  const bool is_pdf = res.content_type.find("application/pdf") != std::string::npos ||
                      res.body.rfind("%PDF", 0) == 0;
  if (!is_pdf) return res.body;
  if (converter_.empty()) return std::nullopt;

  const auto tmp = std::filesystem::temp_directory_path() /
                   ("litgraph-" + text::file_stem(record.id) + "-" + std::to_string(::getpid()));
  const auto pdf = tmp.string() + ".pdf";
  const auto txt = tmp.string() + ".txt";
  text::write_file(pdf, res.body);
  const std::string cmd = converter_ + " " + shell_quote(pdf) + " " + shell_quote(txt);
  const int rc = std::system(cmd.c_str());
  std::optional<std::string> out;
  if (rc == 0 && std::filesystem::exists(txt)) out = text::read_file(txt);
  std::error_code ec;
  std::filesystem::remove(pdf, ec);
  std::filesystem::remove(txt, ec);
  if (rc != 0) throw FetchError("converter failed for '" + record.id + "'", 0, false);
  return out;
}

FulltextResult fetch_fulltext(const PublicationRecord& record, DocumentSource& source,
                              CorpusStore& store, const DiskCache* cache) {
  FulltextResult result;
  std::optional<std::string> body;
  if (cache) body = cache->load_text(record.id);
  if (!body && source.kind() == TextSource::retrieved && !record.fulltext_url) {
    result.outcome = FetchOutcome::unavailable;
    result.detail = "no fulltext url";
  } else if (!body) {
    try {
      body = source.fetch_text(record);
      if (body && cache && !body->empty()) cache->save_text(record.id, *body);
    } catch (const FetchError& e) {
      result.outcome = FetchOutcome::error;
      result.detail = e.what();
    }
  }
  if (result.outcome != FetchOutcome::error && result.detail.empty()) {
    if (body && !body->empty()) {
      TextDocument doc = make_document(record.id, std::move(*body), source.kind());
      store.put_document(doc);
      result.document = std::move(doc);
      result.outcome = FetchOutcome::ok;
      result.detail = "fulltext";
    } else {
      result.outcome = FetchOutcome::unavailable;
      result.detail = body ? "empty text" : "no text";
    }
  }
  FetchLogEntry entry{record.id, result.outcome, utc_timestamp(), result.detail};
  if (cache) cache->append_log(entry);
  store.log(std::move(entry));
  return result;
}

std::string record_to_json(const PublicationRecord& record) { return record_json(record).dump(); }

PublicationRecord record_from_json(const std::string& line) {
  try {
    return record_from(json::parse(line));
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

void export_corpus(const CorpusStore& store, const std::filesystem::path& path) {
  if (store.empty()) throw ValidationError("refusing to export an empty corpus");
  std::ostringstream out;
  for (const auto& [id, record] : store.records()) {
    json j = record_json(record);
    if (const TextDocument* doc = store.document(id)) {
      j["document"] = {{"source", source_name(doc->source)}, {"char_count", doc->char_count},
                       {"text", doc->text}};
    }
    out << j.dump() << '\n';
  }
  text::write_file(path, out.str());
}

CorpusStore import_corpus(const std::filesystem::path& path) {
  std::istringstream in(text::read_file(path));
  CorpusStore store;
  std::string line;
  std::size_t line_no = 0;
  std::vector<TextDocument> docs;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      PublicationRecord r = record_from(j);
      if (j.contains("document")) {
        const auto& d = j.at("document");
        TextDocument doc = make_document(r.id, d.at("text").get<std::string>(),
                                         parse_source(d.value("source", std::string("supplied"))));
        if (d.contains("char_count") && d.at("char_count").get<std::size_t>() != doc.char_count) {
          throw ParseError("char_count does not match text for '" + r.id + "'", line_no);
        }
        docs.push_back(std::move(doc));
      }
      store.put_record(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ": " + e.what(), line_no);
    }
  }
  for (auto& d : docs) store.put_document(std::move(d));
  return store;
}

}  // namespace litgraph::ingest
