#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "litgraph/http.hpp"

namespace litgraph::ingest {

/// Metadata of one publication. `references` holds the cited ids in the
/// order the source returned them.
struct PublicationRecord {
  std::string id;
  std::string title;
  std::optional<int> year;
  std::vector<std::string> topics;  // sorted, unique
  std::vector<std::string> references;
  std::optional<std::string> fulltext_url;
  bool is_seed = false;
  int depth = 0;
  /// Placeholder kept after a failed metadata fetch; has no references.
  bool stub = false;

  bool operator==(const PublicationRecord&) const = default;
};

enum class TextSource { retrieved, supplied };

struct TextDocument {
  std::string publication_id;
  std::string text;
  std::size_t char_count = 0;  // Unicode scalar values
  TextSource source = TextSource::supplied;

  bool operator==(const TextDocument&) const = default;
};

TextDocument make_document(std::string publication_id, std::string text, TextSource source);

enum class FetchOutcome { ok, unavailable, error };

struct FetchLogEntry {
  std::string id;
  FetchOutcome outcome = FetchOutcome::ok;
  std::string timestamp;
  std::string detail;
};

std::string to_string(FetchOutcome outcome);

/// In-memory corpus. Records and documents are keyed by id; iteration
/// order is lexicographic so every export is deterministic.
class CorpusStore {
 public:
  void put_record(PublicationRecord record);
  /// Throws ValidationError when the document has no matching record.
  void put_document(TextDocument document);
  void log(FetchLogEntry entry);

  const std::map<std::string, PublicationRecord>& records() const noexcept { return records_; }
  const std::map<std::string, TextDocument>& documents() const noexcept { return documents_; }
  const std::vector<FetchLogEntry>& fetch_log() const noexcept { return fetch_log_; }

  const PublicationRecord* find(const std::string& id) const;
  const TextDocument* document(const std::string& id) const;
  bool empty() const noexcept { return records_.empty(); }
  std::size_t size() const noexcept { return records_.size(); }

  /// Ids of records without a publication year.
  std::vector<std::string> undated() const;

  /// Equality over records and documents; the fetch log is history, not state.
  bool same_contents(const CorpusStore& other) const;

 private:
  std::map<std::string, PublicationRecord> records_;
  std::map<std::string, TextDocument> documents_;
  std::vector<FetchLogEntry> fetch_log_;
};

/// Source of publication metadata. Implementations throw FetchError.
class MetadataSource {
 public:
  virtual ~MetadataSource() = default;
  virtual PublicationRecord fetch(const std::string& id) = 0;
};

/// Parses one paper object in the Semantic Scholar Graph API shape.
PublicationRecord parse_paper_json(const std::string& body, const std::string& requested_id);

struct HttpMetadataConfig {
  std::string base_url = "https://api.semanticscholar.org/graph/v1";
  std::string fields = "title,year,references.paperId,openAccessPdf,s2FieldsOfStudy";
  std::string api_key;
  double requests_per_second = 1.0;
  http::RetryPolicy retry;
};

class HttpMetadataSource final : public MetadataSource {
 public:
  explicit HttpMetadataSource(HttpMetadataConfig config);
  PublicationRecord fetch(const std::string& id) override;
  std::size_t request_count() const noexcept { return client_.request_count(); }

 private:
  HttpMetadataConfig config_;
  http::RateLimiter limiter_;
  http::Client client_;
};

/// On-disk cache: `records/<stem>.json`, `texts/<stem>.txt` and an
/// append-only `fetch_log.ndjson`, where `<stem>` is text::file_stem(id).
class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path root);

  std::optional<PublicationRecord> load_record(const std::string& id) const;
  /// Stores under `key` (defaults to the record id).
  void save_record(const PublicationRecord& record, const std::string& key = {}) const;
  std::optional<std::string> load_text(const std::string& id) const;
  void save_text(const std::string& id, const std::string& text) const;
  void append_log(const FetchLogEntry& entry) const;
  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path root_;
};

/// Serves cached records first and falls back to `upstream` (may be null
/// for offline use). Fetched records are written to the cache. Seed flag
/// and depth are not cached; the expansion assigns them.
class CachedMetadataSource final : public MetadataSource {
 public:
  CachedMetadataSource(const DiskCache& cache, MetadataSource* upstream);
  PublicationRecord fetch(const std::string& id) override;
  std::size_t upstream_calls() const noexcept { return upstream_calls_; }

 private:
  const DiskCache& cache_;
  MetadataSource* upstream_;
  std::size_t upstream_calls_ = 0;
};

/// Breadth-first expansion along references (citing -> cited) up to
/// `depth` levels. Each record's depth is its shortest distance from a
/// seed. A failed seed fetch rethrows; a failed non-seed fetch leaves a
/// stub record and an error log entry.
CorpusStore expand_citation_network(const std::vector<std::string>& seeds, int depth,
                                    MetadataSource& source);

/// Source of full text for a record. Returns nullopt when no text exists.
class DocumentSource {
 public:
  virtual ~DocumentSource() = default;
  virtual std::optional<std::string> fetch_text(const PublicationRecord& record) = 0;
  virtual TextSource kind() const = 0;
};

/// Pre-extracted texts in `<dir>/<stem>.txt`.
class SuppliedTextSource final : public DocumentSource {
 public:
  explicit SuppliedTextSource(std::filesystem::path dir);
  std::optional<std::string> fetch_text(const PublicationRecord& record) override;
  TextSource kind() const override { return TextSource::supplied; }

 private:
  std::filesystem::path dir_;
};

/// Downloads `fulltext_url`. Plain-text bodies are used directly; PDF bodies
/// go through `converter`, a command run as `<converter> <in.pdf> <out.txt>`.
/// Without a converter, PDFs are reported unavailable.
class HttpDocumentSource final : public DocumentSource {
 public:
  HttpDocumentSource(double requests_per_second, http::RetryPolicy retry,
                     std::string converter = {});
  std::optional<std::string> fetch_text(const PublicationRecord& record) override;
  TextSource kind() const override { return TextSource::retrieved; }
  std::size_t request_count() const noexcept { return client_.request_count(); }

 private:
  http::RateLimiter limiter_;
  http::Client client_;
  std::string converter_;
};

struct FulltextResult {
  FetchOutcome outcome = FetchOutcome::unavailable;
  std::optional<TextDocument> document;
  std::string detail;
};

/// Fetches and stores one document; every call appends to the fetch log.
/// Network failures become an `error` outcome rather than an exception.
FulltextResult fetch_fulltext(const PublicationRecord& record, DocumentSource& source,
                              CorpusStore& store, const DiskCache* cache = nullptr);

/// Writes one JSON object per record (documents inline) to `path`.
/// Throws ValidationError for an empty store and IoError on write failure.
void export_corpus(const CorpusStore& store, const std::filesystem::path& path);
CorpusStore import_corpus(const std::filesystem::path& path);

std::string record_to_json(const PublicationRecord& record);
PublicationRecord record_from_json(const std::string& line);

}  // namespace litgraph::ingest
