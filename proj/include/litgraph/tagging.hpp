#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "litgraph/annotations.hpp"
#include "litgraph/ingest.hpp"
#include "litgraph/taxonomy.hpp"
#include "litgraph/text.hpp"

namespace litgraph::tagging {

/// Canonical identity of an entity for prevalence tracking.
struct EntityKey {
  std::string canonical;
  std::string label;
  auto operator<=>(const EntityKey&) const = default;
};

/// Normalized surface -> canonical entity string.
class AliasTable {
 public:
  AliasTable() = default;
  /// Keys go through entity_form(). Each canonical value also maps to
  /// itself so that resolution is idempotent; a table where that would
  /// clash raises ValidationError.
  static AliasTable from_rows(const std::vector<text::TableRow>& rows);
  static AliasTable load(const std::filesystem::path& path);

  const std::string* resolve(const std::string& form) const;
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::map<std::string, std::string> entries_;
};

/// normalize_surface plus a single plural rule: a trailing "s" is dropped
/// from words of four or more characters unless the word ends in "ss",
/// "us" or "is".
std::string entity_form(std::string_view surface);

/// entity_form followed by alias resolution.
std::string normalize_entity(std::string_view surface, const AliasTable& aliases);

/// Leftmost-longest gazetteer matching over word-token n-grams. Matches
/// never overlap; offsets refer to the original text. Entities are
/// numbered T1, T2, ... in text order.
annotations::AnnotationSet tag_gazetteer(const ingest::TextDocument& doc, const taxonomy::Gazetteer& gazetteer);

/// Reads `<stem>.ann` files from `dir` for every document in `corpus`.
/// Labels are pruned to the top level; documents without an `.ann` get an
/// empty set. An `.ann` without a corpus document is a ValidationError.
std::map<std::string, annotations::AnnotationSet> import_annotations(
    const std::filesystem::path& dir, const ingest::CorpusStore& corpus, const taxonomy::Taxonomy& taxonomy);

/// Writes `<stem>.txt` and `<stem>.ann` pairs into `dir`.
void write_standoff_dir(const std::filesystem::path& dir, const ingest::CorpusStore& corpus,
                        const std::map<std::string, annotations::AnnotationSet>& sets);

enum class TaggingMode { gazetteer, import, hybrid };

/// Annotates every document. In hybrid mode imported annotations take
/// precedence and the gazetteer covers documents without an `.ann` file.
std::map<std::string, annotations::AnnotationSet> tag_corpus(
    const ingest::CorpusStore& corpus, TaggingMode mode, const taxonomy::Taxonomy& taxonomy,
    const taxonomy::Gazetteer& gazetteer, const std::optional<std::filesystem::path>& import_dir);

}  // namespace litgraph::tagging
