#include "litgraph/tagging.hpp"

#include <set>

#include "litgraph/error.hpp"

namespace litgraph::tagging {

namespace {

bool keeps_trailing_s(std::string_view word) {
  if (word.size() < 4 || word.back() != 's') return true;
  const char prev = word[word.size() - 2];
  return prev == 's' || prev == 'u' || prev == 'i';
}

}  // namespace

std::string entity_form(std::string_view surface) {
  const std::string norm = text::normalize_surface(surface);
  std::string out;
  out.reserve(norm.size());
  std::size_t pos = 0;
  while (pos <= norm.size()) {
    std::size_t sp = norm.find(' ', pos);
    if (sp == std::string::npos) sp = norm.size();
    std::string_view word = std::string_view(norm).substr(pos, sp - pos);
    if (!keeps_trailing_s(word)) word.remove_suffix(1);
    if (!out.empty()) out.push_back(' ');
    out.append(word);
    pos = sp + 1;
  }
  return out;
}

AliasTable AliasTable::from_rows(const std::vector<text::TableRow>& rows) {
  AliasTable table;
  for (const auto& row : rows) {
    const std::string key = entity_form(row.key);
    if (key.empty()) throw ValidationError("alias on line " + std::to_string(row.line) + " has an empty surface");
    const auto [it, inserted] = table.entries_.emplace(key, row.value);
    if (!inserted && it->second != row.value) {
      throw ValidationError("alias '" + key + "' maps to both '" + it->second + "' and '" + row.value + "'");
    }
  }
  for (const auto& row : rows) {
    const std::string self = entity_form(row.value);
    if (self.empty()) continue;
    const auto [it, inserted] = table.entries_.emplace(self, row.value);
    if (!inserted && it->second != row.value) {
      throw ValidationError("canonical '" + row.value + "' normalizes to '" + self + "', which is an alias of '" +
                            it->second + "'");
    }
  }
  return table;
}

AliasTable AliasTable::load(const std::filesystem::path& path) { return from_rows(text::read_two_column(path)); }

const std::string* AliasTable::resolve(const std::string& form) const {
  const auto it = entries_.find(form);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string normalize_entity(std::string_view surface, const AliasTable& aliases) {
  std::string form = entity_form(surface);
  if (const std::string* canonical = aliases.resolve(form)) return *canonical;
  return form;
}

annotations::AnnotationSet tag_gazetteer(const ingest::TextDocument& doc, const taxonomy::Gazetteer& gazetteer) {
  annotations::AnnotationSet set;
  set.publication_id = doc.publication_id;
  if (gazetteer.entries.empty()) return set;

  const std::u32string text32 = text::decode_utf8(doc.text);
  const std::u32string_view view(text32);
  const std::vector<text::Span> tokens = text::word_tokens(view);
  std::size_t next_id = 1;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const std::size_t longest = std::min(gazetteer.max_phrase_len, tokens.size() - i);
    bool matched = false;
    for (std::size_t len = longest; len >= 1; --len) {
      const std::size_t b = tokens[i].begin;
      const std::size_t e = tokens[i + len - 1].end;
      const std::string original = text::encode_utf8(view.substr(b, e - b));
      const auto it = gazetteer.entries.find(text::normalize_surface(original));
      if (it == gazetteer.entries.end()) continue;
      set.entities.push_back({"T" + std::to_string(next_id++), it->second, b, e, original});
      i += len;
      matched = true;
      break;
    }
    if (!matched) ++i;
  }
  return set;
}

std::map<std::string, annotations::AnnotationSet> import_annotations(
    const std::filesystem::path& dir, const ingest::CorpusStore& corpus, const taxonomy::Taxonomy& taxonomy) {
  if (!std::filesystem::is_directory(dir)) throw IoError("annotation directory not found: " + dir.string());

  std::map<std::string, std::string> stem_to_id;
  for (const auto& [id, doc] : corpus.documents()) stem_to_id.emplace(text::file_stem(id), id);

  std::set<std::string> orphans;
  std::map<std::string, std::filesystem::path> ann_files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".ann") continue;
    const std::string stem = entry.path().stem().string();
    const auto it = stem_to_id.find(stem);
    if (it == stem_to_id.end()) {
      orphans.insert(entry.path().filename().string());
    } else {
      ann_files.emplace(it->second, entry.path());
    }
  }
  if (!orphans.empty()) {
    std::string list;
    for (const auto& o : orphans) list += (list.empty() ? "" : ", ") + o;
    throw ValidationError("annotation files without a corpus document: " + list);
  }

  std::map<std::string, annotations::AnnotationSet> out;
  for (const auto& [id, doc] : corpus.documents()) {
    const auto it = ann_files.find(id);
    if (it == ann_files.end()) {
      out[id].publication_id = id;
      continue;
    }
    annotations::AnnotationSet set;
    try {
      set = annotations::parse_standoff(text::read_file(it->second), doc.text, id);
    } catch (const ParseError& e) {
      throw ParseError(it->second.string() + ": " + e.what());
    }
    for (auto& e : set.entities) e.label = taxonomy.prune_to_top_level(e.label);
    out[id] = std::move(set);
  }
  return out;
}

void write_standoff_dir(const std::filesystem::path& dir, const ingest::CorpusStore& corpus,
                        const std::map<std::string, annotations::AnnotationSet>& sets) {
  std::filesystem::create_directories(dir);
  for (const auto& [id, set] : sets) {
    const std::string stem = text::file_stem(id);
    if (const auto* doc = corpus.document(id)) text::write_file(dir / (stem + ".txt"), doc->text);
    text::write_file(dir / (stem + ".ann"), annotations::serialize_standoff(set));
  }
}

std::map<std::string, annotations::AnnotationSet> tag_corpus(
    const ingest::CorpusStore& corpus, TaggingMode mode, const taxonomy::Taxonomy& taxonomy,
    const taxonomy::Gazetteer& gazetteer, const std::optional<std::filesystem::path>& import_dir) {
  std::map<std::string, annotations::AnnotationSet> out;
  if (mode == TaggingMode::gazetteer) {
    for (const auto& [id, doc] : corpus.documents()) out.emplace(id, tag_gazetteer(doc, gazetteer));
    return out;
  }
  if (!import_dir) throw ConfigError("tagging mode requires an import directory");
  out = import_annotations(*import_dir, corpus, taxonomy);
  if (mode == TaggingMode::hybrid) {
    for (const auto& [id, doc] : corpus.documents()) {
      const auto ann = *import_dir / (text::file_stem(id) + ".ann");
      if (!std::filesystem::exists(ann)) out[id] = tag_gazetteer(doc, gazetteer);
    }
  }
  return out;
}

}  // namespace litgraph::tagging
