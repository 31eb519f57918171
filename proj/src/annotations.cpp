#include "litgraph/annotations.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <set>
#include <unordered_set>

#include "litgraph/error.hpp"

namespace litgraph::annotations {

namespace {

std::size_t parse_offset(std::string_view s, std::size_t line_no) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("invalid offset '" + std::string(s) + "'", line_no);
  }
  return value;
}

}  // namespace

AnnotationSet parse_standoff(std::string_view ann_text, std::string_view doc_text,
                             std::string publication_id) {
  AnnotationSet set;
  set.publication_id = std::move(publication_id);
  const std::u32string doc = text::decode_utf8(doc_text);
  std::unordered_set<std::string> ids;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < ann_text.size()) {
    std::size_t nl = ann_text.find('\n', pos);
    if (nl == std::string_view::npos) nl = ann_text.size();
    std::string_view line = ann_text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() != 'T') {
      ++set.ignored_lines;
      continue;
    }

    const std::size_t tab1 = line.find('\t');
    const std::size_t tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos) throw ParseError("expected three tab-separated fields", line_no);

    EntityAnnotation e;
    e.ann_id = std::string(line.substr(0, tab1));
    const std::string_view middle = line.substr(tab1 + 1, tab2 - tab1 - 1);
    e.surface = std::string(line.substr(tab2 + 1));

    if (middle.find(';') != std::string_view::npos) {
      throw ParseError("discontinuous span in '" + e.ann_id + "' is not supported", line_no);
    }
    const std::size_t sp1 = middle.find(' ');
    const std::size_t sp2 = sp1 == std::string_view::npos ? sp1 : middle.find(' ', sp1 + 1);
    if (sp2 == std::string_view::npos || middle.find(' ', sp2 + 1) != std::string_view::npos) {
      throw ParseError("expected '<label> <start> <end>' in '" + e.ann_id + "'", line_no);
    }
    e.label = std::string(middle.substr(0, sp1));
    e.start = parse_offset(middle.substr(sp1 + 1, sp2 - sp1 - 1), line_no);
    e.end = parse_offset(middle.substr(sp2 + 1), line_no);

    if (e.start >= e.end || e.end > doc.size()) {
      throw ParseError("offsets " + std::to_string(e.start) + ".." + std::to_string(e.end) +
                           " out of range for document of length " + std::to_string(doc.size()),
                       line_no);
    }
    const std::string covered = text::encode_utf8(std::u32string_view(doc).substr(e.start, e.end - e.start));
    if (covered != e.surface) {
      throw ParseError("surface '" + e.surface + "' does not match document text '" + covered + "'", line_no);
    }
    if (!ids.insert(e.ann_id).second) throw ParseError("duplicate annotation id '" + e.ann_id + "'", line_no);
    set.entities.push_back(std::move(e));
  }
  return set;
}

std::string serialize_standoff(const AnnotationSet& set) {
  std::string out;
  for (const auto& e : set.entities) {
    out += e.ann_id;
    out += '\t';
    out += e.label;
    out += ' ';
    out += std::to_string(e.start);
    out += ' ';
    out += std::to_string(e.end);
    out += '\t';
    out += e.surface;
    out += '\n';
  }
  return out;
}

bool overlaps(const EntityAnnotation& a, const EntityAnnotation& b) noexcept {
  return a.start < b.end && b.start < a.end;
}

bool has_overlaps(const AnnotationSet& set) {
  std::vector<const EntityAnnotation*> sorted;
  for (const auto& e : set.entities) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->start < b->start; });
  std::size_t reach = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i]->start < reach) return true;
    reach = std::max(reach, sorted[i]->end);
  }
  return false;
}

std::vector<BioSentence> to_bio(std::string_view doc_text, const AnnotationSet& set,
                                const taxonomy::Taxonomy& taxonomy, const Tokenizer& tokenizer) {
  if (has_overlaps(set)) {
    throw PreconditionError("overlapping annotations in '" + set.publication_id +
                            "'; run resample_overlaps first");
  }
  const std::u32string doc = text::decode_utf8(doc_text);

  std::vector<const EntityAnnotation*> ents;
  for (const auto& e : set.entities) ents.push_back(&e);
  std::sort(ents.begin(), ents.end(), [](auto* a, auto* b) { return a->start < b->start; });

  // Sentence breaks at newlines, except inside an annotation.
  std::vector<text::Span> sentences;
  std::size_t sent_begin = 0;
  std::size_t next_ent = 0;
  for (std::size_t i = 0; i <= doc.size(); ++i) {
    if (i < doc.size() && doc[i] != U'\n') continue;
    while (next_ent < ents.size() && ents[next_ent]->end <= i) ++next_ent;
    if (i < doc.size() && next_ent < ents.size() && ents[next_ent]->start <= i) continue;
    sentences.push_back({sent_begin, i});
    sent_begin = i + 1;
  }

  std::vector<BioSentence> out;
  std::vector<bool> seen(ents.size(), false);
  std::size_t cursor = 0;  // first entity that may still overlap
  for (const auto& sent : sentences) {
    const std::u32string_view segment = std::u32string_view(doc).substr(sent.begin, sent.end - sent.begin);
    BioSentence sentence;
    for (text::Span tok : tokenizer(segment)) {
      tok.begin += sent.begin;
      tok.end += sent.begin;
      while (cursor < ents.size() && ents[cursor]->end <= tok.begin) ++cursor;
      std::size_t hit = ents.size();
      for (std::size_t k = cursor; k < ents.size() && ents[k]->start < tok.end; ++k) {
        if (ents[k]->end <= tok.begin) continue;
        if (hit != ents.size()) {
          throw PreconditionError("annotations '" + ents[hit]->ann_id + "' and '" + ents[k]->ann_id +
                                  "' share a token");
        }
        hit = k;
      }
      BioToken bt{text::encode_utf8(std::u32string_view(doc).substr(tok.begin, tok.end - tok.begin)), "O"};
      if (hit != ents.size()) {
        const std::string& label = taxonomy.prune_to_top_level(ents[hit]->label);
        bt.tag = (seen[hit] ? "I-" : "B-") + label;
        seen[hit] = true;
      }
      sentence.push_back(std::move(bt));
    }
    if (!sentence.empty()) out.push_back(std::move(sentence));
  }
  for (std::size_t k = 0; k < ents.size(); ++k) {
    if (!seen[k]) throw PreconditionError("annotation '" + ents[k]->ann_id + "' covers no token");
  }
  return out;
}

void write_bio(std::ostream& out, const std::vector<BioSentence>& sentences, std::string_view doc_id) {
  if (!doc_id.empty()) out << "-DOCSTART-\t" << doc_id << "\n\n";
  for (const auto& sentence : sentences) {
    for (const auto& tok : sentence) out << tok.token << '\t' << tok.tag << '\n';
    out << '\n';
  }
}

ContextFreeMap build_context_free_map(const std::vector<text::TableRow>& rows,
                                      const taxonomy::Taxonomy& taxonomy) {
  ContextFreeMap map;
  for (const auto& row : rows) {
    if (!taxonomy.contains(row.value)) {
      throw ValidationError("canonical label '" + row.value + "' for '" + row.key + "' is not in the taxonomy");
    }
    const std::string key = text::normalize_surface(row.key);
    if (key.empty()) throw ValidationError("empty surface on line " + std::to_string(row.line));
    const std::string& label = taxonomy.prune_to_top_level(row.value);
    const auto [it, inserted] = map.emplace(key, label);
    if (!inserted && it->second != label) {
      throw ValidationError("surface '" + key + "' has conflicting canonical labels");
    }
  }
  return map;
}

ConsistencyReport check_consistency(const std::vector<AnnotationSet>& corpus, const ContextFreeMap& map,
                                    const taxonomy::Taxonomy& taxonomy) {
  std::map<std::string, std::map<std::string, std::size_t>> observed;
  for (const auto& set : corpus) {
    for (const auto& e : set.entities) {
      observed[text::normalize_surface(e.surface)][taxonomy.prune_to_top_level(e.label)]++;
    }
  }
  ConsistencyReport report;
  for (auto& [surface, counts] : observed) {
    const auto it = map.find(surface);
    if (it != map.end()) {
      const bool deviates = std::any_of(counts.begin(), counts.end(),
                                        [&](const auto& kv) { return kv.first != it->second; });
      if (!deviates) continue;
      counts.try_emplace(it->second, 0);
      report.conflicts.push_back({surface, it->second, counts});
    } else if (counts.size() >= 2) {
      report.advisories.push_back({surface, {}, counts});
    }
  }
  return report;
}

std::vector<AnnotationSet> apply_canonical_labels(const std::vector<AnnotationSet>& corpus,
                                                  const ContextFreeMap& map,
                                                  const taxonomy::Taxonomy& taxonomy, std::size_t* fixes) {
  std::vector<AnnotationSet> out = corpus;
  std::size_t applied = 0;
  for (auto& set : out) {
    for (auto& e : set.entities) {
      const auto it = map.find(text::normalize_surface(e.surface));
      if (it == map.end()) continue;
      if (taxonomy.prune_to_top_level(e.label) != it->second) {
        e.label = it->second;
        ++applied;
      }
    }
  }
  if (fixes) *fixes = applied;
  return out;
}

std::vector<ResampledCopy> resample_overlaps(std::string_view doc_text, const AnnotationSet& set) {
  std::vector<std::size_t> order(set.entities.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = set.entities[a];
    const auto& y = set.entities[b];
    return x.start != y.start ? x.start < y.start : x.end < y.end;
  });

  // Interval partitioning by start time: opening a copy only when all
  // existing copies are busy yields exactly max-overlap-depth copies.
  std::vector<std::size_t> copy_end;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t idx : order) {
    const auto& e = set.entities[idx];
    std::size_t c = 0;
    while (c < copy_end.size() && copy_end[c] > e.start) ++c;
    if (c == copy_end.size()) {
      copy_end.push_back(0);
      members.emplace_back();
    }
    copy_end[c] = e.end;
    members[c].push_back(idx);
  }
  if (members.empty()) members.emplace_back();

  std::vector<ResampledCopy> copies;
  copies.reserve(members.size());
  for (const auto& m : members) {
    ResampledCopy copy;
    copy.text = std::string(doc_text);
    copy.annotations.publication_id = set.publication_id;
    for (std::size_t idx : m) copy.annotations.entities.push_back(set.entities[idx]);
    copies.push_back(std::move(copy));
  }
  if (copies.size() == 1 && !set.entities.empty()) copies.front().annotations.entities = set.entities;
  return copies;
}

}  // namespace litgraph::annotations
