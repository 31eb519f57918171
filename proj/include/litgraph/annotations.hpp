#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "litgraph/taxonomy.hpp"
#include "litgraph/text.hpp"

namespace litgraph::annotations {

/// A labeled span over a document, in Unicode scalar-value offsets.
struct EntityAnnotation {
  std::string ann_id;
  std::string label;
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive
  std::string surface;

  bool operator==(const EntityAnnotation&) const = default;
};

struct AnnotationSet {
  std::string publication_id;
  std::vector<EntityAnnotation> entities;
  /// Non-entity lines (relations, events, notes) skipped while parsing.
  std::size_t ignored_lines = 0;

  bool operator==(const AnnotationSet&) const = default;
};

/// Parses brat standoff `T` lines. Offsets are checked against `doc_text`
/// and the surface must equal the covered substring. Discontinuous spans
/// are rejected.
AnnotationSet parse_standoff(std::string_view ann_text, std::string_view doc_text,
                             std::string publication_id = {});

/// One `T` line per entity, in stored order, each terminated by '\n'.
std::string serialize_standoff(const AnnotationSet& set);

/// True when two annotations share at least one character.
bool overlaps(const EntityAnnotation& a, const EntityAnnotation& b) noexcept;
bool has_overlaps(const AnnotationSet& set);

struct BioToken {
  std::string token;
  std::string tag;
  bool operator==(const BioToken&) const = default;
};
using BioSentence = std::vector<BioToken>;
using Tokenizer = std::function<std::vector<text::Span>(std::u32string_view)>;

/// Converts one document into BIO-tagged sentences (one per non-blank
/// line). Labels are pruned to the top level. A token partially covered by
/// an annotation takes the annotation's tag. Throws PreconditionError for
/// overlapping annotations or two annotations that land on one token.
std::vector<BioSentence> to_bio(std::string_view doc_text, const AnnotationSet& set,
                                const taxonomy::Taxonomy& taxonomy,
                                const Tokenizer& tokenizer = text::bio_tokens);

/// Two-column `token<TAB>tag` lines, blank line after each sentence. A
/// `-DOCSTART-<TAB><id>` header precedes each document when `doc_id` is set.
void write_bio(std::ostream& out, const std::vector<BioSentence>& sentences,
               std::string_view doc_id = {});

/// Normalized surface -> canonical top-level label, for surfaces whose label
/// must not depend on context.
using ContextFreeMap = std::map<std::string, std::string>;

/// Normalizes keys and checks every label against the taxonomy (pruned to
/// top level). Throws ValidationError.
ContextFreeMap build_context_free_map(const std::vector<text::TableRow>& rows,
                                      const taxonomy::Taxonomy& taxonomy);

struct SurfaceConflict {
  std::string surface;
  std::string canonical;                      // empty for advisories
  std::map<std::string, std::size_t> counts;  // label -> occurrences
};

struct ConsistencyReport {
  /// Mapped surfaces seen with a label other than the canonical one. The
  /// canonical label is always listed, with count 0 if never used.
  std::vector<SurfaceConflict> conflicts;
  /// Unmapped surfaces seen with two or more labels; report-only.
  std::vector<SurfaceConflict> advisories;
  std::size_t canonical_fixes_applied = 0;
};

ConsistencyReport check_consistency(const std::vector<AnnotationSet>& corpus, const ContextFreeMap& map,
                                    const taxonomy::Taxonomy& taxonomy);

/// Relabels mapped surfaces whose pruned label differs from the canonical
/// one. `fixes`, when given, receives the number of relabeled entities.
std::vector<AnnotationSet> apply_canonical_labels(const std::vector<AnnotationSet>& corpus,
                                                  const ContextFreeMap& map,
                                                  const taxonomy::Taxonomy& taxonomy,
                                                  std::size_t* fixes = nullptr);

struct ResampledCopy {
  std::string text;
  AnnotationSet annotations;
};

/// Splits stacked annotations into document copies with pairwise
/// non-overlapping annotations, using as many copies as the maximum
/// overlap depth (at least one).
std::vector<ResampledCopy> resample_overlaps(std::string_view doc_text, const AnnotationSet& set);

}  // namespace litgraph::annotations
