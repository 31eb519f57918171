#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "litgraph/text.hpp"

namespace litgraph::taxonomy {

inline constexpr std::string_view kEsgCategory = "ESG";
inline constexpr std::string_view kMiscellaneousCategory = "Miscellaneous";

struct TaxonomyNode {
  std::string label;
  std::optional<std::string> parent;
  int depth = 0;  // 0 = top-level category
  std::string description;
};

/// Immutable label tree. Construction validates uniqueness, parent
/// existence and acyclicity.
class Taxonomy {
 public:
  /// Accepts nodes in any order; depths are recomputed from parent links.
  explicit Taxonomy(std::vector<TaxonomyNode> nodes);

  /// Indentation format: two spaces per level, optional " | description".
  static Taxonomy parse(std::string_view contents);
  static Taxonomy load(const std::filesystem::path& path);
  /// The tree shipped in data/taxonomy.txt.
  static Taxonomy shipped();

  std::size_t size() const noexcept { return nodes_.size(); }
  bool contains(std::string_view label) const;
  const TaxonomyNode& node(std::string_view label) const;
  const std::vector<std::string>& top_level() const noexcept { return top_level_; }
  bool is_top_level(std::string_view label) const;

  /// The unique depth-0 ancestor of `label`. Throws LookupError.
  const std::string& prune_to_top_level(std::string_view label) const;

  /// Top-level categories counted as DLT content: every category except
  /// ESG, and except Miscellaneous unless `count_miscellaneous`.
  std::vector<std::string> dlt_categories(bool count_miscellaneous = false) const;
  std::optional<std::string> esg_category() const;

  /// Nodes in file order (parents precede children).
  const std::vector<TaxonomyNode>& nodes() const noexcept { return nodes_; }

 private:
  std::vector<TaxonomyNode> nodes_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::string> top_level_;
  std::vector<std::size_t> root_of_;
};

/// Normalized surface form -> top-level label.
struct Gazetteer {
  std::map<std::string, std::string> entries;
  std::size_t max_phrase_len = 0;  // in word tokens
};

/// Keys are normalized with text::normalize_surface and labels pruned to
/// the top level. Unknown labels, empty keys and conflicting duplicates
/// raise ValidationError.
Gazetteer build_gazetteer(const Taxonomy& taxonomy, const std::vector<text::TableRow>& aliases);

/// Default data file locations.
std::filesystem::path data_path(std::string_view file);

}  // namespace litgraph::taxonomy
