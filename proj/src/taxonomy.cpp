#include "litgraph/taxonomy.hpp"

#include <algorithm>
#include <sstream>

#include "litgraph/error.hpp"

namespace litgraph::taxonomy {

Taxonomy::Taxonomy(std::vector<TaxonomyNode> nodes) : nodes_(std::move(nodes)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.label.empty()) throw ValidationError("empty taxonomy label");
    if (!index_.emplace(n.label, i).second) {
      throw ValidationError("duplicate taxonomy label '" + n.label + "'");
    }
  }
  for (const auto& n : nodes_) {
    if (n.parent && !index_.contains(*n.parent)) {
      throw ValidationError("label '" + n.label + "' has missing parent '" + *n.parent + "'");
    }
  }

  // Walk each parent chain; a chain longer than the node count is a cycle.
  root_of_.assign(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    std::size_t cur = i;
    int depth = 0;
    while (nodes_[cur].parent) {
      cur = index_.find(*nodes_[cur].parent)->second;
      if (++depth > static_cast<int>(nodes_.size())) {
        throw ValidationError("cycle in taxonomy through label '" + nodes_[i].label + "'");
      }
    }
    root_of_[i] = cur;
    nodes_[i].depth = depth;
    if (depth == 0) top_level_.push_back(nodes_[i].label);
  }
}

Taxonomy Taxonomy::parse(std::string_view contents) {
  std::vector<TaxonomyNode> nodes;
  std::vector<std::string> stack;  // current ancestor chain
  std::istringstream in{std::string(contents)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;

    std::size_t indent = 0;
    while (indent < line.size() && line[indent] == ' ') ++indent;
    if (indent < line.size() && line[indent] == '\t') {
      throw ParseError("tabs are not allowed in indentation", line_no);
    }
    if (indent % 2 != 0) throw ParseError("indentation must be a multiple of two spaces", line_no);

    TaxonomyNode node;
    const auto bar = trimmed.find(" | ");
    node.label = text::trim(trimmed.substr(0, bar));
    if (bar != std::string::npos) node.description = text::trim(trimmed.substr(bar + 3));
    if (node.label.find_first_of(" \t") != std::string::npos) {
      throw ParseError("label '" + node.label + "' contains whitespace", line_no);
    }

    const std::size_t depth = indent / 2;
    if (depth > stack.size()) {
      throw ValidationError("label '" + node.label + "' (line " + std::to_string(line_no) +
                            ") has no parent at depth " + std::to_string(depth - 1));
    }
    stack.resize(depth);
    if (depth > 0) node.parent = stack.back();
    stack.push_back(node.label);
    nodes.push_back(std::move(node));
  }
  return Taxonomy(std::move(nodes));
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) { return parse(text::read_file(path)); }

Taxonomy Taxonomy::shipped() { return load(data_path("taxonomy.txt")); }

bool Taxonomy::contains(std::string_view label) const { return index_.find(label) != index_.end(); }

const TaxonomyNode& Taxonomy::node(std::string_view label) const {
  const auto it = index_.find(label);
  if (it == index_.end()) throw LookupError("unknown taxonomy label '" + std::string(label) + "'");
  return nodes_[it->second];
}

bool Taxonomy::is_top_level(std::string_view label) const {
  const auto it = index_.find(label);
  return it != index_.end() && !nodes_[it->second].parent;
}

const std::string& Taxonomy::prune_to_top_level(std::string_view label) const {
  const auto it = index_.find(label);
  if (it == index_.end()) throw LookupError("unknown taxonomy label '" + std::string(label) + "'");
  return nodes_[root_of_[it->second]].label;
}

std::vector<std::string> Taxonomy::dlt_categories(bool count_miscellaneous) const {
  std::vector<std::string> out;
  for (const auto& label : top_level_) {
    if (label == kEsgCategory) continue;
    if (label == kMiscellaneousCategory && !count_miscellaneous) continue;
    out.push_back(label);
  }
  return out;
}

std::optional<std::string> Taxonomy::esg_category() const {
  if (is_top_level(kEsgCategory)) return std::string(kEsgCategory);
  return std::nullopt;
}

Gazetteer build_gazetteer(const Taxonomy& taxonomy, const std::vector<text::TableRow>& aliases) {
  Gazetteer g;
  for (const auto& row : aliases) {
    if (!taxonomy.contains(row.value)) {
      throw ValidationError("alias '" + row.key + "' (line " + std::to_string(row.line) +
                            ") points at unknown label '" + row.value + "'");
    }
    std::string key = text::normalize_surface(row.key);
    if (key.empty()) {
      throw ValidationError("alias on line " + std::to_string(row.line) + " normalizes to an empty key");
    }
    const std::string& label = taxonomy.prune_to_top_level(row.value);
    const auto [it, inserted] = g.entries.emplace(key, label);
    if (!inserted && it->second != label) {
      throw ValidationError("alias '" + key + "' maps to both '" + it->second + "' and '" + label + "'");
    }
    g.max_phrase_len = std::max(g.max_phrase_len, text::word_tokens(text::decode_utf8(key)).size());
  }
  return g;
}

std::filesystem::path data_path(std::string_view file) {
  return std::filesystem::path(LITGRAPH_DATA_DIR) / file;
}

}  // namespace litgraph::taxonomy
