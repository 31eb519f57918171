#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace litgraph::text {

/// Decodes UTF-8 into Unicode scalar values. Throws ParseError on
/// malformed input.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view codepoints);

bool is_space(char32_t c) noexcept;
bool is_punct(char32_t c) noexcept;
/// Hyphen, underscore and the Unicode dash family.
bool is_joiner(char32_t c) noexcept;

/// Simple case folding (ASCII, Latin-1, Greek and Cyrillic capitals).
char32_t fold_case(char32_t c) noexcept;

/// Canonical lookup key for a surface form: case-folded, hyphens and
/// underscores mapped to spaces, whitespace collapsed, outer punctuation
/// stripped.
std::string normalize_surface(std::string_view surface);

/// Half-open range of codepoint offsets.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

/// Word tokens: split on whitespace and joiners, outer punctuation
/// trimmed, empty tokens dropped.
std::vector<Span> word_tokens(std::u32string_view text);

/// BIO tokens: split on whitespace, joiners become tokens of their own
/// and so do leading and trailing punctuation characters of each piece.
/// Every word_tokens() boundary is also a bio_tokens() boundary.
std::vector<Span> bio_tokens(std::u32string_view text);

/// Filename stem for a publication id. Ids made of [A-Za-z0-9._-] pass
/// through; anything else is percent-encoded.
std::string file_stem(std::string_view id);
std::string from_file_stem(std::string_view stem);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// One entry of a two-column tab-separated table.
struct TableRow {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Parses `<key><TAB><value>` lines. Blank lines and `#` comments are
/// skipped. A line without a tab is a ParseError.
std::vector<TableRow> parse_two_column(std::string_view contents);
std::vector<TableRow> read_two_column(const std::filesystem::path& path);

/// Non-empty, trimmed lines with `#` comments removed.
std::vector<std::string> read_list(const std::filesystem::path& path);

std::string trim(std::string_view s);

}  // namespace litgraph::text

namespace litgraph::text {

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view value);

/// printf("%.10g") rendering used by every metric CSV.
std::string format_number(double value);

}  // namespace litgraph::text
