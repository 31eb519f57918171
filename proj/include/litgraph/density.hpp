#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "litgraph/annotations.hpp"
#include "litgraph/taxonomy.hpp"

namespace litgraph::density {

/// Exact entity-per-token ratio.
using Density = boost::rational<std::int64_t>;

/// Word tokens of `text` (whitespace and hyphen split, outer punctuation
/// stripped).
std::size_t count_tokens(std::string_view text);

/// (n_dlt + n_esg) / n_tokens. Throws DomainError when n_tokens is 0.
Density content_density(std::int64_t n_dlt, std::int64_t n_esg, std::int64_t n_tokens);

struct DensityReport {
  std::string publication_id;
  std::int64_t n_tokens = 0;
  std::int64_t n_dlt = 0;
  std::int64_t n_esg = 0;

  Density dlt() const { return content_density(n_dlt, 0, n_tokens); }
  Density esg() const { return content_density(0, n_esg, n_tokens); }
  Density combined() const { return content_density(n_dlt, n_esg, n_tokens); }
  bool operator==(const DensityReport&) const = default;
};

struct CategoryPolicy {
  bool count_miscellaneous = false;
};

/// Counts DLT and ESG entities by pruned label. Throws DomainError for a
/// zero-token document.
DensityReport make_report(std::string publication_id, std::string_view text,
                          const annotations::AnnotationSet& set, const taxonomy::Taxonomy& taxonomy,
                          CategoryPolicy policy = {});

/// Linear interpolation between order statistics at index (n-1)*p/100.
/// Throws DomainError for empty input or p outside [0, 100].
double percentile(std::span<const double> values, double p);

struct FilterConfig {
  double token_floor_pct = 10;
  double dlt_pct = 90;
  double esg_pct = 70;
  std::int64_t token_abs_floor = 100;
  std::set<std::string> seeds;
};

struct StageLog {
  std::string stage;
  std::size_t input = 0;
  std::size_t excluded = 0;
  std::size_t retained = 0;
  /// Resolved threshold; absent when the stage had no input.
  std::optional<double> threshold;
  bool operator==(const StageLog&) const = default;
};

struct FilteredCorpus {
  std::set<std::string> kept;
  std::vector<StageLog> stages;
  std::vector<std::string> absent_seeds;
  bool operator==(const FilteredCorpus&) const = default;
};

/// Three percentile stages over prior-stage survivors, then the union with
/// the seeds present among the reports:
///   1. keep n_tokens >= max(P_token_floor_pct(tokens), token_abs_floor)
///   2. keep DLT density > P_dlt_pct(survivor DLT densities)
///   3. keep ESG density > P_esg_pct(survivor ESG densities)
FilteredCorpus filter_corpus(std::span<const DensityReport> reports, const FilterConfig& config);

/// CSV with header `id,n_tokens,n_dlt,n_esg,d_dlt,d_esg,d_combined`.
void write_reports_csv(const std::filesystem::path& path, std::span<const DensityReport> reports);
/// Reads the counts back; density columns are recomputed, not trusted.
std::vector<DensityReport> read_reports_csv(const std::filesystem::path& path);

void write_filtered(const std::filesystem::path& path, const FilteredCorpus& filtered);
void write_stage_log_csv(const std::filesystem::path& path, const FilteredCorpus& filtered);
std::set<std::string> read_id_list(const std::filesystem::path& path);

/// Fixed-precision decimal rendering of a density.
std::string format_density(const Density& d);

}  // namespace litgraph::density
