#include "litgraph/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "litgraph/error.hpp"
#include "litgraph/text.hpp"

namespace litgraph::density {

std::size_t count_tokens(std::string_view text) { return text::word_tokens(text::decode_utf8(text)).size(); }

Density content_density(std::int64_t n_dlt, std::int64_t n_esg, std::int64_t n_tokens) {
  if (n_tokens <= 0) throw DomainError("content density needs a positive token count");
  if (n_dlt < 0 || n_esg < 0) throw DomainError("entity counts must be non-negative");
  return Density(n_dlt + n_esg, n_tokens);
}

DensityReport make_report(std::string publication_id, std::string_view text,
                          const annotations::AnnotationSet& set, const taxonomy::Taxonomy& taxonomy,
                          CategoryPolicy policy) {
  DensityReport r;
  r.publication_id = std::move(publication_id);
  r.n_tokens = static_cast<std::int64_t>(count_tokens(text));
  if (r.n_tokens == 0) throw DomainError("document '" + r.publication_id + "' has no tokens");
  const auto dlt = taxonomy.dlt_categories(policy.count_miscellaneous);
  const auto esg = taxonomy.esg_category();
  for (const auto& e : set.entities) {
    const std::string& top = taxonomy.prune_to_top_level(e.label);
    if (esg && top == *esg) {
      ++r.n_esg;
    } else if (std::find(dlt.begin(), dlt.end(), top) != dlt.end()) {
      ++r.n_dlt;
    }
  }
  return r;
}

double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw DomainError("percentile of an empty sample");
  if (!(p >= 0 && p <= 100)) throw DomainError("percentile must lie in [0, 100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * p / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

namespace {

double to_double(const Density& d) { return boost::rational_cast<double>(d); }

template <typename Key>
std::vector<const DensityReport*> density_stage(const std::vector<const DensityReport*>& input, double pct,
                                                Key key, StageLog& log) {
  log.input = input.size();
  std::vector<const DensityReport*> kept;
  if (!input.empty()) {
    std::vector<double> values;
    values.reserve(input.size());
    for (const auto* r : input) values.push_back(to_double(key(*r)));
    const double threshold = percentile(values, pct);
    log.threshold = threshold;
    for (std::size_t i = 0; i < input.size(); ++i) {
      if (values[i] > threshold) kept.push_back(input[i]);
    }
  }
  log.retained = kept.size();
  log.excluded = log.input - log.retained;
  return kept;
}

}  // namespace

FilteredCorpus filter_corpus(std::span<const DensityReport> reports, const FilterConfig& config) {
  if (reports.empty()) throw DomainError("cannot filter an empty corpus");
  for (double p : {config.token_floor_pct, config.dlt_pct, config.esg_pct}) {
    if (!(p >= 0 && p <= 100)) throw ConfigError("filter percentiles must lie in [0, 100]");
  }
  std::set<std::string> ids;
  for (const auto& r : reports) {
    if (!ids.insert(r.publication_id).second) {
      throw ValidationError("duplicate density report for '" + r.publication_id + "'");
    }
    if (r.n_tokens <= 0) throw DomainError("report '" + r.publication_id + "' has no tokens");
  }

  FilteredCorpus out;

  StageLog tokens;
  tokens.stage = "token_floor";
  tokens.input = reports.size();
  std::vector<double> counts;
  counts.reserve(reports.size());
  for (const auto& r : reports) counts.push_back(static_cast<double>(r.n_tokens));
  std::vector<const DensityReport*> stage1;
  if (!counts.empty()) {
    const double floor =
        std::max(percentile(counts, config.token_floor_pct), static_cast<double>(config.token_abs_floor));
    tokens.threshold = floor;
    for (const auto& r : reports) {
      if (static_cast<double>(r.n_tokens) >= floor) stage1.push_back(&r);
    }
  }
  tokens.retained = stage1.size();
  tokens.excluded = tokens.input - tokens.retained;
  out.stages.push_back(tokens);

  StageLog dlt;
  dlt.stage = "dlt_density";
  const auto stage2 = density_stage(stage1, config.dlt_pct, [](const DensityReport& r) { return r.dlt(); }, dlt);
  out.stages.push_back(dlt);

  StageLog esg;
  esg.stage = "esg_density";
  const auto stage3 = density_stage(stage2, config.esg_pct, [](const DensityReport& r) { return r.esg(); }, esg);
  out.stages.push_back(esg);

  for (const auto* r : stage3) out.kept.insert(r->publication_id);
  for (const auto& seed : config.seeds) {
    if (ids.contains(seed)) {
      out.kept.insert(seed);
    } else {
      out.absent_seeds.push_back(seed);
    }
  }
  return out;
}

std::string format_density(const Density& d) {
  constexpr int kDigits = 10;
  __int128 scale = 1;
  for (int i = 0; i < kDigits; ++i) scale *= 10;
  const __int128 num = d.numerator();
  const __int128 den = d.denominator();
  const __int128 scaled = (2 * num * scale + den) / (2 * den);  // round half up, num >= 0
  const auto whole = static_cast<long long>(scaled / scale);
  auto frac = static_cast<long long>(scaled % scale);
  std::string digits = std::to_string(frac);
  digits.insert(0, static_cast<std::size_t>(kDigits) - digits.size(), '0');
  return std::to_string(whole) + "." + digits;
}

void write_reports_csv(const std::filesystem::path& path, std::span<const DensityReport> reports) {
  std::ostringstream out;
  out << "id,n_tokens,n_dlt,n_esg,d_dlt,d_esg,d_combined\n";
  for (const auto& r : reports) {
    if (r.publication_id.find_first_of(",\"\n") != std::string::npos) {
      throw ValidationError("publication id '" + r.publication_id + "' cannot be written to CSV");
    }
    out << r.publication_id << ',' << r.n_tokens << ',' << r.n_dlt << ',' << r.n_esg << ','
        << format_density(r.dlt()) << ',' << format_density(r.esg()) << ',' << format_density(r.combined())
        << '\n';
  }
  text::write_file(path, out.str());
}

std::vector<DensityReport> read_reports_csv(const std::filesystem::path& path) {
  std::istringstream in(text::read_file(path));
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || text::trim(line).rfind("id,n_tokens,n_dlt,n_esg", 0) != 0) {
    throw ParseError(path.string() + ": missing density report header", 1);
  }
  std::vector<DensityReport> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(text::trim(line));
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() < 4) throw ParseError(path.string() + ": expected at least 4 columns", line_no);
    DensityReport r;
    r.publication_id = cols[0];
    try {
      r.n_tokens = std::stoll(cols[1]);
      r.n_dlt = std::stoll(cols[2]);
      r.n_esg = std::stoll(cols[3]);
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": invalid count", line_no);
    }
    if (r.n_tokens <= 0 || r.n_dlt < 0 || r.n_esg < 0) {
      throw ParseError(path.string() + ": counts out of range", line_no);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_filtered(const std::filesystem::path& path, const FilteredCorpus& filtered) {
  std::string out;
  for (const auto& id : filtered.kept) out += id + "\n";
  text::write_file(path, out);
}

void write_stage_log_csv(const std::filesystem::path& path, const FilteredCorpus& filtered) {
  std::ostringstream out;
  out << "stage,input,excluded,retained,threshold\n";
  for (const auto& s : filtered.stages) {
    out << s.stage << ',' << s.input << ',' << s.excluded << ',' << s.retained << ',';
    if (s.threshold) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.10g", *s.threshold);
      out << buf;
    }
    out << '\n';
  }
  text::write_file(path, out.str());
}

std::set<std::string> read_id_list(const std::filesystem::path& path) {
  const auto items = text::read_list(path);
  return {items.begin(), items.end()};
}

}  // namespace litgraph::density
