#pragma once

#include <string>
#include <vector>

#include "adstitch/types.hpp"

namespace adstitch {

// Pre-assembled creative copy: split into individual assets on load so the
// rest of the pipeline only ever sees single title/description units.
struct AdCopyRecord {
  std::string page_url;
  std::vector<std::string> titles;        // 1..3
  std::vector<std::string> descriptions;  // 1..2
};

std::string make_asset_id(const std::string& page_url, AssetKind kind,
                          std::size_t index, const std::string& text);

// Longest prefix that ends on a word boundary and fits max_chars code points.
// Empty result means not even the first word fits.
std::string truncate_at_word(const std::string& normalized, std::size_t max_chars);

// Prefers the last full sentence that fits; falls back to word truncation.
std::string truncate_at_sentence(const std::string& normalized, std::size_t max_chars);

// Title candidates from page title + headings, description candidates from
// snippets. Deduplicates on case-folded normalized text.
std::vector<AdAsset> extract_assets(const LandingPage& page, const SystemConfig& config);

// Verbatim split; throws std::invalid_argument on count or blank-text violations.
std::vector<AdAsset> split_adcopy(const AdCopyRecord& record);

struct LoadResult {
  std::vector<LandingPage> pages;
  AssetCatalog catalog;
  std::vector<std::string> warnings;  // dropped lines, unknown pages
};

// Line-delimited JSON readers. Asset lines carry "format": "asset" | "adcopy"
// (absent means "asset"). Assets pointing at unknown pages are dropped with a
// warning; malformed lines throw with file and line number.
LoadResult load_catalog(const std::string& pages_path, const std::string& assets_path);

std::vector<LandingPage> load_pages(const std::string& pages_path);

}  // namespace adstitch
