#include "adstitch/types.hpp"

namespace adstitch {

const char* to_string(AssetKind k) {
  return k == AssetKind::Title ? "Title" : "Description";
}

const char* to_string(AssetSource s) {
  switch (s) {
    case AssetSource::Advertiser: return "Advertiser";
    case AssetSource::Extraction: return "Extraction";
    case AssetSource::Generated: return "Generated";
    case AssetSource::Guided: return "Guided";
  }
  return "Advertiser";
}

std::optional<AssetKind> asset_kind_from(const std::string& s) {
  if (s == "Title") return AssetKind::Title;
  if (s == "Description") return AssetKind::Description;
  return std::nullopt;
}

std::optional<AssetSource> asset_source_from(const std::string& s) {
  if (s == "Advertiser") return AssetSource::Advertiser;
  if (s == "Extraction") return AssetSource::Extraction;
  if (s == "Generated") return AssetSource::Generated;
  if (s == "Guided") return AssetSource::Guided;
  return std::nullopt;
}

std::size_t catalog_size(const AssetCatalog& catalog) {
  std::size_t n = 0;
  for (const auto& [url, entry] : catalog) {
    n += entry.titles.size() + entry.descriptions.size();
  }
  return n;
}

std::vector<const AdAsset*> StitchedAd::filled() const {
  std::vector<const AdAsset*> out;
  for (const auto* slot : {&title1, &title2, &title3, &desc1, &desc2}) {
    if (slot->has_value()) out.push_back(&**slot);
  }
  return out;
}

std::vector<std::string> SystemConfig::validate() const {
  std::vector<std::string> problems;
  if (title_budget < 1) problems.push_back("title_budget must be positive");
  if (desc_budget < 1) problems.push_back("desc_budget must be positive");
  if (max_title_chars < 1) problems.push_back("max_title_chars must be positive");
  if (max_desc_chars < 1) problems.push_back("max_desc_chars must be positive");
  // upper bound matches what featurize and ModelBank::make accept
  if (hash_bits < 16 || hash_bits > 30) problems.push_back("hash_bits must be in [16, 30]");
  if (learning_rate <= 0) problems.push_back("learning_rate must be positive");
  if (batch_size < 1) problems.push_back("batch_size must be positive");
  if (dpp_epsilon <= 0) problems.push_back("dpp_epsilon must be positive");
  if (trial_scale <= 0) problems.push_back("trial_scale must be positive");
  return problems;
}

Verdict validate_asset(const AdAsset& asset, const SystemConfig& config) {
  Verdict v;
  auto fail = [&v](std::string msg) {
    v.ok = false;
    v.violations.push_back(std::move(msg));
  };
  if (asset.id.empty()) fail("empty id");
  std::string norm = normalize(asset.text);
  if (norm.empty()) {
    fail("empty text");
    return v;
  }
  std::size_t len = utf8_length(norm);
  if (asset.kind == AssetKind::Title && len > static_cast<std::size_t>(config.max_title_chars)) {
    fail("title too long");
  }
  if (asset.kind == AssetKind::Description &&
      len > static_cast<std::size_t>(config.max_desc_chars)) {
    fail("description too long");
  }
  return v;
}

}  // namespace adstitch
