#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adstitch/text.hpp"

namespace adstitch {

// A parsed advertiser page. Pages arrive pre-parsed; no HTML handling here.
struct LandingPage {
  std::string url;
  std::string domain;
  std::string page_title;
  std::vector<std::string> visual_headings;
  std::vector<std::string> body_snippets;
  std::string full_text;
};

enum class AssetKind { Title, Description };
enum class AssetSource { Advertiser, Extraction, Generated, Guided };

const char* to_string(AssetKind k);
const char* to_string(AssetSource s);
std::optional<AssetKind> asset_kind_from(const std::string& s);
std::optional<AssetSource> asset_source_from(const std::string& s);

// One title or description candidate. `category` is carried metadata only;
// it never participates in scoring or selection.
struct AdAsset {
  std::string id;
  std::string page_url;
  AssetKind kind = AssetKind::Title;
  std::string text;
  AssetSource source = AssetSource::Advertiser;
  std::optional<std::string> category;
};

struct CatalogEntry {
  std::vector<AdAsset> titles;
  std::vector<AdAsset> descriptions;
};

// page_url -> asset pools. std::map keeps iteration order deterministic.
using AssetCatalog = std::map<std::string, CatalogEntry>;

std::size_t catalog_size(const AssetCatalog& catalog);

// The composed five-slot ad copy. title1 and desc1 are always present in a
// servable ad; later slots may stay empty when pools run short.
struct StitchedAd {
  std::optional<AdAsset> title1;
  std::optional<AdAsset> title2;
  std::optional<AdAsset> title3;
  std::optional<AdAsset> desc1;
  std::optional<AdAsset> desc2;

  std::vector<const AdAsset*> filled() const;
};

struct Query {
  std::string raw;
  std::vector<std::string> tokens;

  static Query make(std::string_view raw_text) {
    Query q;
    q.raw = std::string(raw_text);
    q.tokens = tokenize(normalize(raw_text));
    return q;
  }
};

enum class LabelSource { AuctionWin, Click };

struct SystemConfig {
  int title_budget = 10;        // T
  int desc_budget = 10;         // D
  int max_title_chars = 30;
  int max_desc_chars = 90;
  int hash_bits = 22;
  double learning_rate = 0.02;
  int batch_size = 1000;
  double dpp_epsilon = 1e-9;    // greedy selection gain floor
  std::uint64_t rng_seed = 42;
  double trial_scale = 4.0;
  LabelSource train_label = LabelSource::Click;

  // Returns human-readable problems; empty means valid.
  std::vector<std::string> validate() const;
};

struct Verdict {
  bool ok = true;
  std::vector<std::string> violations;
};

// Checks the AdAsset invariants: non-empty after normalization, slot length
// limits, non-empty id. Pure; violations are data, not faults.
Verdict validate_asset(const AdAsset& asset, const SystemConfig& config);

}  // namespace adstitch
