#include "adstitch/ingest.hpp"

#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "adstitch/hash.hpp"
#include "adstitch/records.hpp"
#include "adstitch/text.hpp"

namespace adstitch {

std::string make_asset_id(const std::string& page_url, AssetKind kind,
                          std::size_t index, const std::string& text) {
  std::string payload = page_url;
  payload += '|';
  payload += to_string(kind);
  payload += '|';
  payload += std::to_string(index);
  payload += '|';
  payload += hex64(fnv1a64(text));
  char prefix = kind == AssetKind::Title ? 't' : 'd';
  return std::string(1, prefix) + "-" + hex64(fnv1a64(payload));
}

namespace {

// Byte offsets where a cut keeps only whole words: position right before a
// space run, or end of string.
std::string cut_to_boundary(const std::string& s, std::size_t max_chars) {
  std::size_t chars = 0;
  std::size_t best_cut = 0;  // byte offset
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == ' ') {
      best_cut = i;
      ++i;
      ++chars;
      continue;
    }
    // one code point: count the lead byte only
    std::size_t j = i + 1;
    while (j < s.size() && (static_cast<unsigned char>(s[j]) & 0xc0) == 0x80) ++j;
    ++chars;
    if (chars > max_chars) {
      if (best_cut == 0) return std::string();
      std::string out = s.substr(0, best_cut);
      while (!out.empty() &&
             !is_word_byte(static_cast<unsigned char>(out.back())) &&
             static_cast<unsigned char>(out.back()) < 0x80) {
        out.pop_back();
      }
      return out;
    }
    i = j;
  }
  return s;
}

}  // namespace

std::string truncate_at_word(const std::string& normalized, std::size_t max_chars) {
  return cut_to_boundary(normalized, max_chars);
}

std::string truncate_at_sentence(const std::string& normalized, std::size_t max_chars) {
  if (utf8_length(normalized) <= max_chars) return normalized;
  std::size_t chars = 0;
  std::size_t best_end = std::string::npos;  // byte offset one past '.', '!' or '?'
  for (std::size_t i = 0; i < normalized.size();) {
    std::size_t j = i + 1;
    while (j < normalized.size() &&
           (static_cast<unsigned char>(normalized[j]) & 0xc0) == 0x80) {
      ++j;
    }
    ++chars;
    if (chars > max_chars) break;
    char c = normalized[i];
    if (c == '.' || c == '!' || c == '?') best_end = j;
    i = j;
  }
  if (best_end != std::string::npos) {
    std::string out = normalized.substr(0, best_end);
    while (!out.empty() && out.back() == ' ') out.pop_back();
    if (!out.empty()) return out;
  }
  return truncate_at_word(normalized, max_chars);
}

std::vector<AdAsset> extract_assets(const LandingPage& page, const SystemConfig& config) {
  std::vector<AdAsset> out;
  std::set<std::string> seen;

  auto add = [&](const std::string& raw, AssetKind kind) {
    std::string norm = normalize(raw);
    if (norm.empty()) return;
    std::string text = kind == AssetKind::Title
                           ? truncate_at_word(norm, config.max_title_chars)
                           : truncate_at_sentence(norm, config.max_desc_chars);
    if (text.empty()) return;
    std::string key = to_string(kind) + std::string("|") + case_fold(text);
    if (!seen.insert(key).second) return;
    AdAsset asset;
    asset.page_url = page.url;
    asset.kind = kind;
    asset.text = text;
    asset.source = AssetSource::Extraction;
    asset.id = make_asset_id(page.url, kind, out.size(), text);
    out.push_back(std::move(asset));
  };

  add(page.page_title, AssetKind::Title);
  for (const auto& h : page.visual_headings) add(h, AssetKind::Title);
  for (const auto& s : page.body_snippets) add(s, AssetKind::Description);
  return out;
}

std::vector<AdAsset> split_adcopy(const AdCopyRecord& record) {
  if (record.page_url.empty()) {
    throw std::invalid_argument("adcopy record with empty page_url");
  }
  if (record.titles.empty()) {
    throw std::invalid_argument("adcopy record for " + record.page_url +
                                " has no titles");
  }
  if (record.titles.size() > 3) {
    throw std::invalid_argument("adcopy record for " + record.page_url +
                                " has more than 3 titles");
  }
  if (record.descriptions.empty()) {
    throw std::invalid_argument("adcopy record for " + record.page_url +
                                " has no descriptions");
  }
  if (record.descriptions.size() > 2) {
    throw std::invalid_argument("adcopy record for " + record.page_url +
                                " has more than 2 descriptions");
  }
  std::vector<AdAsset> out;
  auto emit = [&](const std::string& text, AssetKind kind, std::size_t index) {
    if (normalize(text).empty()) {
      throw std::invalid_argument("adcopy record for " + record.page_url +
                                  " has a blank " + to_string(kind) + " entry");
    }
    AdAsset asset;
    asset.page_url = record.page_url;
    asset.kind = kind;
    asset.text = text;  // verbatim: splitting must lose nothing
    asset.source = AssetSource::Advertiser;
    asset.id = make_asset_id(record.page_url, kind, index, text);
    out.push_back(std::move(asset));
  };
  for (std::size_t i = 0; i < record.titles.size(); ++i) {
    emit(record.titles[i], AssetKind::Title, i);
  }
  for (std::size_t i = 0; i < record.descriptions.size(); ++i) {
    emit(record.descriptions[i], AssetKind::Description, i);
  }
  return out;
}

std::vector<LandingPage> load_pages(const std::string& pages_path) {
  std::vector<LandingPage> pages;
  std::unordered_set<std::string> urls;
  read_jsonl(pages_path, [&](std::size_t, const Json& j) {
    LandingPage page = page_from_json(j);
    if (!urls.insert(page.url).second) {
      throw std::runtime_error("duplicate page url " + page.url);
    }
    pages.push_back(std::move(page));
  });
  return pages;
}

LoadResult load_catalog(const std::string& pages_path, const std::string& assets_path) {
  LoadResult result;
  result.pages = load_pages(pages_path);

  std::unordered_set<std::string> known;
  for (const auto& p : result.pages) known.insert(p.url);

  auto place = [&](AdAsset asset, std::size_t line_no) {
    if (!known.count(asset.page_url)) {
      result.warnings.push_back(assets_path + " line " + std::to_string(line_no) +
                                ": unknown page_url " + asset.page_url +
                                ", asset dropped");
      return;
    }
    if (asset.id.empty()) {
      auto& entry = result.catalog[asset.page_url];
      std::size_t index = entry.titles.size() + entry.descriptions.size();
      asset.id = make_asset_id(asset.page_url, asset.kind, index, asset.text);
    }
    auto& entry = result.catalog[asset.page_url];
    if (asset.kind == AssetKind::Title) {
      entry.titles.push_back(std::move(asset));
    } else {
      entry.descriptions.push_back(std::move(asset));
    }
  };

  read_jsonl(assets_path, [&](std::size_t line_no, const Json& j) {
    std::string format = "asset";
    if (auto it = j.find("format"); it != j.end() && it->is_string()) {
      format = it->get<std::string>();
    } else if (j.contains("titles") || j.contains("descriptions")) {
      format = "adcopy";
    }
    if (format == "asset") {
      place(asset_from_json(j), line_no);
    } else if (format == "adcopy") {
      for (auto& asset : split_adcopy(adcopy_from_json(j))) {
        place(std::move(asset), line_no);
      }
    } else {
      throw std::runtime_error("unknown record format \"" + format + "\"");
    }
  });
  return result;
}

}  // namespace adstitch
