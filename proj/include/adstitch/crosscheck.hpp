#pragma once

#include <string>
#include <utility>
#include <vector>

#include "adstitch/types.hpp"

namespace adstitch {

// A sensitive claim template. Literal segments alternate with number
// wildcards; "50% off" and "<NUM>% off" both compile, the latter binding any
// number written at that spot.
struct PhrasePattern {
  std::string pattern;  // original, for reporting
  struct Segment {
    bool is_number = false;
    std::string literal;  // folded, whitespace-normalized; empty for wildcards
  };
  std::vector<Segment> segments;
};

struct RuleSet {
  std::vector<PhrasePattern> phrases;
  std::vector<std::string> brands;  // original casing, matched case-folded
  bool domain_check_enabled = true;
};

PhrasePattern compile_phrase(const std::string& raw);

// INI-ish rules file: [phrases] and [brands] list one entry per line,
// [options] holds domain_check=on|off. '#' starts a comment line.
RuleSet load_rules(const std::string& path);

enum class CheckRule { Phrase, Brand, Domain };

const char* to_string(CheckRule rule);

struct Violation {
  CheckRule rule = CheckRule::Phrase;
  std::string span;  // the offending asset substring (or brand / domain token)
};

struct CheckVerdict {
  bool passed = true;
  std::vector<Violation> violations;
};

// Every occurrence of a sensitive phrase in the asset, numbers bound, must
// appear verbatim in the page text. Numbers must match exactly.
CheckVerdict phrase_check(const AdAsset& asset, const LandingPage& page,
                          const RuleSet& rules);

// Every brand mention (longest lexicon match at token boundaries) must be
// supported by the page text or the page URL.
CheckVerdict brand_check(const AdAsset& asset, const LandingPage& page,
                         const RuleSet& rules);

// Every domain-shaped token must be the page's domain or a subdomain of it.
CheckVerdict domain_check(const AdAsset& asset, const LandingPage& page);

CheckVerdict check_asset(const AdAsset& asset, const LandingPage& page,
                         const RuleSet& rules);

struct FilterResult {
  AssetCatalog kept;
  std::vector<std::pair<AdAsset, CheckVerdict>> rejected;
};

// Runs phrase, brand, domain in that order per asset; first failing check
// decides the reported verdict. Throws if an entry's page is missing.
FilterResult filter_catalog(const AssetCatalog& catalog,
                            const std::vector<LandingPage>& pages,
                            const RuleSet& rules);

}  // namespace adstitch
