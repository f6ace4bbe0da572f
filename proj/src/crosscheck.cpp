#include "adstitch/crosscheck.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "adstitch/text.hpp"

namespace adstitch {

namespace {

std::string fold_norm(const std::string& s) { return case_fold(normalize(s)); }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Length of a number literal at i: digits with at most one interior decimal
// point. Zero if none.
std::size_t match_number(const std::string& text, std::size_t i) {
  std::size_t j = i;
  while (j < text.size() && is_digit(text[j])) ++j;
  if (j == i) return 0;
  if (j + 1 < text.size() && text[j] == '.' && is_digit(text[j + 1])) {
    ++j;
    while (j < text.size() && is_digit(text[j])) ++j;
  }
  return j - i;
}

bool wordish(char c) { return is_word_byte(static_cast<unsigned char>(c)); }

bool starts_wordish(const PhrasePattern& p) {
  const auto& s = p.segments.front();
  return s.is_number || (!s.literal.empty() && wordish(s.literal.front()));
}

bool ends_wordish(const PhrasePattern& p) {
  const auto& s = p.segments.back();
  return s.is_number || (!s.literal.empty() && wordish(s.literal.back()));
}

// Matches the full segment list at `pos`; returns one past the end, or npos.
std::size_t try_match(const std::string& text, std::size_t pos,
                      const PhrasePattern& p) {
  std::size_t i = pos;
  for (const auto& seg : p.segments) {
    if (seg.is_number) {
      std::size_t len = match_number(text, i);
      if (len == 0) return std::string::npos;
      i += len;
    } else {
      if (text.compare(i, seg.literal.size(), seg.literal) != 0) {
        return std::string::npos;
      }
      i += seg.literal.size();
    }
  }
  return i;
}

std::vector<std::pair<std::size_t, std::size_t>> find_occurrences(
    const std::string& text, const PhrasePattern& p) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  bool sw = starts_wordish(p);
  bool ew = ends_wordish(p);
  std::size_t i = 0;
  while (i < text.size()) {
    if (sw && i > 0 && wordish(text[i - 1])) {
      ++i;
      continue;
    }
    std::size_t end = try_match(text, i, p);
    if (end != std::string::npos &&
        (!ew || end == text.size() || !wordish(text[end]))) {
      out.emplace_back(i, end);
      i = end;
      continue;
    }
    ++i;
  }
  return out;
}

bool contains_at_boundary(const std::string& haystack, const std::string& needle,
                          bool sw, bool ew) {
  if (needle.empty()) return false;
  std::size_t i = 0;
  while ((i = haystack.find(needle, i)) != std::string::npos) {
    bool left_ok = !sw || i == 0 || !wordish(haystack[i - 1]);
    std::size_t end = i + needle.size();
    bool right_ok = !ew || end == haystack.size() || !wordish(haystack[end]);
    if (left_ok && right_ok) return true;
    ++i;
  }
  return false;
}

std::string alnum_only(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

const std::unordered_set<std::string>& tld_set() {
  static const std::unordered_set<std::string> tlds = {
      "com",  "net",  "org",   "io",     "co",   "us",   "uk",  "de",  "fr",
      "es",   "it",   "nl",    "ca",     "au",   "in",   "jp",  "br",  "shop",
      "store", "online", "biz", "info",  "edu",  "gov",  "ai",  "app", "dev",
      "me",   "tv",   "cc",    "xyz"};
  return tlds;
}

bool looks_like_domain(const std::string& token) {
  if (token.find('.') == std::string::npos) return false;
  std::vector<std::string> labels;
  std::string cur;
  for (char c : token) {
    if (c == '.') {
      labels.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  labels.push_back(cur);
  if (labels.size() < 2) return false;
  for (const auto& label : labels) {
    if (label.empty() || label.front() == '-' || label.back() == '-') return false;
    for (char c : label) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') return false;
    }
  }
  const std::string& tld = labels.back();
  for (char c : tld) {
    if (!std::isalpha(static_cast<unsigned char>(c))) return false;
  }
  return tld_set().count(tld) > 0;
}

void add_violation(CheckVerdict& verdict, CheckRule rule, const std::string& span,
                   std::set<std::string>& seen) {
  if (!seen.insert(span).second) return;
  verdict.passed = false;
  verdict.violations.push_back({rule, span});
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

PhrasePattern compile_phrase(const std::string& raw) {
  PhrasePattern p;
  p.pattern = raw;
  std::string folded = fold_norm(raw);
  if (folded.empty()) throw std::invalid_argument("empty phrase pattern");
  static const std::string kNum = "<num>";
  std::size_t i = 0;
  while (i < folded.size()) {
    std::size_t at = folded.find(kNum, i);
    if (at == std::string::npos) {
      p.segments.push_back({false, folded.substr(i)});
      break;
    }
    if (at > i) p.segments.push_back({false, folded.substr(i, at - i)});
    p.segments.push_back({true, ""});
    i = at + kNum.size();
  }
  if (p.segments.empty()) throw std::invalid_argument("empty phrase pattern");
  return p;
}

RuleSet load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rules file " + path);
  RuleSet rules;
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = case_fold(trim(t.substr(1, t.size() - 2)));
      if (section != "phrases" && section != "brands" && section != "options") {
        throw std::runtime_error(path + " line " + std::to_string(line_no) +
                                 ": unknown section [" + section + "]");
      }
      continue;
    }
    if (section == "phrases") {
      rules.phrases.push_back(compile_phrase(t));
    } else if (section == "brands") {
      rules.brands.push_back(t);
    } else if (section == "options") {
      std::size_t eq = t.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error(path + " line " + std::to_string(line_no) +
                                 ": expected key=value");
      }
      std::string key = case_fold(trim(t.substr(0, eq)));
      std::string value = case_fold(trim(t.substr(eq + 1)));
      if (key == "domain_check") {
        if (value == "on" || value == "true" || value == "1") {
          rules.domain_check_enabled = true;
        } else if (value == "off" || value == "false" || value == "0") {
          rules.domain_check_enabled = false;
        } else {
          throw std::runtime_error(path + " line " + std::to_string(line_no) +
                                   ": bad domain_check value \"" + value + "\"");
        }
      } else {
        throw std::runtime_error(path + " line " + std::to_string(line_no) +
                                 ": unknown option \"" + key + "\"");
      }
    } else {
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": content before any section header");
    }
  }
  return rules;
}

const char* to_string(CheckRule rule) {
  switch (rule) {
    case CheckRule::Phrase: return "phrase";
    case CheckRule::Brand: return "brand";
    case CheckRule::Domain: return "domain";
  }
  return "unknown";
}

CheckVerdict phrase_check(const AdAsset& asset, const LandingPage& page,
                          const RuleSet& rules) {
  CheckVerdict verdict;
  std::set<std::string> seen;
  std::string atext = fold_norm(asset.text);
  std::string ptext = fold_norm(page.full_text);
  for (const auto& pattern : rules.phrases) {
    for (auto [b, e] : find_occurrences(atext, pattern)) {
      std::string span = atext.substr(b, e - b);
      if (!contains_at_boundary(ptext, span, starts_wordish(pattern),
                                ends_wordish(pattern))) {
        add_violation(verdict, CheckRule::Phrase, span, seen);
      }
    }
  }
  return verdict;
}

CheckVerdict brand_check(const AdAsset& asset, const LandingPage& page,
                         const RuleSet& rules) {
  CheckVerdict verdict;
  std::set<std::string> seen;
  if (rules.brands.empty()) return verdict;

  struct Entry {
    std::string folded;
    const std::string* original;
  };
  std::vector<Entry> entries;
  entries.reserve(rules.brands.size());
  for (const auto& b : rules.brands) {
    std::string folded = fold_norm(b);
    if (!folded.empty()) entries.push_back({std::move(folded), &b});
  }
  // longest first so "acme pro" wins over "acme" at the same spot
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) {
                     return a.folded.size() > b.folded.size();
                   });

  std::string atext = fold_norm(asset.text);
  std::string ptext = fold_norm(page.full_text);
  std::string url_folded = case_fold(page.url);
  std::string url_squashed = alnum_only(url_folded);

  std::size_t i = 0;
  while (i < atext.size()) {
    if (i > 0 && wordish(atext[i - 1]) && wordish(atext[i])) {
      ++i;
      continue;
    }
    const Entry* hit = nullptr;
    for (const auto& entry : entries) {
      if (atext.compare(i, entry.folded.size(), entry.folded) != 0) continue;
      std::size_t end = i + entry.folded.size();
      if (end < atext.size() && wordish(atext[end - 1]) && wordish(atext[end])) {
        continue;
      }
      hit = &entry;
      break;
    }
    if (!hit) {
      ++i;
      continue;
    }
    bool in_text = contains_at_boundary(ptext, hit->folded,
                                        wordish(hit->folded.front()),
                                        wordish(hit->folded.back()));
    bool in_url = false;
    if (!in_text) {
      std::string squashed = alnum_only(hit->folded);
      in_url = !squashed.empty() && (url_folded.find(hit->folded) != std::string::npos ||
                                     url_squashed.find(squashed) != std::string::npos);
    }
    if (!in_text && !in_url) {
      add_violation(verdict, CheckRule::Brand, *hit->original, seen);
    }
    i += hit->folded.size();
  }
  return verdict;
}

CheckVerdict domain_check(const AdAsset& asset, const LandingPage& page) {
  CheckVerdict verdict;
  std::set<std::string> seen;
  std::string atext = fold_norm(asset.text);
  std::size_t i = 0;
  auto run_byte = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-';
  };
  while (i < atext.size()) {
    if (!run_byte(atext[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < atext.size() && run_byte(atext[j])) ++j;
    std::string token = atext.substr(i, j - i);
    i = j;
    std::size_t b = 0, e = token.size();
    while (b < e && (token[b] == '.' || token[b] == '-')) ++b;
    while (e > b && (token[e - 1] == '.' || token[e - 1] == '-')) --e;
    token = token.substr(b, e - b);
    if (!looks_like_domain(token)) continue;
    if (!domain_matches_host(page.domain, token)) {
      add_violation(verdict, CheckRule::Domain, token, seen);
    }
  }
  return verdict;
}

CheckVerdict check_asset(const AdAsset& asset, const LandingPage& page,
                         const RuleSet& rules) {
  CheckVerdict verdict = phrase_check(asset, page, rules);
  if (!verdict.passed) return verdict;
  verdict = brand_check(asset, page, rules);
  if (!verdict.passed) return verdict;
  if (rules.domain_check_enabled) {
    verdict = domain_check(asset, page);
    if (!verdict.passed) return verdict;
  }
  return CheckVerdict{};
}

FilterResult filter_catalog(const AssetCatalog& catalog,
                            const std::vector<LandingPage>& pages,
                            const RuleSet& rules) {
  std::unordered_map<std::string, const LandingPage*> by_url;
  for (const auto& p : pages) by_url.emplace(p.url, &p);

  FilterResult result;
  for (const auto& [url, entry] : catalog) {
    auto it = by_url.find(url);
    if (it == by_url.end()) {
      throw std::runtime_error("no page record for " + url);
    }
    const LandingPage& page = *it->second;
    auto place = [&](const AdAsset& asset) {
      CheckVerdict verdict = check_asset(asset, page, rules);
      if (verdict.passed) {
        auto& dest = result.kept[url];
        (asset.kind == AssetKind::Title ? dest.titles : dest.descriptions)
            .push_back(asset);
      } else {
        result.rejected.emplace_back(asset, std::move(verdict));
      }
    };
    for (const auto& a : entry.titles) place(a);
    for (const auto& a : entry.descriptions) place(a);
  }
  return result;
}

}  // namespace adstitch
