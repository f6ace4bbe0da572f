#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace adstitch {

// Canonicalizes whitespace: runs of ASCII whitespace collapse to a single
// space, leading/trailing whitespace is stripped. Casing and non-ASCII bytes
// are preserved for display; inputs are assumed to arrive NFC-composed.
std::string normalize(std::string_view text);

// ASCII case-folded copy for matching. Non-ASCII bytes pass through.
std::string case_fold(std::string_view text);

// Lowercase word tokens. Token characters are ASCII alphanumerics plus any
// non-ASCII byte; everything else separates tokens and is dropped.
std::vector<std::string> tokenize(std::string_view text);

// Number of UTF-8 code points (display length for slot limits).
std::size_t utf8_length(std::string_view text);

bool is_word_byte(unsigned char c);

// Host of an absolute URL, lowercased, port stripped. Empty if unparseable.
std::string host_of_url(std::string_view url);

// Host with a leading "www." removed; the stratification key for sampling.
std::string domain_of_url(std::string_view url);

// True if `domain` equals `host` or is a dot-boundary suffix of it
// ("abc.com" matches "shop.abc.com" but not "xabc.com"). Case-insensitive.
bool domain_matches_host(std::string_view domain, std::string_view host);

}  // namespace adstitch
