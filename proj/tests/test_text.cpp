#include <doctest.h>

#include "adstitch/text.hpp"

using namespace adstitch;

TEST_CASE("normalize collapses and trims ASCII whitespace") {
  CHECK(normalize("  Free   Shipping \t Today \n") == "Free Shipping Today");
  CHECK(normalize("") == "");
  CHECK(normalize(" \t\r\n ") == "");
  CHECK(normalize("already clean") == "already clean");
  CHECK(normalize("Čustom  Ščounts") == "Čustom Ščounts");  // non-ASCII kept
}

TEST_CASE("normalize is idempotent") {
  for (const char* s : {"  a  b ", "x", "", "Mixed   CASE  here", "\tta b\r\n"}) {
    std::string once = normalize(s);
    CHECK(normalize(once) == once);
  }
}

TEST_CASE("case_fold lowers ASCII only") {
  CHECK(case_fold("FREE Shipping") == "free shipping");
  CHECK(case_fold("ÀBC") == "Àbc");  // multibyte bytes untouched, ASCII folded
  CHECK(case_fold("a1-B2") == "a1-b2");
}

TEST_CASE("tokenize lowercases and splits on non-word bytes") {
  CHECK(tokenize("Buy Now, Save 20%!") ==
        std::vector<std::string>{"buy", "now", "save", "20"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("...") == std::vector<std::string>{});
  CHECK(tokenize("off-road") == std::vector<std::string>{"off", "road"});
  CHECK(tokenize("shoes  SHOES") == std::vector<std::string>{"shoes", "shoes"});
}

TEST_CASE("utf8_length counts code points") {
  CHECK(utf8_length("hello") == 5);
  CHECK(utf8_length("") == 0);
  CHECK(utf8_length("héllo") == 5);   // é is 2 bytes
  CHECK(utf8_length("日本語") == 3);  // 3 bytes each
}

TEST_CASE("url helpers") {
  CHECK(host_of_url("https://www.Shop.example.com/path?q=1") == "www.shop.example.com");
  CHECK(host_of_url("http://example.com:8080/x") == "example.com");
  CHECK(host_of_url("not a url") == "not a url");  // best effort, no scheme
  CHECK(domain_of_url("https://www.shop.example.com/") == "shop.example.com");
  CHECK(domain_of_url("https://example.com") == "example.com");

  CHECK(domain_matches_host("abc.com", "abc.com"));
  CHECK(domain_matches_host("abc.com", "shop.abc.com"));
  CHECK(domain_matches_host("abc.com", "WWW.ABC.COM"));
  CHECK_FALSE(domain_matches_host("abc.com", "xabc.com"));
  CHECK_FALSE(domain_matches_host("abc.com", "abc.com.evil.net"));
  CHECK_FALSE(domain_matches_host("", "abc.com"));
}
