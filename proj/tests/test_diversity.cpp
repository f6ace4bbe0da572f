#include <doctest.h>

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "adstitch/diversity.hpp"
#include "adstitch/text.hpp"

using namespace adstitch;
using doctest::Approx;

namespace {

TokenSeq tok(const std::string& s) { return tokenize(s); }

std::vector<std::string> load_corpus() {
  std::string path = std::string(TEST_DATA_DIR) + "/bleu_corpus.txt";
  std::ifstream in(path);
  REQUIRE_MESSAGE(static_cast<bool>(in), "missing " << path);
  std::vector<std::string> texts;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) texts.push_back(line);
  }
  return texts;
}

}  // namespace

TEST_CASE("ngram_counts tracks multiplicity per order") {
  auto uni = ngram_counts(tok("a b a"), 1);
  CHECK(uni.at("a") == 2);
  CHECK(uni.at("b") == 1);
  auto bi = ngram_counts(tok("a b a"), 2);
  CHECK(bi.size() == 2);
  CHECK(bi.at(std::string("a") + '\x1f' + "b") == 1);
  CHECK(ngram_counts(tok("a b a"), 5).empty());
  CHECK_THROWS(ngram_counts(tok("a"), 0));
}

TEST_CASE("identical candidate and reference score exactly one") {
  TokenSeq s = tok("the quick brown fox jumps");
  CHECK(sentence_bleu(s, {s}) == 1.0);
  TokenSeq shorter = tok("buy red shoes");  // shorter than max_n at order 4
  CHECK(sentence_bleu(shorter, {shorter}) == 1.0);
}

TEST_CASE("zero unigram overlap scores exactly zero") {
  CHECK(sentence_bleu(tok("aa bb cc"), {tok("dd ee ff")}) == 0.0);
  CHECK(sentence_bleu(tok("aa bb cc"), {tok("dd ee ff")}, 1) == 0.0);
}

TEST_CASE("unigram precision clips repeated tokens") {
  // seven "the" against a reference holding just two
  TokenSeq cand = tok("the the the the the the the");
  TokenSeq ref = tok("the cat is on the mat");
  auto cc = ngram_counts(cand, 1);
  auto rc = ngram_counts(ref, 1);
  long long clipped = 0, total = 0;
  for (const auto& [gram, count] : cc) {
    total += count;
    auto it = rc.find(gram);
    if (it != rc.end()) clipped += std::min(count, it->second);
  }
  CHECK(clipped == 2);
  CHECK(total == 7);
  CHECK(sentence_bleu(cand, {ref}, 1) == Approx(2.0 / 7.0).epsilon(1e-12));

  // both directions of multiset clipping
  CHECK(sentence_bleu(tok("a a b"), {tok("a b b")}, 1) ==
        Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("orders above one are add-one smoothed") {
  // p1 = 1/2, p2 = (0+1)/(1+1) = 1/2, equal lengths, so score is 1/2
  CHECK(sentence_bleu(tok("x y"), {tok("x z")}, 2) == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("brevity penalty fires only for short candidates") {
  // candidate 2 tokens, reference 3: BP = exp(1 - 3/2)
  CHECK(sentence_bleu(tok("the cat"), {tok("the cat sat")}, 1) ==
        Approx(std::exp(-0.5)).epsilon(1e-12));
  // candidate longer than the reference: no penalty, only the 3/4 precision
  CHECK(sentence_bleu(tok("the cat sat down"), {tok("the cat sat")}, 1) ==
        Approx(0.75).epsilon(1e-12));
}

TEST_CASE("closest reference length ties break toward the shorter") {
  // c=3 with refs of length 2 and 4: r=2, so no brevity penalty
  TokenSeq cand = tok("a b c");
  std::vector<TokenSeq> refs = {tok("a b"), tok("a b c d")};
  CHECK(sentence_bleu(cand, refs, 1) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sentence_bleu rejects empty inputs") {
  CHECK_THROWS(sentence_bleu({}, {tok("a")}));
  CHECK_THROWS(sentence_bleu(tok("a"), {}));
  CHECK_THROWS(sentence_bleu(tok("a"), {TokenSeq{}}));
  CHECK_THROWS(sentence_bleu(tok("a"), {tok("b")}, 0));
}

TEST_CASE("pairwise and self bleu on two clones and a stranger") {
  std::vector<TokenSeq> texts = {tok("the cat sat"), tok("the cat sat"),
                                 tok("dogs bark loudly")};
  // ordered pairs: clone pairs score 1, any pair with the stranger scores 0
  CHECK(pairwise_bleu(texts, 1) == Approx(100.0 / 3.0).epsilon(1e-12));
  // leave-one-out: each clone sees its twin, the stranger sees nothing shared
  CHECK(self_bleu(texts, 1) == Approx(200.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS(pairwise_bleu({tok("a")}, 1));
  CHECK_THROWS(self_bleu({tok("a")}, 1));
}

TEST_CASE("distinct_n pools ngrams across texts") {
  std::vector<TokenSeq> texts = {tok("a b a"), tok("b c")};
  auto d1 = distinct_n(texts, 1);
  REQUIRE(d1.has_value());
  CHECK(*d1 == Approx(60.0).epsilon(1e-12));  // 3 distinct over 5 total
  auto d2 = distinct_n(texts, 2);
  REQUIRE(d2.has_value());
  CHECK(*d2 == Approx(100.0).epsilon(1e-12));
  CHECK_FALSE(distinct_n(texts, 4).has_value());  // no text long enough
}

TEST_CASE("diversity_report validates input") {
  CHECK_THROWS(diversity_report({"only one"}));
  try {
    diversity_report({"fine text", "???"});
    FAIL("expected error for tokenless text");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("text 1") != std::string::npos);
  }
}

TEST_CASE("diversity_report matches the frozen corpus references") {
  auto texts = load_corpus();
  REQUIRE(texts.size() == 50);
  DiversityReport report = diversity_report(texts);
  CHECK(report.n_texts == 50);

  // references computed by an independent implementation of the same metrics
  const double pb[4] = {12.0030216268, 10.3025891082, 10.0236382025, 10.3411996897};
  const double sb[4] = {98.0198412698, 56.6899277812, 41.1770285061, 35.7487526986};
  const double dn[4] = {14.2857142857, 84.9650349650, 96.6101694915, 99.4623655914};
  for (int i = 0; i < 4; ++i) {
    CAPTURE(i);
    CHECK(report.per_order[i].pairwise_bleu == Approx(pb[i]).epsilon(1e-7));
    CHECK(report.per_order[i].self_bleu == Approx(sb[i]).epsilon(1e-7));
    REQUIRE(report.per_order[i].distinct.has_value());
    CHECK(*report.per_order[i].distinct == Approx(dn[i]).epsilon(1e-7));
  }
  CHECK(report.pairwise_bleu_avg == Approx(10.6676121568).epsilon(1e-7));
  CHECK(report.self_bleu_avg == Approx(57.9088875639).epsilon(1e-7));
  CHECK(report.distinct_avg == Approx(73.8308210834).epsilon(1e-7));
}
