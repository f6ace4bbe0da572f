#pragma once

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace adstitch {

using TokenSeq = std::vector<std::string>;

// Multiset of n-grams, keyed by tokens joined with 0x1f (cannot occur inside
// a token).
std::unordered_map<std::string, int> ngram_counts(const TokenSeq& tokens, int n);

// Sentence-level score in [0, 1]: clipped modified precisions with uniform
// 1/max_n weights, unsmoothed at order 1 and add-one smoothed (numerator and
// denominator) above, brevity penalty exp(1 - r/c) when the candidate is
// shorter than the closest reference (length ties resolve to the shorter
// reference). A zero unigram precision short-circuits to 0.
double sentence_bleu(const TokenSeq& candidate,
                     const std::vector<TokenSeq>& references, int max_n = 4);

// Mean over ordered pairs (i, j), i != j, of order-n BLEU of text i against
// text j alone. 0-100 scale; lower means more diverse.
double pairwise_bleu(const std::vector<TokenSeq>& texts, int n);

// Mean over i of order-n BLEU of text i against all the others as joint
// references. 0-100 scale; lower means more diverse.
double self_bleu(const std::vector<TokenSeq>& texts, int n);

// Distinct n-grams over total n-grams, pooled across texts, 0-100 scale;
// higher means more diverse. Empty pool at this order → nullopt.
std::optional<double> distinct_n(const std::vector<TokenSeq>& texts, int n);

struct OrderMetrics {
  double pairwise_bleu = 0.0;
  double self_bleu = 0.0;
  std::optional<double> distinct;
};

struct DiversityReport {
  std::size_t n_texts = 0;
  std::array<OrderMetrics, 4> per_order;  // index k holds order k+1
  double pairwise_bleu_avg = 0.0;
  double self_bleu_avg = 0.0;
  double distinct_avg = 0.0;  // averaged over orders with a defined value
};

// Tokenizes and scores a set of raw texts at orders 1-4. Requires at least
// two texts, each with at least one token.
DiversityReport diversity_report(const std::vector<std::string>& raw_texts);

}  // namespace adstitch
