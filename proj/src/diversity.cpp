#include "adstitch/diversity.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "adstitch/text.hpp"

namespace adstitch {

std::unordered_map<std::string, int> ngram_counts(const TokenSeq& tokens, int n) {
  if (n < 1) throw std::invalid_argument("ngram order must be >= 1");
  std::unordered_map<std::string, int> counts;
  if (tokens.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

double sentence_bleu(const TokenSeq& candidate,
                     const std::vector<TokenSeq>& references, int max_n) {
  if (max_n < 1) throw std::invalid_argument("sentence_bleu: max_n must be >= 1");
  if (candidate.empty()) {
    throw std::invalid_argument("sentence_bleu: empty candidate");
  }
  std::vector<const TokenSeq*> refs;
  for (const auto& r : references) {
    if (!r.empty()) refs.push_back(&r);
  }
  if (refs.empty()) {
    throw std::invalid_argument("sentence_bleu: no non-empty references");
  }

  const std::size_t c = candidate.size();
  // closest reference length; ties break toward the shorter reference
  std::size_t r = refs.front()->size();
  for (const TokenSeq* ref : refs) {
    std::size_t len = ref->size();
    auto dist = [&](std::size_t x) {
      return x > c ? x - c : c - x;
    };
    if (dist(len) < dist(r) || (dist(len) == dist(r) && len < r)) r = len;
  }

  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    auto cand = ngram_counts(candidate, n);
    std::unordered_map<std::string, int> best_ref;
    for (const TokenSeq* ref : refs) {
      for (const auto& [gram, count] : ngram_counts(*ref, n)) {
        auto& slot = best_ref[gram];
        if (count > slot) slot = count;
      }
    }
    long long clipped = 0, total = 0;
    for (const auto& [gram, count] : cand) {
      total += count;
      auto it = best_ref.find(gram);
      if (it != best_ref.end()) {
        clipped += count < it->second ? count : it->second;
      }
    }
    double p;
    if (n == 1) {
      p = static_cast<double>(clipped) / static_cast<double>(total);
      if (p == 0.0) return 0.0;
    } else {
      p = static_cast<double>(clipped + 1) / static_cast<double>(total + 1);
    }
    log_sum += std::log(p) / max_n;
  }

  double bp = 1.0;
  if (c < r) {
    bp = std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  }
  return bp * std::exp(log_sum);
}

double pairwise_bleu(const std::vector<TokenSeq>& texts, int n) {
  if (texts.size() < 2) {
    throw std::invalid_argument("pairwise_bleu requires at least two texts");
  }
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    for (std::size_t j = 0; j < texts.size(); ++j) {
      if (i == j) continue;
      sum += sentence_bleu(texts[i], {texts[j]}, n);
      ++pairs;
    }
  }
  return 100.0 * sum / static_cast<double>(pairs);
}

double self_bleu(const std::vector<TokenSeq>& texts, int n) {
  if (texts.size() < 2) {
    throw std::invalid_argument("self_bleu requires at least two texts");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    std::vector<TokenSeq> refs;
    refs.reserve(texts.size() - 1);
    for (std::size_t j = 0; j < texts.size(); ++j) {
      if (j != i) refs.push_back(texts[j]);
    }
    sum += sentence_bleu(texts[i], refs, n);
  }
  return 100.0 * sum / static_cast<double>(texts.size());
}

std::optional<double> distinct_n(const std::vector<TokenSeq>& texts, int n) {
  std::unordered_map<std::string, int> pooled;
  long long total = 0;
  for (const auto& t : texts) {
    for (const auto& [gram, count] : ngram_counts(t, n)) {
      pooled[gram] += count;
      total += count;
    }
  }
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(pooled.size()) / static_cast<double>(total);
}

DiversityReport diversity_report(const std::vector<std::string>& raw_texts) {
  if (raw_texts.size() < 2) {
    throw std::invalid_argument("diversity_report requires at least two texts");
  }
  std::vector<TokenSeq> texts;
  texts.reserve(raw_texts.size());
  for (std::size_t i = 0; i < raw_texts.size(); ++i) {
    texts.push_back(tokenize(raw_texts[i]));
    if (texts.back().empty()) {
      throw std::invalid_argument("diversity_report: text " + std::to_string(i) +
                                  " has no tokens");
    }
  }
  DiversityReport report;
  report.n_texts = texts.size();
  double dist_sum = 0.0;
  int dist_orders = 0;
  for (int n = 1; n <= 4; ++n) {
    OrderMetrics& m = report.per_order[static_cast<std::size_t>(n - 1)];
    m.pairwise_bleu = pairwise_bleu(texts, n);
    m.self_bleu = self_bleu(texts, n);
    m.distinct = distinct_n(texts, n);
    report.pairwise_bleu_avg += m.pairwise_bleu / 4.0;
    report.self_bleu_avg += m.self_bleu / 4.0;
    if (m.distinct) {
      dist_sum += *m.distinct;
      ++dist_orders;
    }
  }
  if (dist_orders == 0) {
    throw std::invalid_argument("diversity_report: no order has any ngrams");
  }
  report.distinct_avg = dist_sum / dist_orders;
  return report;
}

}  // namespace adstitch
