#include "adstitch/quality.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "adstitch/rng.hpp"
#include "adstitch/text.hpp"

namespace adstitch {

const char* to_string(TextQuality q) {
  switch (q) {
    case TextQuality::Good: return "good";
    case TextQuality::Fair: return "fair";
    case TextQuality::Bad: return "bad";
    case TextQuality::Embarrassing: return "embarrassing";
    case TextQuality::NotScorable: return "not_scorable";
  }
  return "not_scorable";
}

TextQuality text_quality_from_string(const std::string& s) {
  if (s == "good") return TextQuality::Good;
  if (s == "fair") return TextQuality::Fair;
  if (s == "bad") return TextQuality::Bad;
  if (s == "embarrassing") return TextQuality::Embarrassing;
  if (s == "not_scorable") return TextQuality::NotScorable;
  throw std::invalid_argument("unknown text quality \"" + s + "\"");
}

bool overall_good(const Judgment& j) {
  bool text_ok = j.text_quality == TextQuality::Good ||
                 j.text_quality == TextQuality::Fair;
  return text_ok && j.human_like && j.factual && j.relevant;
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("inverse_normal_cdf requires p in (0, 1)");
  }
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double q, r, x;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    q = p - 0.5;
    r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // one Halley refinement step squeezes the approximation below 1e-12
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

double wilson_lower_bound(std::uint64_t successes, std::uint64_t n,
                          double confidence) {
  if (n == 0) throw std::invalid_argument("wilson_lower_bound requires n > 0");
  if (successes > n) {
    throw std::invalid_argument("wilson_lower_bound: successes exceed n");
  }
  double z = inverse_normal_cdf(confidence);
  double nn = static_cast<double>(n);
  double phat = static_cast<double>(successes) / nn;
  double z2 = z * z;
  double denom = 1.0 + z2 / nn;
  double center = phat + z2 / (2.0 * nn);
  double margin = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
  double lb = (center - margin) / denom;
  return lb < 0.0 ? 0.0 : lb;
}

GateReport gate(const std::vector<Judgment>& judgments, double threshold,
                double confidence) {
  if (judgments.empty()) {
    throw std::invalid_argument("gate requires at least one judgment");
  }
  GateReport report;
  report.n = judgments.size();
  report.threshold = threshold;
  report.confidence = confidence;
  std::uint64_t scorable = 0, text_ok = 0, human = 0, factual = 0, relevant = 0;
  for (const auto& j : judgments) {
    if (overall_good(j)) ++report.overall_good_count;
    if (j.text_quality != TextQuality::NotScorable) {
      ++scorable;
      if (j.text_quality == TextQuality::Good || j.text_quality == TextQuality::Fair) {
        ++text_ok;
      }
    }
    if (j.human_like) ++human;
    if (j.factual) ++factual;
    if (j.relevant) ++relevant;
  }
  double nn = static_cast<double>(report.n);
  report.overall_good_rate = static_cast<double>(report.overall_good_count) / nn;
  report.lower_bound = wilson_lower_bound(report.overall_good_count, report.n,
                                          confidence);
  report.passed = report.lower_bound >= threshold;
  report.text_quality_rate =
      scorable == 0 ? 0.0 : static_cast<double>(text_ok) / static_cast<double>(scorable);
  report.human_like_rate = static_cast<double>(human) / nn;
  report.factual_rate = static_cast<double>(factual) / nn;
  report.relevant_rate = static_cast<double>(relevant) / nn;
  return report;
}

EvalSample sample_for_eval(const AssetCatalog& catalog, std::size_t per_domain_cap,
                           std::size_t total, std::uint64_t seed) {
  if (per_domain_cap == 0 || total == 0) {
    throw std::invalid_argument("sample_for_eval requires nonzero cap and total");
  }
  // std::map keyed by domain keeps the draw order independent of catalog
  // insertion history
  std::map<std::string, std::vector<const AdAsset*>> by_domain;
  for (const auto& [url, entry] : catalog) {
    std::string domain = domain_of_url(url);
    if (domain.empty()) domain = url;
    auto& bucket = by_domain[domain];
    for (const auto& a : entry.titles) bucket.push_back(&a);
    for (const auto& a : entry.descriptions) bucket.push_back(&a);
  }

  auto take = [](std::vector<const AdAsset*>& pool, std::size_t want, Rng& rng) {
    // partial Fisher-Yates: the first `want` slots end up a uniform subsample
    std::size_t n = pool.size();
    if (want > n) want = n;
    for (std::size_t i = 0; i < want; ++i) {
      std::size_t j = i + rng.uniform_index(n - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(want);
  };

  std::vector<const AdAsset*> pool;
  std::uint64_t stream = 0;
  for (auto& [domain, bucket] : by_domain) {
    if (bucket.size() > per_domain_cap) {
      Rng rng(derive_seed(seed, ++stream));
      take(bucket, per_domain_cap, rng);
    }
    pool.insert(pool.end(), bucket.begin(), bucket.end());
  }

  EvalSample sample;
  if (pool.size() > total) {
    Rng rng(derive_seed(seed, 0));
    take(pool, total, rng);
  } else {
    sample.shortfall = pool.size() < total;
  }
  sample.assets.reserve(pool.size());
  for (const AdAsset* a : pool) sample.assets.push_back(*a);
  return sample;
}

}  // namespace adstitch
