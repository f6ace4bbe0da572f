#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adstitch/types.hpp"

namespace adstitch {

enum class TextQuality { Good, Fair, Bad, Embarrassing, NotScorable };

const char* to_string(TextQuality q);
TextQuality text_quality_from_string(const std::string& s);

struct Judgment {
  std::string asset_id;
  TextQuality text_quality = TextQuality::NotScorable;
  bool human_like = false;
  bool factual = false;
  bool relevant = false;
};

// The launch bar for a single judged asset: acceptable prose and a yes on
// every binary aspect.
bool overall_good(const Judgment& j);

// Inverse standard normal CDF (Acklam rational approximation, ~1e-9).
double inverse_normal_cdf(double p);

// One-sided Wilson score lower bound at the given one-sided confidence.
double wilson_lower_bound(std::uint64_t successes, std::uint64_t n,
                          double confidence);

struct GateReport {
  std::uint64_t n = 0;
  std::uint64_t overall_good_count = 0;
  double overall_good_rate = 0.0;
  double lower_bound = 0.0;
  double threshold = 0.0;
  double confidence = 0.0;
  bool passed = false;
  // per-aspect rates; text quality counts Good/Fair over scorable judgments
  double text_quality_rate = 0.0;
  double human_like_rate = 0.0;
  double factual_rate = 0.0;
  double relevant_rate = 0.0;
};

// Passes iff the Wilson lower bound on the overall-good rate clears the
// threshold. Throws on an empty judgment list.
GateReport gate(const std::vector<Judgment>& judgments, double threshold = 0.90,
                double confidence = 0.975);

struct EvalSample {
  std::vector<AdAsset> assets;
  bool shortfall = false;  // catalog had fewer assets than requested
};

// Stratified draw for human evaluation: cap per page domain first, then a
// uniform subsample down to `total`. Deterministic for a given seed.
EvalSample sample_for_eval(const AssetCatalog& catalog, std::size_t per_domain_cap,
                           std::size_t total, std::uint64_t seed);

}  // namespace adstitch
