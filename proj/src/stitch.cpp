#include "adstitch/stitch.hpp"

namespace adstitch {

const char* to_string(StitchMode m) {
  return m == StitchMode::Explore ? "explore" : "exploit";
}

StitchMode stitch_mode_from_string(const std::string& s) {
  if (s == "explore") return StitchMode::Explore;
  if (s == "exploit") return StitchMode::Exploit;
  throw std::invalid_argument("unknown stitch mode \"" + s + "\"");
}

std::optional<AdAsset>& slot_of(StitchedAd& ad, Position p) {
  switch (p) {
    case Position::T1: return ad.title1;
    case Position::T2: return ad.title2;
    case Position::T3: return ad.title3;
    case Position::D1: return ad.desc1;
    case Position::D2: return ad.desc2;
  }
  throw std::invalid_argument("bad position");
}

const std::optional<AdAsset>& slot_of(const StitchedAd& ad, Position p) {
  return slot_of(const_cast<StitchedAd&>(ad), p);
}

int count_options(int title_pool, int desc_pool) {
  if (title_pool < 1 || desc_pool < 1) {
    throw std::invalid_argument("count_options requires nonempty pools");
  }
  auto left = [](int pool, int consumed) {
    int n = pool - consumed;
    return n > 0 ? n : 0;
  };
  return left(title_pool, 0) + left(title_pool, 1) + left(title_pool, 2) +
         left(desc_pool, 0) + left(desc_pool, 1);
}

double thompson_sample(double p, double n, Rng& rng) {
  if (p < 0.0) p = 0.0;
  if (p > 1.0) p = 1.0;
  if (n < 0.0) n = 0.0;
  return rng.beta(1.0 + p * n, 1.0 + (1.0 - p) * n);
}

StitchOutcome stitch(const ModelBank& bank, const StitchRequest& request,
                     Rng& rng, double trial_scale) {
  // lazily filled per-request cache: [kind][pool index][slot]
  std::vector<std::array<std::optional<FeatureVector>, kNumPositions>> title_cache(
      request.titles.size());
  std::vector<std::array<std::optional<FeatureVector>, kNumPositions>> desc_cache(
      request.descriptions.size());

  auto features = [&](bool is_title, std::size_t i, Position pos) -> const FeatureVector& {
    auto& cache = is_title ? title_cache : desc_cache;
    const AdAsset& asset = is_title ? request.titles[i] : request.descriptions[i];
    auto& slot = cache[i][static_cast<std::size_t>(static_cast<int>(pos))];
    if (!slot) slot = featurize(asset, request.query, pos, bank.hash_bits);
    return *slot;
  };

  return stitch_with(bank, request.titles, request.descriptions, request.mode,
                     trial_scale, rng, features);
}

}  // namespace adstitch
