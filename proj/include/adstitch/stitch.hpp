#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adstitch/model.hpp"
#include "adstitch/rng.hpp"
#include "adstitch/types.hpp"

namespace adstitch {

enum class StitchMode { Explore, Exploit };

const char* to_string(StitchMode m);
StitchMode stitch_mode_from_string(const std::string& s);

std::optional<AdAsset>& slot_of(StitchedAd& ad, Position p);
const std::optional<AdAsset>& slot_of(const StitchedAd& ad, Position p);

// Candidate evaluations a greedy fill performs for pools of T titles and D
// descriptions: each slot scores what is left of its pool.
int count_options(int title_pool, int desc_pool);

// One posterior draw for an arm with predicted rate p and pseudo trial count
// n: Beta(1 + p*n, 1 + (1-p)*n).
double thompson_sample(double p, double n, Rng& rng);

struct StitchRequest {
  Query query;
  std::vector<AdAsset> titles;
  std::vector<AdAsset> descriptions;
  StitchMode mode = StitchMode::Exploit;
};

struct StitchOutcome {
  StitchedAd ad;
  std::array<std::optional<double>, kNumPositions> slot_scores;
  int evaluations = 0;
};

// Greedy sequential fill in slot order, without replacement within a kind.
// Exploit scores each candidate by predicted rate; explore by a Thompson
// draw. Score ties resolve to the lexicographically lowest asset id. A pool
// that runs out leaves the remaining slots of its kind empty.
//
// `features(is_title, pool_index, position)` returns the candidate's feature
// vector; the indirection lets callers serve cached vectors.
template <class FeatureFn>
StitchOutcome stitch_with(const ModelBank& bank, std::span<const AdAsset> titles,
                          std::span<const AdAsset> descriptions, StitchMode mode,
                          double trial_scale, Rng& rng, FeatureFn&& features) {
  if (titles.empty()) throw std::invalid_argument("stitch: empty title pool");
  if (descriptions.empty()) {
    throw std::invalid_argument("stitch: empty description pool");
  }
  StitchOutcome out;
  std::vector<bool> used_title(titles.size(), false);
  std::vector<bool> used_desc(descriptions.size(), false);

  for (int pi = 0; pi < kNumPositions; ++pi) {
    const Position pos = static_cast<Position>(pi);
    const bool title_slot = is_title_position(pos);
    std::span<const AdAsset> pool = title_slot ? titles : descriptions;
    std::vector<bool>& used = title_slot ? used_title : used_desc;
    const PositionModel& model = bank.at(pos);

    std::ptrdiff_t best = -1;
    double best_score = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      const FeatureVector& fv = features(title_slot, i, pos);
      double score = lr_score(model, fv);
      if (mode == StitchMode::Explore) {
        score = thompson_sample(score, trial_count(model, fv, trial_scale), rng);
      }
      ++out.evaluations;
      if (best < 0 || score > best_score ||
          (score == best_score &&
           pool[i].id < pool[static_cast<std::size_t>(best)].id)) {
        best = static_cast<std::ptrdiff_t>(i);
        best_score = score;
      }
    }
    if (best < 0) continue;  // pool exhausted, slot stays empty
    used[static_cast<std::size_t>(best)] = true;
    slot_of(out.ad, pos) = pool[static_cast<std::size_t>(best)];
    out.slot_scores[static_cast<std::size_t>(pi)] = best_score;
  }
  return out;
}

// Featurizes on demand, caching per (candidate, slot) for the request.
StitchOutcome stitch(const ModelBank& bank, const StitchRequest& request,
                     Rng& rng, double trial_scale = 4.0);

}  // namespace adstitch
