#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adstitch/model.hpp"
#include "adstitch/rng.hpp"
#include "adstitch/stitch.hpp"
#include "adstitch/types.hpp"

namespace adstitch {

// Synthetic marketplace parameters. The ground-truth response model is a pair
// of sparse linear scorers over the same hashed feature space the stitcher
// uses, but salted into separate win and click channels, so the learner can
// recover the truth without ever sharing indices with it.
struct WorldSpec {
  std::uint64_t seed = 1;
  int queries_per_page = 20;
  double oracle_sparsity = 0.3;  // fraction of feature indices carrying truth weight
  double oracle_scale = 0.4;     // spread of the nonzero truth weights
  double win_scale = 1.0;        // multiplies the win probability
  double revenue_per_click = 0.5;
  double quick_back_base = 0.1;
  double quick_back_bias = 0.4;  // added for ads containing flagged assets
  std::optional<double> win_override;    // force the auction win probability
  std::optional<double> click_override;  // force the click probability
  int bootstrap_shards = 100;
  std::set<std::string> flagged_asset_ids;
};

// Deterministic truth weight for one hashed feature index: zero for most
// indices, a fixed pseudo-normal value for the rest. O(1), no table.
double theta_at(std::uint64_t seed, std::uint32_t index, double sparsity,
                double scale);

class World {
 public:
  World(WorldSpec spec, std::vector<LandingPage> pages, AssetCatalog catalog,
        int hash_bits);

  const WorldSpec& spec() const { return spec_; }
  int hash_bits() const { return hash_bits_; }
  std::size_t page_count() const { return pages_.size(); }
  const LandingPage& page(std::size_t i) const { return pages_[i]; }
  bool servable(std::size_t i) const { return servable_[i]; }
  std::size_t servable_count() const { return servable_count_; }
  const std::vector<Query>& queries(std::size_t page) const {
    return queries_[page];
  }
  const std::vector<AdAsset>& titles(std::size_t page) const {
    return titles_[page];
  }
  const std::vector<AdAsset>& descriptions(std::size_t page) const {
    return descriptions_[page];
  }

  double theta_component(std::uint32_t index) const;
  double theta_dot(const FeatureVector& features) const;

  // truth-channel margins for one slot assignment, precomputed at build time
  double win_margin(std::size_t page, std::size_t query, bool is_title,
                    std::size_t pool_index, Position pos) const;
  double click_margin(std::size_t page, std::size_t query, bool is_title,
                      std::size_t pool_index, Position pos) const;

  double win_prob(const StitchedAd& ad, std::size_t page, std::size_t query) const;
  double click_prob(const StitchedAd& ad, std::size_t page, std::size_t query) const;
  double quick_back_prob(const StitchedAd& ad) const;
  bool has_flagged_asset(const StitchedAd& ad) const;

 private:
  double slot_margin_sum(const StitchedAd& ad, std::size_t page, std::size_t query,
                         int channel) const;

  WorldSpec spec_;
  int hash_bits_;
  std::vector<LandingPage> pages_;
  std::vector<bool> servable_;
  std::size_t servable_count_ = 0;
  std::vector<std::vector<Query>> queries_;
  std::vector<std::vector<AdAsset>> titles_;
  std::vector<std::vector<AdAsset>> descriptions_;
  // margins_[channel][page]: query-major [query][titles..., descs...][slot]
  std::vector<std::vector<double>> margins_[2];
  // pool index of an asset id within its page, for ad margin lookups
  std::vector<std::map<std::string, std::pair<bool, std::size_t>>> pool_index_;
};

// One bootstrap shard's raw tallies. SRPVs deal into shards round-robin, so
// any subset behaves like an independent slice of traffic.
struct ShardTally {
  std::uint64_t srpv = 0;
  std::uint64_t impressions = 0;
  std::uint64_t clicks = 0;
  std::uint64_t quick_backs = 0;
  double revenue = 0.0;
};

struct EpisodeLog {
  std::string policy;
  std::uint64_t run_seed = 0;
  std::uint64_t srpv = 0;
  std::uint64_t impressions = 0;
  std::uint64_t clicks = 0;
  std::uint64_t quick_backs = 0;
  double revenue = 0.0;
  std::vector<ShardTally> shards;
};

struct BusinessMetrics {
  double rpm = 0.0;  // revenue per thousand SRPVs
  double iy = 0.0;   // impressions per SRPV
  double ctr = 0.0;  // clicks per impression
  double qbr = 0.0;  // quick-backs per click
};

BusinessMetrics business_metrics(const EpisodeLog& log);

class StitchPolicy {
 public:
  virtual ~StitchPolicy() = default;
  virtual const char* name() const = 0;
  virtual StitchOutcome decide(const World& world, std::size_t page,
                               std::size_t query, Rng& rng) = 0;
  virtual void observe(const World& world, std::size_t page, std::size_t query,
                       const StitchOutcome& outcome, bool won, bool clicked);
  virtual void finish_training();
};

struct TrainOptions {
  bool enabled = false;
  double learning_rate = 0.02;
  int batch_size = 1000;
  LabelSource label = LabelSource::Click;
};

// Stitches every request from the live model bank; optionally trains it from
// the observed feedback. Win labels come from every auction, click labels
// only from won impressions. Feature vectors are cached per (page, query,
// candidate, slot).
class OnlinePolicy : public StitchPolicy {
 public:
  OnlinePolicy(ModelBank& bank, StitchMode mode, double trial_scale = 4.0,
               TrainOptions train = {});

  const char* name() const override;
  StitchOutcome decide(const World& world, std::size_t page, std::size_t query,
                       Rng& rng) override;
  void observe(const World& world, std::size_t page, std::size_t query,
               const StitchOutcome& outcome, bool won, bool clicked) override;
  void finish_training() override;

  const ModelBank& bank() const { return *bank_; }

 private:
  const FeatureVector& cached_features(const World& world, std::size_t page,
                                       std::size_t query, bool is_title,
                                       std::size_t pool_index, Position pos);
  void flush();

  ModelBank* bank_;
  StitchMode mode_;
  double trial_scale_;
  TrainOptions train_;
  // cache_[page][query][titles..., descs...][slot]
  std::vector<std::vector<std::vector<std::array<std::optional<FeatureVector>,
                                                 kNumPositions>>>>
      cache_;
  std::array<std::vector<TrainExample>, kNumPositions> pending_;
  int pending_total_ = 0;
};

// Builds a small candidate slate per page offline (query-blind), then picks
// among candidates at request time by summed slot scores under the frozen
// bank. Candidate slates come from greedy stitches under small weight
// perturbations, so they differ without retraining.
class PrestitchPolicy : public StitchPolicy {
 public:
  PrestitchPolicy(const ModelBank& bank, const World& world, int per_page,
                  std::uint64_t seed);

  const char* name() const override;
  StitchOutcome decide(const World& world, std::size_t page, std::size_t query,
                       Rng& rng) override;

  const std::vector<StitchedAd>& candidates(std::size_t page) const {
    return candidates_[page];
  }

 private:
  const ModelBank* bank_;
  std::vector<std::vector<StitchedAd>> candidates_;
  // scores_[page][query][candidate], filled lazily
  std::vector<std::vector<std::optional<std::vector<double>>>> scores_;
};

struct SimOptions {
  std::uint64_t run_seed = 1;
  TrainOptions train;
};

// Uniform page draws, uniform query draws on servable pages, auction then
// click then quick-back, all from one seeded stream. Pages without a
// servable pool still consume an SRPV, so instrumented yield reflects
// coverage.
EpisodeLog simulate(const World& world, StitchPolicy& policy,
                    std::uint64_t n_srpv, const SimOptions& options);

struct MetricDelta {
  double treatment = 0.0;
  double control = 0.0;
  double delta_pct = 0.0;
  bool defined = true;       // false when the control side is zero
  bool significant = false;  // at the fixed two-sided 5% level
};

struct AbReport {
  MetricDelta rpm, iy, ctr, qbr;
  double ctr_z = 0.0;
  double qbr_z = 0.0;
  int resamples = 0;
  std::uint64_t seed = 0;
};

// Pooled two-proportion z-tests for the ratio metrics (ctr, qbr) and a
// seeded shard bootstrap for rpm and iy: significant when the central 95%
// interval of resampled deltas excludes zero.
AbReport ab_compare(const EpisodeLog& treatment, const EpisodeLog& control,
                    std::uint64_t seed = 7, int resamples = 1000);

// Two-proportion z statistic with pooled variance; 0 when degenerate.
double two_proportion_z(std::uint64_t s1, std::uint64_t n1, std::uint64_t s2,
                        std::uint64_t n2);

// Exploit-mode expected click rate of a policy, averaged over every
// (servable page, query) pair with forced wins; the convergence yardstick.
double expected_click_rate(const World& world, StitchPolicy& policy);

// Greedy slate on the truth model's mean click margin across a page's
// queries: the fixed-ad reference an online learner should approach.
StitchedAd oracle_fixed_stitch(const World& world, std::size_t page);
double oracle_fixed_click_rate(const World& world);

// Same, but free to restitch per query; upper reference for regret.
StitchedAd oracle_query_stitch(const World& world, std::size_t page,
                               std::size_t query);
double oracle_query_click_rate(const World& world);

}  // namespace adstitch
