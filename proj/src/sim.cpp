#include "adstitch/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "adstitch/quality.hpp"
#include "adstitch/text.hpp"

namespace adstitch {

double theta_at(std::uint64_t seed, std::uint32_t index, double sparsity,
                double scale) {
  std::uint64_t s = seed ^ (0xA24BAED4963EE407ULL * (static_cast<std::uint64_t>(index) + 1));
  std::uint64_t h1 = splitmix64(s);
  std::uint64_t h2 = splitmix64(s);
  double gate = static_cast<double>(h1 >> 11) * 0x1.0p-53;
  if (gate >= sparsity) return 0.0;
  double u = static_cast<double>(h2 >> 11) * 0x1.0p-53;
  if (u < 1e-12) u = 1e-12;
  if (u > 1.0 - 1e-12) u = 1.0 - 1e-12;
  return scale * inverse_normal_cdf(u);
}

namespace {

constexpr const char* kWinSalt = "W";
constexpr const char* kClickSalt = "C";

std::vector<std::string> page_token_pool(const LandingPage& page) {
  std::vector<std::string> pool = tokenize(page.page_title);
  auto append = [&pool](const std::string& text) {
    for (auto& t : tokenize(text)) pool.push_back(std::move(t));
  };
  for (const auto& h : page.visual_headings) append(h);
  for (const auto& s : page.body_snippets) append(s);
  if (pool.empty()) pool = tokenize(page.url);
  if (pool.empty()) pool.push_back("page");
  return pool;
}

}  // namespace

World::World(WorldSpec spec, std::vector<LandingPage> pages, AssetCatalog catalog,
             int hash_bits)
    : spec_(std::move(spec)), hash_bits_(hash_bits), pages_(std::move(pages)) {
  if (pages_.empty()) throw std::invalid_argument("world requires pages");
  if (spec_.queries_per_page < 1) {
    throw std::invalid_argument("queries_per_page must be >= 1");
  }
  if (spec_.bootstrap_shards < 1) {
    throw std::invalid_argument("bootstrap_shards must be >= 1");
  }

  const std::size_t n = pages_.size();
  servable_.resize(n, false);
  queries_.resize(n);
  titles_.resize(n);
  descriptions_.resize(n);
  margins_[0].resize(n);
  margins_[1].resize(n);
  pool_index_.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const LandingPage& page = pages_[i];
    auto it = catalog.find(page.url);
    if (it != catalog.end()) {
      titles_[i] = it->second.titles;
      descriptions_[i] = it->second.descriptions;
    }
    servable_[i] = !titles_[i].empty() && !descriptions_[i].empty();
    if (servable_[i]) ++servable_count_;

    Rng rng(derive_seed(spec_.seed, 0x517A9000ULL + i));
    std::vector<std::string> pool = page_token_pool(page);
    queries_[i].reserve(static_cast<std::size_t>(spec_.queries_per_page));
    for (int q = 0; q < spec_.queries_per_page; ++q) {
      std::size_t len = 1 + rng.uniform_index(3);
      std::string raw;
      for (std::size_t k = 0; k < len; ++k) {
        if (k) raw.push_back(' ');
        raw += pool[rng.uniform_index(pool.size())];
      }
      queries_[i].push_back(Query::make(raw));
    }

    for (std::size_t t = 0; t < titles_[i].size(); ++t) {
      pool_index_[i][titles_[i][t].id] = {true, t};
    }
    for (std::size_t d = 0; d < descriptions_[i].size(); ++d) {
      pool_index_[i][descriptions_[i][d].id] = {false, d};
    }

    // truth margins for every (query, candidate, slot): worlds are desk-scale,
    // so the full table is cheap and every later lookup is O(1)
    const std::size_t items = titles_[i].size() + descriptions_[i].size();
    const std::size_t nq = queries_[i].size();
    margins_[0][i].assign(nq * items * kNumPositions, 0.0);
    margins_[1][i].assign(nq * items * kNumPositions, 0.0);
    for (std::size_t q = 0; q < nq; ++q) {
      for (std::size_t item = 0; item < items; ++item) {
        const AdAsset& asset = item < titles_[i].size()
                                   ? titles_[i][item]
                                   : descriptions_[i][item - titles_[i].size()];
        for (int p = 0; p < kNumPositions; ++p) {
          Position pos = static_cast<Position>(p);
          std::size_t at = (q * items + item) * kNumPositions +
                           static_cast<std::size_t>(p);
          margins_[0][i][at] = theta_dot(featurize_salted(
              asset.text, queries_[i][q].tokens, pos, hash_bits_, kWinSalt));
          margins_[1][i][at] = theta_dot(featurize_salted(
              asset.text, queries_[i][q].tokens, pos, hash_bits_, kClickSalt));
        }
      }
    }
  }
}

double World::theta_component(std::uint32_t index) const {
  return theta_at(spec_.seed, index, spec_.oracle_sparsity, spec_.oracle_scale);
}

double World::theta_dot(const FeatureVector& features) const {
  double sum = 0.0;
  for (std::uint32_t idx : features.indices) sum += theta_component(idx);
  return sum;
}

double World::win_margin(std::size_t page, std::size_t query, bool is_title,
                         std::size_t pool_index, Position pos) const {
  const std::size_t items = titles_[page].size() + descriptions_[page].size();
  std::size_t item = is_title ? pool_index : titles_[page].size() + pool_index;
  return margins_[0][page][(query * items + item) * kNumPositions +
                           static_cast<std::size_t>(static_cast<int>(pos))];
}

double World::click_margin(std::size_t page, std::size_t query, bool is_title,
                           std::size_t pool_index, Position pos) const {
  const std::size_t items = titles_[page].size() + descriptions_[page].size();
  std::size_t item = is_title ? pool_index : titles_[page].size() + pool_index;
  return margins_[1][page][(query * items + item) * kNumPositions +
                           static_cast<std::size_t>(static_cast<int>(pos))];
}

double World::slot_margin_sum(const StitchedAd& ad, std::size_t page,
                              std::size_t query, int channel) const {
  double sum = 0.0;
  for (int p = 0; p < kNumPositions; ++p) {
    Position pos = static_cast<Position>(p);
    const auto& slot = slot_of(ad, pos);
    if (!slot) continue;
    auto it = pool_index_[page].find(slot->id);
    if (it == pool_index_[page].end()) {
      throw std::invalid_argument("ad references asset " + slot->id +
                                  " outside this world's pools");
    }
    auto [is_title, idx] = it->second;
    sum += channel == 0 ? win_margin(page, query, is_title, idx, pos)
                        : click_margin(page, query, is_title, idx, pos);
  }
  return sum;
}

double World::win_prob(const StitchedAd& ad, std::size_t page,
                       std::size_t query) const {
  if (spec_.win_override) return *spec_.win_override;
  double p = spec_.win_scale * logistic(slot_margin_sum(ad, page, query, 0));
  return std::clamp(p, 0.0, 1.0);
}

double World::click_prob(const StitchedAd& ad, std::size_t page,
                         std::size_t query) const {
  if (spec_.click_override) return *spec_.click_override;
  return logistic(slot_margin_sum(ad, page, query, 1));
}

bool World::has_flagged_asset(const StitchedAd& ad) const {
  for (const AdAsset* a : ad.filled()) {
    if (spec_.flagged_asset_ids.count(a->id)) return true;
  }
  return false;
}

double World::quick_back_prob(const StitchedAd& ad) const {
  double p = spec_.quick_back_base;
  if (has_flagged_asset(ad)) p += spec_.quick_back_bias;
  return std::clamp(p, 0.0, 1.0);
}

BusinessMetrics business_metrics(const EpisodeLog& log) {
  BusinessMetrics m;
  if (log.srpv > 0) {
    m.rpm = log.revenue / static_cast<double>(log.srpv) * 1000.0;
    m.iy = static_cast<double>(log.impressions) / static_cast<double>(log.srpv);
  }
  if (log.impressions > 0) {
    m.ctr = static_cast<double>(log.clicks) / static_cast<double>(log.impressions);
  }
  if (log.clicks > 0) {
    m.qbr = static_cast<double>(log.quick_backs) / static_cast<double>(log.clicks);
  }
  return m;
}

void StitchPolicy::observe(const World&, std::size_t, std::size_t,
                           const StitchOutcome&, bool, bool) {}
void StitchPolicy::finish_training() {}

OnlinePolicy::OnlinePolicy(ModelBank& bank, StitchMode mode, double trial_scale,
                           TrainOptions train)
    : bank_(&bank), mode_(mode), trial_scale_(trial_scale), train_(train) {
  if (train_.batch_size < 1) {
    throw std::invalid_argument("batch_size must be >= 1");
  }
}

const char* OnlinePolicy::name() const {
  return mode_ == StitchMode::Explore ? "online-explore" : "online-exploit";
}

const FeatureVector& OnlinePolicy::cached_features(const World& world,
                                                   std::size_t page,
                                                   std::size_t query,
                                                   bool is_title,
                                                   std::size_t pool_index,
                                                   Position pos) {
  if (cache_.size() < world.page_count()) cache_.resize(world.page_count());
  auto& page_cache = cache_[page];
  if (page_cache.size() < world.queries(page).size()) {
    page_cache.resize(world.queries(page).size());
  }
  auto& query_cache = page_cache[query];
  const std::size_t items =
      world.titles(page).size() + world.descriptions(page).size();
  if (query_cache.size() < items) query_cache.resize(items);
  std::size_t item =
      is_title ? pool_index : world.titles(page).size() + pool_index;
  auto& slot = query_cache[item][static_cast<std::size_t>(static_cast<int>(pos))];
  if (!slot) {
    const AdAsset& asset = is_title ? world.titles(page)[pool_index]
                                    : world.descriptions(page)[pool_index];
    slot = featurize(asset, world.queries(page)[query], pos, bank_->hash_bits);
  }
  return *slot;
}

StitchOutcome OnlinePolicy::decide(const World& world, std::size_t page,
                                   std::size_t query, Rng& rng) {
  auto features = [&](bool is_title, std::size_t i, Position pos) -> const FeatureVector& {
    return cached_features(world, page, query, is_title, i, pos);
  };
  return stitch_with(*bank_, world.titles(page), world.descriptions(page), mode_,
                     trial_scale_, rng, features);
}

void OnlinePolicy::observe(const World& world, std::size_t page, std::size_t query,
                           const StitchOutcome& outcome, bool won, bool clicked) {
  if (!train_.enabled) return;
  int label;
  if (train_.label == LabelSource::AuctionWin) {
    label = won ? 1 : 0;
  } else {
    if (!won) return;  // click labels exist only where an impression happened
    label = clicked ? 1 : 0;
  }
  for (int p = 0; p < kNumPositions; ++p) {
    Position pos = static_cast<Position>(p);
    const auto& slot = slot_of(outcome.ad, pos);
    if (!slot) continue;
    bool is_title = is_title_position(pos);
    const auto& pool = is_title ? world.titles(page) : world.descriptions(page);
    std::size_t idx = pool.size();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].id == slot->id) {
        idx = i;
        break;
      }
    }
    if (idx == pool.size()) continue;  // foreign asset; nothing to learn against
    pending_[static_cast<std::size_t>(p)].push_back(
        {cached_features(world, page, query, is_title, idx, pos), label});
    ++pending_total_;
  }
  if (pending_total_ >= train_.batch_size) flush();
}

void OnlinePolicy::flush() {
  for (int p = 0; p < kNumPositions; ++p) {
    auto& batch = pending_[static_cast<std::size_t>(p)];
    if (batch.empty()) continue;
    train_online(bank_->positions[static_cast<std::size_t>(p)], batch,
                 train_.learning_rate);
    batch.clear();
  }
  pending_total_ = 0;
}

void OnlinePolicy::finish_training() {
  if (train_.enabled) flush();
}

PrestitchPolicy::PrestitchPolicy(const ModelBank& bank, const World& world,
                                 int per_page, std::uint64_t seed)
    : bank_(&bank) {
  if (per_page < 1) throw std::invalid_argument("per_page must be >= 1");
  candidates_.resize(world.page_count());
  scores_.resize(world.page_count());

  ModelBank work = bank;  // scratch copy for perturb-stitch-revert
  Query empty_query;

  for (std::size_t page = 0; page < world.page_count(); ++page) {
    scores_[page].assign(world.queries(page).size(), std::nullopt);
    if (!world.servable(page)) continue;
    const auto& titles = world.titles(page);
    const auto& descs = world.descriptions(page);

    // query-blind features, computed once per page
    const std::size_t items = titles.size() + descs.size();
    std::vector<std::array<FeatureVector, kNumPositions>> feats(items);
    std::array<std::vector<std::uint32_t>, kNumPositions> active;
    for (std::size_t item = 0; item < items; ++item) {
      const AdAsset& asset =
          item < titles.size() ? titles[item] : descs[item - titles.size()];
      for (int p = 0; p < kNumPositions; ++p) {
        feats[item][static_cast<std::size_t>(p)] =
            featurize(asset, empty_query, static_cast<Position>(p), bank.hash_bits);
        auto& fv = feats[item][static_cast<std::size_t>(p)];
        auto& act = active[static_cast<std::size_t>(p)];
        act.insert(act.end(), fv.indices.begin(), fv.indices.end());
      }
    }
    for (auto& act : active) {
      std::sort(act.begin(), act.end());
      act.erase(std::unique(act.begin(), act.end()), act.end());
    }

    auto features = [&](bool is_title, std::size_t i, Position pos) -> const FeatureVector& {
      std::size_t item = is_title ? i : titles.size() + i;
      return feats[item][static_cast<std::size_t>(static_cast<int>(pos))];
    };

    std::vector<std::vector<std::string>> seen_slates;
    Rng dummy(0);
    for (int j = 0; j < per_page; ++j) {
      std::vector<std::pair<std::pair<int, std::uint32_t>, float>> undo;
      if (j > 0) {
        // small weight jitter diversifies the greedy pick without retraining
        Rng jitter(derive_seed(seed, (static_cast<std::uint64_t>(page) << 16) |
                                         static_cast<std::uint64_t>(j)));
        for (int p = 0; p < kNumPositions; ++p) {
          auto& weights = work.positions[static_cast<std::size_t>(p)].weights;
          for (std::uint32_t idx : active[static_cast<std::size_t>(p)]) {
            undo.push_back({{p, idx}, weights[idx]});
            weights[idx] += static_cast<float>(0.05 * jitter.normal());
          }
        }
      }
      StitchOutcome outcome = stitch_with(work, titles, descs,
                                          StitchMode::Exploit, 0.0, dummy,
                                          features);
      for (auto it = undo.rbegin(); it != undo.rend(); ++it) {
        work.positions[static_cast<std::size_t>(it->first.first)]
            .weights[it->first.second] = it->second;
      }
      std::vector<std::string> slate;
      for (const AdAsset* a : outcome.ad.filled()) slate.push_back(a->id);
      if (std::find(seen_slates.begin(), seen_slates.end(), slate) !=
          seen_slates.end()) {
        continue;
      }
      seen_slates.push_back(std::move(slate));
      candidates_[page].push_back(outcome.ad);
    }
  }
}

const char* PrestitchPolicy::name() const { return "prestitch"; }

StitchOutcome PrestitchPolicy::decide(const World& world, std::size_t page,
                                      std::size_t query, Rng&) {
  const auto& cands = candidates_[page];
  if (cands.empty()) {
    throw std::logic_error("prestitch decide on a page with no candidates");
  }
  auto& cached = scores_[page][query];
  if (!cached) {
    std::vector<double> scores;
    scores.reserve(cands.size());
    const Query& q = world.queries(page)[query];
    for (const auto& ad : cands) {
      double sum = 0.0;
      for (int p = 0; p < kNumPositions; ++p) {
        Position pos = static_cast<Position>(p);
        const auto& slot = slot_of(ad, pos);
        if (!slot) continue;
        sum += lr_score(bank_->at(pos),
                        featurize(*slot, q, pos, bank_->hash_bits));
      }
      scores.push_back(sum);
    }
    cached = std::move(scores);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < cached->size(); ++i) {
    if ((*cached)[i] > (*cached)[best]) best = i;
  }
  StitchOutcome out;
  out.ad = cands[best];
  out.evaluations = static_cast<int>(cands.size());
  return out;
}

EpisodeLog simulate(const World& world, StitchPolicy& policy,
                    std::uint64_t n_srpv, const SimOptions& options) {
  EpisodeLog log;
  log.policy = policy.name();
  log.run_seed = options.run_seed;
  log.shards.resize(static_cast<std::size_t>(world.spec().bootstrap_shards));

  Rng rng(derive_seed(options.run_seed, 0xA11CE5ULL));
  for (std::uint64_t i = 0; i < n_srpv; ++i) {
    ShardTally& shard = log.shards[i % log.shards.size()];
    ++log.srpv;
    ++shard.srpv;
    std::size_t page = rng.uniform_index(world.page_count());
    if (!world.servable(page)) continue;
    std::size_t query = rng.uniform_index(world.queries(page).size());

    StitchOutcome outcome = policy.decide(world, page, query, rng);
    bool won = rng.bernoulli(world.win_prob(outcome.ad, page, query));
    bool clicked = false;
    if (won) {
      ++log.impressions;
      ++shard.impressions;
      clicked = rng.bernoulli(world.click_prob(outcome.ad, page, query));
      if (clicked) {
        ++log.clicks;
        ++shard.clicks;
        log.revenue += world.spec().revenue_per_click;
        shard.revenue += world.spec().revenue_per_click;
        if (rng.bernoulli(world.quick_back_prob(outcome.ad))) {
          ++log.quick_backs;
          ++shard.quick_backs;
        }
      }
    }
    policy.observe(world, page, query, outcome, won, clicked);
  }
  policy.finish_training();
  return log;
}

double two_proportion_z(std::uint64_t s1, std::uint64_t n1, std::uint64_t s2,
                        std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) return 0.0;
  double p1 = static_cast<double>(s1) / static_cast<double>(n1);
  double p2 = static_cast<double>(s2) / static_cast<double>(n2);
  double pooled = static_cast<double>(s1 + s2) / static_cast<double>(n1 + n2);
  double var = pooled * (1.0 - pooled) *
               (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2));
  if (var <= 0.0) return 0.0;
  return (p1 - p2) / std::sqrt(var);
}

namespace {

constexpr double kZCritical = 1.959963984540054;  // two-sided 5%

MetricDelta make_delta(double treatment, double control) {
  MetricDelta d;
  d.treatment = treatment;
  d.control = control;
  d.defined = control != 0.0;
  if (d.defined) d.delta_pct = (treatment - control) / control * 100.0;
  return d;
}

struct BootMetrics {
  double rpm = 0.0;
  double iy = 0.0;
};

BootMetrics resample(const EpisodeLog& log, Rng& rng) {
  std::uint64_t srpv = 0, impressions = 0;
  double revenue = 0.0;
  const std::size_t n = log.shards.size();
  for (std::size_t k = 0; k < n; ++k) {
    const ShardTally& s = log.shards[rng.uniform_index(n)];
    srpv += s.srpv;
    impressions += s.impressions;
    revenue += s.revenue;
  }
  BootMetrics m;
  if (srpv > 0) {
    m.rpm = revenue / static_cast<double>(srpv) * 1000.0;
    m.iy = static_cast<double>(impressions) / static_cast<double>(srpv);
  }
  return m;
}

bool interval_excludes_zero(std::vector<double>& deltas) {
  std::sort(deltas.begin(), deltas.end());
  const std::size_t n = deltas.size();
  double lo = deltas[static_cast<std::size_t>(0.025 * static_cast<double>(n))];
  double hi = deltas[std::min(n - 1, static_cast<std::size_t>(
                                         0.975 * static_cast<double>(n)))];
  return lo > 0.0 || hi < 0.0;
}

}  // namespace

AbReport ab_compare(const EpisodeLog& treatment, const EpisodeLog& control,
                    std::uint64_t seed, int resamples) {
  if (treatment.shards.empty() || control.shards.empty()) {
    throw std::invalid_argument("ab_compare requires shard tallies on both arms");
  }
  if (resamples < 10) throw std::invalid_argument("resamples must be >= 10");

  BusinessMetrics tm = business_metrics(treatment);
  BusinessMetrics cm = business_metrics(control);

  AbReport report;
  report.seed = seed;
  report.resamples = resamples;
  report.rpm = make_delta(tm.rpm, cm.rpm);
  report.iy = make_delta(tm.iy, cm.iy);
  report.ctr = make_delta(tm.ctr, cm.ctr);
  report.qbr = make_delta(tm.qbr, cm.qbr);

  report.ctr_z = two_proportion_z(treatment.clicks, treatment.impressions,
                                  control.clicks, control.impressions);
  report.ctr.significant = std::abs(report.ctr_z) > kZCritical;
  report.qbr_z = two_proportion_z(treatment.quick_backs, treatment.clicks,
                                  control.quick_backs, control.clicks);
  report.qbr.significant = std::abs(report.qbr_z) > kZCritical;

  Rng rng(derive_seed(seed, 0xB007ULL));
  std::vector<double> d_rpm(static_cast<std::size_t>(resamples));
  std::vector<double> d_iy(static_cast<std::size_t>(resamples));
  for (int rep = 0; rep < resamples; ++rep) {
    BootMetrics t = resample(treatment, rng);
    BootMetrics c = resample(control, rng);
    d_rpm[static_cast<std::size_t>(rep)] = t.rpm - c.rpm;
    d_iy[static_cast<std::size_t>(rep)] = t.iy - c.iy;
  }
  report.rpm.significant = interval_excludes_zero(d_rpm);
  report.iy.significant = interval_excludes_zero(d_iy);
  return report;
}

double expected_click_rate(const World& world, StitchPolicy& policy) {
  double sum = 0.0;
  std::size_t count = 0;
  Rng rng(0);
  for (std::size_t page = 0; page < world.page_count(); ++page) {
    if (!world.servable(page)) continue;
    for (std::size_t q = 0; q < world.queries(page).size(); ++q) {
      StitchOutcome outcome = policy.decide(world, page, q, rng);
      sum += world.click_prob(outcome.ad, page, q);
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

namespace {

StitchedAd greedy_truth_stitch(const World& world, std::size_t page,
                               std::optional<std::size_t> fixed_query) {
  const auto& titles = world.titles(page);
  const auto& descs = world.descriptions(page);
  const std::size_t nq = world.queries(page).size();
  StitchedAd ad;
  std::vector<bool> used_t(titles.size(), false), used_d(descs.size(), false);
  for (int p = 0; p < kNumPositions; ++p) {
    Position pos = static_cast<Position>(p);
    bool is_title = is_title_position(pos);
    const auto& pool = is_title ? titles : descs;
    auto& used = is_title ? used_t : used_d;
    std::ptrdiff_t best = -1;
    double best_margin = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      double margin = 0.0;
      if (fixed_query) {
        margin = world.click_margin(page, *fixed_query, is_title, i, pos);
      } else {
        for (std::size_t q = 0; q < nq; ++q) {
          margin += world.click_margin(page, q, is_title, i, pos);
        }
        margin /= static_cast<double>(nq);
      }
      if (best < 0 || margin > best_margin ||
          (margin == best_margin &&
           pool[i].id < pool[static_cast<std::size_t>(best)].id)) {
        best = static_cast<std::ptrdiff_t>(i);
        best_margin = margin;
      }
    }
    if (best < 0) continue;
    used[static_cast<std::size_t>(best)] = true;
    slot_of(ad, pos) = pool[static_cast<std::size_t>(best)];
  }
  return ad;
}

}  // namespace

StitchedAd oracle_fixed_stitch(const World& world, std::size_t page) {
  return greedy_truth_stitch(world, page, std::nullopt);
}

double oracle_fixed_click_rate(const World& world) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t page = 0; page < world.page_count(); ++page) {
    if (!world.servable(page)) continue;
    StitchedAd ad = oracle_fixed_stitch(world, page);
    for (std::size_t q = 0; q < world.queries(page).size(); ++q) {
      sum += world.click_prob(ad, page, q);
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

StitchedAd oracle_query_stitch(const World& world, std::size_t page,
                               std::size_t query) {
  return greedy_truth_stitch(world, page, query);
}

double oracle_query_click_rate(const World& world) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t page = 0; page < world.page_count(); ++page) {
    if (!world.servable(page)) continue;
    for (std::size_t q = 0; q < world.queries(page).size(); ++q) {
      sum += world.click_prob(oracle_query_stitch(world, page, q), page, q);
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace adstitch
