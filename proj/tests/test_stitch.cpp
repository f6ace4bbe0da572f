#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "adstitch/checkpoint.hpp"
#include "adstitch/features.hpp"
#include "adstitch/hash.hpp"
#include "adstitch/model.hpp"
#include "adstitch/stitch.hpp"

using namespace adstitch;
using doctest::Approx;

namespace {

AdAsset asset(const std::string& id, AssetKind kind, const std::string& text) {
  AdAsset a;
  a.id = id;
  a.page_url = "https://x.example.com/";
  a.kind = kind;
  a.text = text;
  a.source = AssetSource::Advertiser;
  return a;
}

}  // namespace

TEST_CASE("fnv1a64 matches published vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("hello") == 0xa430d84680aabd0bULL);
  CHECK(hex64(0xcbf29ce484222325ULL) == "cbf29ce484222325");
  CHECK(hex64(0x1ULL) == "0000000000000001");
}

TEST_CASE("position names roundtrip") {
  for (int i = 0; i < kNumPositions; ++i) {
    Position p = static_cast<Position>(i);
    CHECK(position_from_string(to_string(p)) == p);
  }
  CHECK(is_title_position(Position::T1));
  CHECK(is_title_position(Position::T3));
  CHECK_FALSE(is_title_position(Position::D1));
  CHECK_FALSE(is_title_position(Position::D2));
  CHECK_THROWS(position_from_string("T9"));
}

TEST_CASE("featurize_salted reproduces frozen index sets") {
  // independently computed reference: 1 whole-text + 1 length bucket +
  // 3 unigrams + 2 bigrams + 2 query tokens * (3 + 2) crosses = 17 features
  FeatureVector fv =
      featurize_salted("Red Shoes Sale", {"buy", "shoes"}, Position::T1, 18, "");
  const std::vector<std::uint32_t> expected = {
      700,    5516,   21680,  22718,  41205,  46938,  61986,  83554, 98340,
      118910, 172581, 180607, 185876, 188474, 197189, 210256, 242000};
  CHECK(fv.indices == expected);

  // asset-only emission under an extra salt channel
  FeatureVector chan = featurize_salted("Red Shoes Sale", {}, Position::D2, 18, "C");
  const std::vector<std::uint32_t> expected_chan = {1442,   42894,  68693, 139444,
                                                    139938, 154211, 161068};
  CHECK(chan.indices == expected_chan);
}

TEST_CASE("featurize pins single hashed emissions") {
  CHECK(fnv1a64("T1|U|shoes") == 0x1cba3badc0eea225ULL);
  CHECK((fnv1a64("T1|U|shoes") & ((1ULL << 22) - 1)) == 3056165);
  FeatureVector fv = featurize_salted("shoes", {}, Position::T1, 22, "");
  CHECK(std::count(fv.indices.begin(), fv.indices.end(), 3056165u) == 1);

  CHECK(fnv1a64("D1|W|free shipping") == 0xb36de6859f63f7afULL);
  FeatureVector wv = featurize_salted("Free  Shipping", {}, Position::D1, 22, "");
  CHECK(std::count(wv.indices.begin(), wv.indices.end(), 2357167u) == 1);
}

TEST_CASE("featurize output is sorted, unique and slot-salted") {
  FeatureVector fv =
      featurize_salted("red shoes red shoes", {"red"}, Position::T2, 16, "");
  CHECK(std::is_sorted(fv.indices.begin(), fv.indices.end()));
  std::set<std::uint32_t> unique(fv.indices.begin(), fv.indices.end());
  CHECK(unique.size() == fv.indices.size());

  // same inputs under a different slot hash elsewhere
  FeatureVector other =
      featurize_salted("red shoes red shoes", {"red"}, Position::T3, 16, "");
  CHECK(fv.indices != other.indices);

  // an extra salt opens a separate namespace
  FeatureVector salted =
      featurize_salted("red shoes red shoes", {"red"}, Position::T2, 16, "W");
  CHECK(fv.indices != salted.indices);

  CHECK_THROWS(featurize_salted("  ", {}, Position::T1, 16, ""));
  CHECK_THROWS(featurize_salted("x", {}, Position::T1, 0, ""));
  CHECK_THROWS(featurize_salted("x", {}, Position::T1, 31, ""));

  AdAsset a = asset("t-1", AssetKind::Title, "Red Shoes Sale");
  Query q = Query::make("buy shoes");
  FeatureVector via_asset = featurize(a, q, Position::T1, 18);
  FeatureVector direct =
      featurize_salted("Red Shoes Sale", {"buy", "shoes"}, Position::T1, 18, "");
  CHECK(via_asset.indices == direct.indices);
}

TEST_CASE("logistic matches frozen values and stays bounded") {
  CHECK(logistic(0.0) == Approx(0.5).epsilon(1e-15));
  CHECK(logistic(0.5) == Approx(0.6224593312018546).epsilon(1e-15));
  CHECK(logistic(-0.5) == Approx(1.0 - 0.6224593312018546).epsilon(1e-12));
  CHECK(logistic(1000.0) == Approx(1.0).epsilon(1e-15));
  CHECK(logistic(-1000.0) == Approx(0.0).epsilon(1e-15));
  CHECK(logistic(-1000.0) >= 0.0);
}

TEST_CASE("logistic_loss clamps away from the log singularity") {
  CHECK(logistic_loss(0.5, 1) == Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(logistic_loss(0.5, 0) == Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(std::isfinite(logistic_loss(0.0, 1)));
  CHECK(std::isfinite(logistic_loss(1.0, 0)));
  CHECK(logistic_loss(0.9, 1) < logistic_loss(0.1, 1));
}

TEST_CASE("lr_margin sums bias plus active weights") {
  ModelBank bank = ModelBank::make(8);
  PositionModel& m = bank.at(Position::T1);
  m.bias = 0.25;
  m.weights[3] = 0.5f;
  m.weights[10] = -0.125f;
  FeatureVector fv;
  fv.indices = {3, 10};
  CHECK(lr_margin(m, fv) == Approx(0.625).epsilon(1e-12));
  CHECK(lr_score(m, fv) == Approx(logistic(0.625)).epsilon(1e-15));

  FeatureVector oob;
  oob.indices = {256};
  CHECK_THROWS_AS(lr_margin(m, oob), std::out_of_range);
}

TEST_CASE("train_online moves predictions toward the label") {
  ModelBank bank = ModelBank::make(10);
  PositionModel& m = bank.at(Position::D1);
  FeatureVector fv = featurize_salted("great value pick", {}, Position::D1, 10, "");

  double before = lr_score(m, fv);
  CHECK(before == Approx(0.5));

  std::vector<TrainExample> batch(8, TrainExample{fv, 1});
  train_online(m, batch, 0.1);
  double after = lr_score(m, fv);
  CHECK(after > before);
  CHECK(m.updates_seen == 8);
  CHECK(m.bias > 0.0);

  std::vector<TrainExample> down(20, TrainExample{fv, 0});
  train_online(m, down, 0.1);
  CHECK(lr_score(m, fv) < after);
  CHECK(m.updates_seen == 28);

  std::vector<TrainExample> bad = {TrainExample{fv, 2}};
  CHECK_THROWS_AS(train_online(m, bad, 0.1), std::invalid_argument);
}

TEST_CASE("analytic gradient agrees with central finite differences") {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    double z = rng.normal() * 2.0;
    int label = rng.bernoulli(0.5) ? 1 : 0;
    double p = logistic(z);
    double analytic = p - static_cast<double>(label);
    const double h = 1e-6;
    double fd = (logistic_loss(logistic(z + h), label) -
                 logistic_loss(logistic(z - h), label)) /
                (2.0 * h);
    CAPTURE(trial);
    CAPTURE(z);
    CAPTURE(label);
    double rel = std::fabs(fd - analytic) /
                 std::max(1e-8, std::fabs(fd) + std::fabs(analytic));
    CHECK(rel < 1e-5);
  }
}

TEST_CASE("trial_count averages gradient mass over active features") {
  ModelBank bank = ModelBank::make(8);
  PositionModel& m = bank.at(Position::T2);
  m.grad_sum[1] = 2.0f;
  m.grad_sum[3] = 4.0f;
  FeatureVector fv;
  fv.indices = {1, 3};
  CHECK(trial_count(m, fv, 4.0) == Approx(12.0).epsilon(1e-12));
  CHECK(trial_count(m, fv, 1.0) == Approx(3.0).epsilon(1e-12));
  CHECK(trial_count(m, FeatureVector{}, 4.0) == 0.0);
}

TEST_CASE("thompson_sample is a deterministic bounded posterior draw") {
  Rng a(5), b(5);
  for (int i = 0; i < 20; ++i) {
    double da = thompson_sample(0.3, 12.0, a);
    double db = thompson_sample(0.3, 12.0, b);
    CHECK(da == db);
    CHECK(da >= 0.0);
    CHECK(da <= 1.0);
  }
  // heavy evidence concentrates the draw near the predicted rate
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    double d = thompson_sample(0.9, 10000.0, rng);
    CHECK(d > 0.85);
    CHECK(d < 0.95);
  }
  // no evidence: still a legal probability
  double flat = thompson_sample(0.5, 0.0, rng);
  CHECK(flat >= 0.0);
  CHECK(flat <= 1.0);
}

TEST_CASE("count_options follows the shrinking pools") {
  CHECK(count_options(3, 2) == 9);
  CHECK(count_options(10, 10) == 46);
  CHECK(count_options(1, 1) == 2);
  CHECK(count_options(2, 1) == 4);
  CHECK(count_options(1, 2) == 4);
  CHECK_THROWS(count_options(0, 1));
  CHECK_THROWS(count_options(1, 0));
}

TEST_CASE("exploit stitch on a blank model picks lowest ids in slot order") {
  ModelBank bank = ModelBank::make(12);
  StitchRequest request;
  request.query = Query::make("anything");
  request.titles = {asset("t-c", AssetKind::Title, "Gamma Title"),
                    asset("t-a", AssetKind::Title, "Alpha Title"),
                    asset("t-b", AssetKind::Title, "Beta Title")};
  request.descriptions = {asset("d-b", AssetKind::Description, "Second pick here."),
                          asset("d-a", AssetKind::Description, "First pick here.")};
  request.mode = StitchMode::Exploit;

  Rng rng(1);
  StitchOutcome out = stitch(bank, request, rng);
  REQUIRE(out.ad.filled().size() == 5);
  CHECK(out.ad.title1->id == "t-a");
  CHECK(out.ad.title2->id == "t-b");
  CHECK(out.ad.title3->id == "t-c");
  CHECK(out.ad.desc1->id == "d-a");
  CHECK(out.ad.desc2->id == "d-b");
  CHECK(out.evaluations == count_options(3, 2));
  for (const auto& s : out.slot_scores) {
    REQUIRE(s.has_value());
    CHECK(*s == Approx(0.5));
  }
}

TEST_CASE("stitch never reuses an asset and leaves overflow slots empty") {
  ModelBank bank = ModelBank::make(12);
  StitchRequest request;
  request.query = Query::make("q");
  request.titles = {asset("t-1", AssetKind::Title, "Only Title")};
  request.descriptions = {asset("d-1", AssetKind::Description, "Only description.")};

  Rng rng(1);
  StitchOutcome out = stitch(bank, request, rng);
  CHECK(out.ad.title1.has_value());
  CHECK_FALSE(out.ad.title2.has_value());
  CHECK_FALSE(out.ad.title3.has_value());
  CHECK(out.ad.desc1.has_value());
  CHECK_FALSE(out.ad.desc2.has_value());
  CHECK(out.ad.filled().size() == 2);
  CHECK(out.evaluations == count_options(1, 1));

  request.titles.clear();
  CHECK_THROWS_AS(stitch(bank, request, rng), std::invalid_argument);
}

TEST_CASE("a trained preference wins the slot") {
  ModelBank bank = ModelBank::make(12);
  Query q = Query::make("");
  AdAsset hot = asset("t-z", AssetKind::Title, "Alpha One");
  AdAsset cold = asset("t-a", AssetKind::Title, "Beta Two");

  FeatureVector hot_fv = featurize(hot, q, Position::T1, 12);
  FeatureVector cold_fv = featurize(cold, q, Position::T1, 12);
  std::vector<TrainExample> batch;
  for (int i = 0; i < 60; ++i) {
    batch.push_back({hot_fv, 1});
    batch.push_back({cold_fv, 0});
  }
  train_online(bank.at(Position::T1), batch, 0.1);

  StitchRequest request;
  request.query = q;
  request.titles = {cold, hot};  // id order favors the cold asset on ties
  request.descriptions = {asset("d-1", AssetKind::Description, "Desc.")};
  Rng rng(1);
  StitchOutcome out = stitch(bank, request, rng);
  REQUIRE(out.ad.title1.has_value());
  CHECK(out.ad.title1->id == "t-z");
}

TEST_CASE("explore stitch is reproducible for a fixed seed") {
  ModelBank bank = ModelBank::make(12);
  StitchRequest request;
  request.query = Query::make("buy shoes");
  for (int i = 0; i < 6; ++i) {
    request.titles.push_back(
        asset("t-" + std::to_string(i), AssetKind::Title, "Title " + std::to_string(i)));
  }
  for (int i = 0; i < 4; ++i) {
    request.descriptions.push_back(asset("d-" + std::to_string(i),
                                         AssetKind::Description,
                                         "Description " + std::to_string(i) + "."));
  }
  request.mode = StitchMode::Explore;

  Rng r1(42), r2(42);
  StitchOutcome a = stitch(bank, request, r1);
  StitchOutcome b = stitch(bank, request, r2);
  REQUIRE(a.ad.filled().size() == 5);
  for (int i = 0; i < kNumPositions; ++i) {
    Position p = static_cast<Position>(i);
    REQUIRE(slot_of(a.ad, p).has_value());
    CHECK(slot_of(a.ad, p)->id == slot_of(b.ad, p)->id);
  }
  CHECK(a.evaluations == count_options(6, 4));

  // no duplicate assets across slots
  std::set<std::string> ids;
  for (int i = 0; i < kNumPositions; ++i) {
    ids.insert(slot_of(a.ad, static_cast<Position>(i))->id);
  }
  CHECK(ids.size() == 5);
}

TEST_CASE("stitch mode names roundtrip") {
  CHECK(stitch_mode_from_string(to_string(StitchMode::Explore)) == StitchMode::Explore);
  CHECK(stitch_mode_from_string(to_string(StitchMode::Exploit)) == StitchMode::Exploit);
  CHECK_THROWS(stitch_mode_from_string("greedy"));
}

TEST_CASE("checkpoints roundtrip bit-exactly") {
  auto dir = std::filesystem::temp_directory_path() / "adstitch_ckpt_test";
  std::filesystem::create_directories(dir);
  auto path = (dir / "model.ckpt").string();

  ModelBank bank = ModelBank::make(8);
  Rng rng(2024);
  for (auto& m : bank.positions) {
    m.bias = rng.normal();
    m.updates_seen = rng.uniform_index(1000000);
    for (auto& w : m.weights) w = static_cast<float>(rng.normal() * 0.1);
    for (auto& g : m.grad_sum) g = static_cast<float>(std::fabs(rng.normal()));
  }
  save_checkpoint(bank, path);
  ModelBank back = load_checkpoint(path);

  CHECK(back.hash_bits == bank.hash_bits);
  for (int i = 0; i < kNumPositions; ++i) {
    const auto& a = bank.positions[static_cast<std::size_t>(i)];
    const auto& b = back.positions[static_cast<std::size_t>(i)];
    CHECK(a.position == b.position);
    CHECK(a.updates_seen == b.updates_seen);
    CHECK(std::memcmp(&a.bias, &b.bias, sizeof(double)) == 0);
    REQUIRE(a.weights.size() == b.weights.size());
    CHECK(std::memcmp(a.weights.data(), b.weights.data(),
                      a.weights.size() * sizeof(float)) == 0);
    CHECK(std::memcmp(a.grad_sum.data(), b.grad_sum.data(),
                      a.grad_sum.size() * sizeof(float)) == 0);
  }

  // a second save of the loaded bank produces identical bytes
  auto path2 = (dir / "model2.ckpt").string();
  save_checkpoint(back, path2);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(b1 == b2);

  std::filesystem::remove_all(dir);
}

TEST_CASE("checkpoint loader names the broken section") {
  auto dir = std::filesystem::temp_directory_path() / "adstitch_ckpt_err";
  std::filesystem::create_directories(dir);
  auto path = (dir / "model.ckpt").string();

  ModelBank bank = ModelBank::make(6);
  save_checkpoint(bank, path);

  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign((std::istreambuf_iterator<char>(in)),
                 std::istreambuf_iterator<char>());
  }

  auto write_prefix = [&](std::size_t n) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(n));
  };

  write_prefix(4);
  try {
    load_checkpoint(path);
    FAIL("expected truncation error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("truncated in magic") != std::string::npos);
  }

  // cut in the middle of the first weight table
  write_prefix(8 + 4 + 4 + 4 + kNumPositions * 20 + 10);
  try {
    load_checkpoint(path);
    FAIL("expected truncation error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("weights[T1]") != std::string::npos);
  }

  // corrupt magic
  {
    std::string bad = bytes;
    bad[0] = 'X';
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bad.data(), static_cast<std::streamsize>(bad.size()));
  }
  try {
    load_checkpoint(path);
    FAIL("expected magic error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("bad magic") != std::string::npos);
  }

  // trailing garbage
  {
    std::string bad = bytes + "zz";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bad.data(), static_cast<std::streamsize>(bad.size()));
  }
  try {
    load_checkpoint(path);
    FAIL("expected trailing bytes error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("trailing bytes") != std::string::npos);
  }

  // saving with tables that disagree with hash_bits is refused
  ModelBank broken = ModelBank::make(6);
  broken.positions[0].weights.resize(7);
  CHECK_THROWS(save_checkpoint(broken, path));

  std::filesystem::remove_all(dir);
}
