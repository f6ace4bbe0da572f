#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <vector>

#include "adstitch/dpp.hpp"
#include "adstitch/rng.hpp"

using namespace adstitch;
using doctest::Approx;

namespace {

Eigen::VectorXd random_unit(Rng& rng, int dim) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  double n = v.norm();
  if (n == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / n;
}

double log_det_psd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  REQUIRE(llt.info() == Eigen::Success);
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

// Reference greedy: recompute the full log-determinant for every candidate at
// every step. Slow but independent of the incremental residual updates.
std::vector<int> naive_map_greedy(const Eigen::MatrixXd& kernel, int k,
                                  double gain_floor) {
  const int n = static_cast<int>(kernel.rows());
  std::vector<int> selected;
  std::vector<bool> picked(static_cast<std::size_t>(n), false);
  double current = 0.0;  // log det of the selected submatrix
  for (int step = 0; step < k; ++step) {
    int best = -1;
    double best_logdet = 0.0;
    for (int j = 0; j < n; ++j) {
      if (picked[static_cast<std::size_t>(j)]) continue;
      std::vector<int> trial = selected;
      trial.push_back(j);
      Eigen::MatrixXd sub(trial.size(), trial.size());
      for (std::size_t a = 0; a < trial.size(); ++a) {
        for (std::size_t b = 0; b < trial.size(); ++b) {
          sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
              kernel(trial[a], trial[b]);
        }
      }
      double ld = log_det_psd(sub);
      if (best < 0 || ld > best_logdet) {
        best_logdet = ld;
        best = j;
      }
    }
    if (best < 0) break;
    double gain = std::exp(best_logdet - current);
    if (gain <= gain_floor) break;
    picked[static_cast<std::size_t>(best)] = true;
    selected.push_back(best);
    current = best_logdet;
  }
  return selected;
}

AdAsset title(const std::string& id, const std::string& text) {
  AdAsset a;
  a.id = id;
  a.page_url = "https://x.example.com/";
  a.kind = AssetKind::Title;
  a.text = text;
  a.source = AssetSource::Generated;
  return a;
}

}  // namespace

TEST_CASE("embeddings are unit length and deterministic") {
  HashedEmbedder embedder(64);
  Eigen::VectorXd a = embedder.embed("Red Running Shoes");
  Eigen::VectorXd b = embedder.embed("Red Running Shoes");
  CHECK(a.norm() == Approx(1.0).epsilon(1e-12));
  CHECK((a - b).norm() == 0.0);

  // normalization and folding happen before hashing
  Eigen::VectorXd c = embedder.embed("  red   RUNNING shoes ");
  CHECK((a - c).norm() == 0.0);

  Eigen::VectorXd d = embedder.embed("Blue Hiking Boots");
  CHECK((a - d).norm() > 0.1);

  CHECK_THROWS(embedder.embed("   "));
  CHECK_THROWS(HashedEmbedder(4));
}

TEST_CASE("build_kernel produces a symmetric positive definite matrix") {
  HashedEmbedder embedder(64);
  std::vector<Eigen::VectorXd> embeddings = {
      embedder.embed("red shoes"), embedder.embed("blue boots"),
      embedder.embed("running gear sale"), embedder.embed("red shoes")};
  const double jitter = 1e-6;
  Eigen::MatrixXd L = build_kernel(embeddings, jitter);
  REQUIRE(L.rows() == 4);
  REQUIRE(L.cols() == 4);
  CHECK((L - L.transpose()).cwiseAbs().maxCoeff() == Approx(0.0).epsilon(1e-15));
  for (int i = 0; i < 4; ++i) CHECK(L(i, i) == Approx(1.0 + jitter).epsilon(1e-12));
  // duplicate texts give an off-diagonal of exactly their unit dot product
  CHECK(L(0, 3) == Approx(1.0).epsilon(1e-12));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);

  // quality weights scale rows and columns before the jitter lands
  std::vector<double> quality = {2.0, 0.5, 1.0, 1.0};
  Eigen::MatrixXd Q = build_kernel(embeddings, jitter, &quality);
  CHECK(Q(0, 0) == Approx(4.0 + jitter).epsilon(1e-12));
  CHECK(Q(0, 1) == Approx(L(0, 1)).epsilon(1e-9));  // 2.0 * 0.5 restores it

  std::vector<double> bad = {1.0, 0.0, 1.0, 1.0};
  CHECK_THROWS(build_kernel(embeddings, jitter, &bad));
  std::vector<double> short_q = {1.0};
  CHECK_THROWS(build_kernel(embeddings, jitter, &short_q));
  CHECK_THROWS(build_kernel({}));
}

TEST_CASE("greedy map selection matches the log-determinant reference") {
  Rng rng(20240817);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 2 + static_cast<int>(rng.uniform_index(7));  // 2..8
    int dim = 8;
    std::vector<Eigen::VectorXd> embeddings;
    for (int i = 0; i < n; ++i) embeddings.push_back(random_unit(rng, dim));
    // distinct quality weights keep the diagonals apart; unit embeddings
    // would tie step one at the level of rounding noise
    std::vector<double> quality;
    for (int i = 0; i < n; ++i) quality.push_back(0.5 + 1.5 * rng.u01());
    Eigen::MatrixXd L = build_kernel(embeddings, 1e-6, &quality);
    int k = 1 + static_cast<int>(rng.uniform_index(
                    static_cast<std::uint64_t>(std::min(n, 4))));
    CAPTURE(trial);
    CAPTURE(n);
    CAPTURE(k);
    std::vector<int> fast = kdpp_map_greedy(L, k, 1e-9);
    std::vector<int> slow = naive_map_greedy(L, k, 1e-9);
    CHECK(fast == slow);
  }
}

TEST_CASE("near duplicates are deferred and the floor stops the walk") {
  HashedEmbedder embedder(64);
  std::vector<Eigen::VectorXd> embeddings = {embedder.embed("red shoes"),
                                             embedder.embed("red shoes"),
                                             embedder.embed("garden hose reel")};
  Eigen::MatrixXd L = build_kernel(embeddings, 1e-6);

  // the exact clone loses to the genuinely different text
  std::vector<int> two = kdpp_map_greedy(L, 2, 1e-9);
  CHECK(two == std::vector<int>{0, 2});

  // with a floor above the clone's residual gain, the walk ends at two picks
  std::vector<int> three = kdpp_map_greedy(L, 3, 1e-4);
  CHECK(three == std::vector<int>{0, 2});

  CHECK_THROWS(kdpp_map_greedy(L, 0, 1e-9));
  CHECK_THROWS(kdpp_map_greedy(L, 4, 1e-9));
  CHECK_THROWS(kdpp_map_greedy(Eigen::MatrixXd::Zero(2, 3), 1, 1e-9));
}

TEST_CASE("select_assets trims pools to budget in pick order") {
  HashedEmbedder embedder(64);
  CatalogEntry entry;
  entry.titles = {title("t-1", "Red Shoes Sale"), title("t-2", "Red Shoes Sale Now"),
                  title("t-3", "Garden Hose Reel"), title("t-4", "Fresh Coffee Beans"),
                  title("t-5", "Red Shoes")};
  entry.descriptions = {title("d-1", "Order today for fast shipping.")};
  entry.descriptions[0].kind = AssetKind::Description;

  SelectionResult sel = select_assets(entry, embedder, 3, 2);
  REQUIRE(sel.titles.size() == 3);
  std::set<std::string> ids;
  for (const auto& a : sel.titles) ids.insert(a.id);
  CHECK(ids.size() == 3);
  // a small pool passes through untouched
  REQUIRE(sel.descriptions.size() == 1);
  CHECK(sel.descriptions[0].id == "d-1");

  // the three picks should cover the three distinct topics
  bool has_garden = ids.count("t-3") > 0;
  bool has_coffee = ids.count("t-4") > 0;
  CHECK(has_garden);
  CHECK(has_coffee);

  CHECK_THROWS(select_assets(entry, embedder, 0, 2));

  AssetCatalog catalog;
  catalog["https://x.example.com/"] = entry;
  AssetCatalog picked = select_catalog(catalog, embedder, 2, 2);
  CHECK(picked.at("https://x.example.com/").titles.size() == 2);
}
