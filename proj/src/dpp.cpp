#include "adstitch/dpp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "adstitch/hash.hpp"
#include "adstitch/text.hpp"

namespace adstitch {

HashedEmbedder::HashedEmbedder(int dim) : dim_(dim) {
  if (dim < 8) throw std::invalid_argument("embedding dim must be >= 8");
}

Eigen::VectorXd HashedEmbedder::embed(const std::string& text) const {
  std::string folded = case_fold(normalize(text));
  if (folded.empty()) {
    throw std::invalid_argument("cannot embed empty text");
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  auto bump = [&](std::uint64_t h) {
    double sign = (h >> 63) ? 1.0 : -1.0;
    v[static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim_))] += sign;
  };
  for (const auto& tok : tokenize(folded)) {
    bump(fnv1a64("E1|" + tok));
  }
  if (folded.size() >= 3) {
    for (std::size_t i = 0; i + 3 <= folded.size(); ++i) {
      bump(fnv1a64("E3|" + folded.substr(i, 3)));
    }
  }
  double norm = v.norm();
  if (norm == 0.0) {
    // opposing signs cancelled every bucket; fall back to a one-hot of the
    // whole text so the embedding stays unit-length
    v[static_cast<Eigen::Index>(fnv1a64("E0|" + folded) %
                                static_cast<std::uint64_t>(dim_))] = 1.0;
    norm = 1.0;
  }
  return v / norm;
}

Eigen::MatrixXd build_kernel(const std::vector<Eigen::VectorXd>& embeddings,
                             double jitter, const std::vector<double>* quality) {
  const auto n = static_cast<Eigen::Index>(embeddings.size());
  if (n == 0) throw std::invalid_argument("build_kernel: no embeddings");
  const Eigen::Index dim = embeddings.front().size();
  for (const auto& e : embeddings) {
    if (e.size() != dim) {
      throw std::invalid_argument("build_kernel: embedding dimension mismatch");
    }
  }
  if (quality && static_cast<Eigen::Index>(quality->size()) != n) {
    throw std::invalid_argument("build_kernel: quality weight count mismatch");
  }
  Eigen::MatrixXd m(dim, n);
  for (Eigen::Index i = 0; i < n; ++i) m.col(i) = embeddings[static_cast<std::size_t>(i)];
  Eigen::MatrixXd L = m.transpose() * m;
  if (quality) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double qi = (*quality)[static_cast<std::size_t>(i)];
      if (!(qi > 0.0)) {
        throw std::invalid_argument("build_kernel: quality weights must be positive");
      }
      L.row(i) *= qi;
      L.col(i) *= qi;
    }
  }
  L.diagonal().array() += jitter;
  return L;
}

std::vector<int> kdpp_map_greedy(const Eigen::MatrixXd& kernel, int k,
                                 double gain_floor) {
  const auto n = static_cast<int>(kernel.rows());
  if (kernel.cols() != kernel.rows()) {
    throw std::invalid_argument("kdpp_map_greedy: kernel must be square");
  }
  if (k < 1 || k > n) {
    throw std::invalid_argument("kdpp_map_greedy: k must be in [1, n]");
  }

  // d2[j] is the conditional marginal gain of j given the current selection;
  // c[t][j] holds the Cholesky row built at step t.
  Eigen::VectorXd d2 = kernel.diagonal();
  std::vector<Eigen::VectorXd> c;
  c.reserve(static_cast<std::size_t>(k));
  std::vector<bool> picked(static_cast<std::size_t>(n), false);
  std::vector<int> selected;
  selected.reserve(static_cast<std::size_t>(k));

  for (int step = 0; step < k; ++step) {
    int best = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (picked[static_cast<std::size_t>(j)]) continue;
      if (d2[j] > best_gain) {
        best_gain = d2[j];
        best = j;
      }
    }
    if (best < 0 || best_gain <= gain_floor) break;

    picked[static_cast<std::size_t>(best)] = true;
    selected.push_back(best);
    if (static_cast<int>(selected.size()) == k) break;

    double pivot = std::sqrt(best_gain);
    Eigen::VectorXd row(n);
    for (int j = 0; j < n; ++j) {
      if (picked[static_cast<std::size_t>(j)]) {
        row[j] = 0.0;
        continue;
      }
      double e = kernel(best, j);
      for (const auto& prev : c) e -= prev[best] * prev[j];
      e /= pivot;
      row[j] = e;
      d2[j] -= e * e;
    }
    row[best] = pivot;
    c.push_back(std::move(row));
  }
  return selected;
}

namespace {

std::vector<AdAsset> select_kind(const std::vector<AdAsset>& assets,
                                 const HashedEmbedder& embedder, int budget,
                                 double gain_floor) {
  if (budget < 1) throw std::invalid_argument("selection budget must be >= 1");
  if (assets.empty()) return {};
  if (assets.size() <= static_cast<std::size_t>(budget)) return assets;
  std::vector<Eigen::VectorXd> embeddings;
  embeddings.reserve(assets.size());
  for (const auto& a : assets) embeddings.push_back(embedder.embed(a.text));
  Eigen::MatrixXd L = build_kernel(embeddings);
  std::vector<int> idx = kdpp_map_greedy(L, budget, gain_floor);
  std::vector<AdAsset> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(assets[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

SelectionResult select_assets(const CatalogEntry& entry,
                              const HashedEmbedder& embedder, int title_budget,
                              int desc_budget, double gain_floor) {
  SelectionResult result;
  result.titles = select_kind(entry.titles, embedder, title_budget, gain_floor);
  result.descriptions =
      select_kind(entry.descriptions, embedder, desc_budget, gain_floor);
  return result;
}

AssetCatalog select_catalog(const AssetCatalog& catalog,
                            const HashedEmbedder& embedder, int title_budget,
                            int desc_budget, double gain_floor) {
  AssetCatalog out;
  for (const auto& [url, entry] : catalog) {
    SelectionResult sel =
        select_assets(entry, embedder, title_budget, desc_budget, gain_floor);
    CatalogEntry e;
    e.titles = std::move(sel.titles);
    e.descriptions = std::move(sel.descriptions);
    out.emplace(url, std::move(e));
  }
  return out;
}

}  // namespace adstitch
