#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adstitch/types.hpp"

namespace adstitch {

// Deterministic sign-hash text embedding: word unigrams plus character
// trigrams of the folded text, bucketed into a fixed-dimension vector and
// L2-normalized. No learned state, so embeddings never drift between runs.
class HashedEmbedder {
 public:
  explicit HashedEmbedder(int dim = 256);

  int dim() const { return dim_; }

  // Throws on text that normalizes to empty.
  Eigen::VectorXd embed(const std::string& text) const;

 private:
  int dim_;
};

// Similarity kernel L = S + jitter * I over unit embeddings, optionally
// quality-reweighted as diag(q) * S * diag(q) before the jitter. The jitter
// keeps Cholesky pivots positive when texts collide.
Eigen::MatrixXd build_kernel(const std::vector<Eigen::VectorXd>& embeddings,
                             double jitter = 1e-6,
                             const std::vector<double>* quality = nullptr);

// Greedy MAP inference for a k-DPP: repeatedly add the item with the largest
// conditional marginal gain (the squared Cholesky pivot), updating residuals
// incrementally in O(n) per step. Ties break to the lowest index; stops early
// once the best gain falls to gain_floor. Returns indices in pick order.
std::vector<int> kdpp_map_greedy(const Eigen::MatrixXd& kernel, int k,
                                 double gain_floor = 1e-9);

struct SelectionResult {
  std::vector<AdAsset> titles;
  std::vector<AdAsset> descriptions;
};

// Runs the greedy k-DPP per kind over one page's assets, budgets T titles and
// D descriptions. Output order is pick order.
SelectionResult select_assets(const CatalogEntry& entry,
                              const HashedEmbedder& embedder, int title_budget,
                              int desc_budget, double gain_floor = 1e-9);

AssetCatalog select_catalog(const AssetCatalog& catalog,
                            const HashedEmbedder& embedder, int title_budget,
                            int desc_budget, double gain_floor = 1e-9);

}  // namespace adstitch
