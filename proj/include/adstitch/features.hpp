#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "adstitch/types.hpp"

namespace adstitch {

// The five creative slots, in render order.
enum class Position : int { T1 = 0, T2 = 1, T3 = 2, D1 = 3, D2 = 4 };

inline constexpr int kNumPositions = 5;
inline constexpr std::array<const char*, kNumPositions> kPositionNames = {
    "T1", "T2", "T3", "D1", "D2"};

const char* to_string(Position p);
Position position_from_string(const std::string& s);
bool is_title_position(Position p);

// Sorted, deduplicated hashed feature indices. Values are implicitly 1.
struct FeatureVector {
  std::vector<std::uint32_t> indices;
};

// Binary features of an (asset text, query, slot) triple: whole-text
// identity, length bucket, word unigrams and bigrams, and their crosses with
// query unigrams. Every feature string is salted with the slot name before
// hashing, so the same asset gets distinct indices per slot. extra_salt
// prepends one more namespace on top (used to carve out independent synthetic
// label channels); empty means the serving space.
FeatureVector featurize_salted(const std::string& asset_text,
                               const std::vector<std::string>& query_tokens,
                               Position position, int hash_bits,
                               const std::string& extra_salt);

FeatureVector featurize(const AdAsset& asset, const Query& query,
                        Position position, int hash_bits);

}  // namespace adstitch
