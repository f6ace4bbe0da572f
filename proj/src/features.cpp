#include "adstitch/features.hpp"

#include <algorithm>
#include <stdexcept>

#include "adstitch/hash.hpp"
#include "adstitch/text.hpp"

namespace adstitch {

const char* to_string(Position p) {
  int i = static_cast<int>(p);
  if (i < 0 || i >= kNumPositions) throw std::invalid_argument("bad position");
  return kPositionNames[static_cast<std::size_t>(i)];
}

Position position_from_string(const std::string& s) {
  for (int i = 0; i < kNumPositions; ++i) {
    if (s == kPositionNames[static_cast<std::size_t>(i)]) {
      return static_cast<Position>(i);
    }
  }
  throw std::invalid_argument("unknown position \"" + s + "\"");
}

bool is_title_position(Position p) {
  return p == Position::T1 || p == Position::T2 || p == Position::T3;
}

FeatureVector featurize_salted(const std::string& asset_text,
                               const std::vector<std::string>& query_tokens,
                               Position position, int hash_bits,
                               const std::string& extra_salt) {
  if (hash_bits < 1 || hash_bits > 30) {
    throw std::invalid_argument("hash_bits must be in [1, 30]");
  }
  std::string norm = normalize(asset_text);
  if (norm.empty()) {
    throw std::invalid_argument("cannot featurize empty asset text");
  }

  std::string salt;
  if (!extra_salt.empty()) {
    salt = extra_salt;
    salt += '|';
  }
  salt += to_string(position);
  salt += '|';

  const std::uint64_t mask = (1ULL << hash_bits) - 1;
  FeatureVector fv;
  std::string buf;
  auto emit = [&](const char* kind, const std::string& payload) {
    buf.assign(salt);
    buf += kind;
    buf += '|';
    buf += payload;
    fv.indices.push_back(static_cast<std::uint32_t>(fnv1a64(buf) & mask));
  };

  emit("W", case_fold(norm));
  std::size_t bucket = utf8_length(norm) / 5;
  if (bucket > 30) bucket = 30;
  emit("L", std::to_string(bucket));

  std::vector<std::string> tokens = tokenize(norm);
  for (const auto& t : tokens) emit("U", t);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    emit("B", tokens[i] + "_" + tokens[i + 1]);
  }
  for (const auto& q : query_tokens) {
    for (const auto& t : tokens) emit("XU", t + "|" + q);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      emit("XB", tokens[i] + "_" + tokens[i + 1] + "|" + q);
    }
  }

  std::sort(fv.indices.begin(), fv.indices.end());
  fv.indices.erase(std::unique(fv.indices.begin(), fv.indices.end()),
                   fv.indices.end());
  return fv;
}

FeatureVector featurize(const AdAsset& asset, const Query& query,
                        Position position, int hash_bits) {
  return featurize_salted(asset.text, query.tokens, position, hash_bits, "");
}

}  // namespace adstitch
