#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "adstitch/features.hpp"

namespace adstitch {

// One logistic regression head over the hashed feature space. Weights are
// float32 so checkpoints round-trip bit-exactly; accumulation happens in
// double. grad_sum tracks the absolute gradient mass each weight has seen,
// the exploration side's evidence counter.
struct PositionModel {
  Position position = Position::T1;
  std::vector<float> weights;
  std::vector<float> grad_sum;
  double bias = 0.0;
  std::uint64_t updates_seen = 0;
};

struct ModelBank {
  int hash_bits = 0;
  std::array<PositionModel, kNumPositions> positions;

  static ModelBank make(int hash_bits);

  PositionModel& at(Position p) {
    return positions[static_cast<std::size_t>(static_cast<int>(p))];
  }
  const PositionModel& at(Position p) const {
    return positions[static_cast<std::size_t>(static_cast<int>(p))];
  }
};

double logistic(double z);
double logistic_loss(double p, int label);

// Raw margin bias + sum of active weights; throws std::out_of_range on an
// index outside the table.
double lr_margin(const PositionModel& model, const FeatureVector& features);

// Predicted probability logistic(margin).
double lr_score(const PositionModel& model, const FeatureVector& features);

// Mean accumulated gradient mass over the active features, scaled; the
// pseudo trial count feeding the sampling posterior.
double trial_count(const PositionModel& model, const FeatureVector& features,
                   double trial_scale);

struct TrainExample {
  FeatureVector features;
  int label = 0;  // 0 or 1
};

// Plain SGD on logistic loss; one pass, in order. Callers batch upstream.
void train_online(PositionModel& model, std::span<const TrainExample> batch,
                  double learning_rate);

}  // namespace adstitch
