#include "adstitch/model.hpp"

#include <cmath>
#include <stdexcept>

namespace adstitch {

ModelBank ModelBank::make(int hash_bits) {
  if (hash_bits < 1 || hash_bits > 30) {
    throw std::invalid_argument("hash_bits must be in [1, 30]");
  }
  ModelBank bank;
  bank.hash_bits = hash_bits;
  std::size_t table = std::size_t{1} << hash_bits;
  for (int i = 0; i < kNumPositions; ++i) {
    PositionModel& m = bank.positions[static_cast<std::size_t>(i)];
    m.position = static_cast<Position>(i);
    m.weights.assign(table, 0.0f);
    m.grad_sum.assign(table, 0.0f);
  }
  return bank;
}

double logistic(double z) {
  // split on sign to avoid overflow in exp
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_loss(double p, int label) {
  const double eps = 1e-12;
  if (p < eps) p = eps;
  if (p > 1.0 - eps) p = 1.0 - eps;
  return label ? -std::log(p) : -std::log(1.0 - p);
}

double lr_margin(const PositionModel& model, const FeatureVector& features) {
  double z = model.bias;
  for (std::uint32_t idx : features.indices) {
    if (idx >= model.weights.size()) {
      throw std::out_of_range("feature index outside weight table");
    }
    z += static_cast<double>(model.weights[idx]);
  }
  return z;
}

double lr_score(const PositionModel& model, const FeatureVector& features) {
  return logistic(lr_margin(model, features));
}

double trial_count(const PositionModel& model, const FeatureVector& features,
                   double trial_scale) {
  if (features.indices.empty()) return 0.0;
  double sum = 0.0;
  for (std::uint32_t idx : features.indices) {
    if (idx >= model.grad_sum.size()) {
      throw std::out_of_range("feature index outside grad_sum table");
    }
    sum += static_cast<double>(model.grad_sum[idx]);
  }
  return sum / static_cast<double>(features.indices.size()) * trial_scale;
}

void train_online(PositionModel& model, std::span<const TrainExample> batch,
                  double learning_rate) {
  for (const TrainExample& ex : batch) {
    if (ex.label != 0 && ex.label != 1) {
      throw std::invalid_argument("train_online: label must be 0 or 1");
    }
    double p = lr_score(model, ex.features);
    double g = p - static_cast<double>(ex.label);
    double step = learning_rate * g;
    for (std::uint32_t idx : ex.features.indices) {
      model.weights[idx] = static_cast<float>(
          static_cast<double>(model.weights[idx]) - step);
      model.grad_sum[idx] = static_cast<float>(
          static_cast<double>(model.grad_sum[idx]) + std::abs(g));
    }
    model.bias -= step;
    ++model.updates_seen;
  }
}

}  // namespace adstitch
