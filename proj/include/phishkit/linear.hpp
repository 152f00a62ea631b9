#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "phishkit/sparse.hpp"

namespace phishkit::linear {

struct LogRegModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::uint32_t n_features = 0;
};

struct LinearTrainConfig {
    double learning_rate = 0.1;
    int epochs = 100;
    double l2_lambda = 1e-4;
    double tolerance = 1e-6;   // early stop on mean-loss improvement below this
    std::uint64_t seed = 42;
    std::size_t batch_size = 32; // 0 = full batch
};

// Numerically stable logistic function; no overflow for any finite z.
double sigmoid(double z);

// Mini-batch gradient descent on mean cross-entropy + (l2_lambda/2)*||w||^2
// (bias unregularized). Seeded shuffling, deterministic given (data, config).
LogRegModel train_logreg(std::span<const SparseVector> X, std::span<const int> y,
                         std::uint32_t n_features, const LinearTrainConfig& config);

// Regularized mean loss of the model on (X, y); the quantity training drives
// down and the early-stop criterion watches.
double mean_loss(const LogRegModel& model, std::span<const SparseVector> X,
                 std::span<const int> y, double l2_lambda);

double predict_proba(const LogRegModel& model, const SparseVector& x);

// Threshold ties classify as positive.
int predict(const LogRegModel& model, const SparseVector& x, double threshold = 0.5);

std::string to_json_string(const LogRegModel& model);
LogRegModel from_json_string(const std::string& text);
void save(const LogRegModel& model, const std::string& path);
LogRegModel load(const std::string& path);

} // namespace phishkit::linear
