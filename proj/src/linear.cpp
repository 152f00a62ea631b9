#include "phishkit/linear.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "phishkit/errors.hpp"
#include "phishkit/rng.hpp"

namespace phishkit::linear {

using nlohmann::json;

namespace {
constexpr int kFormatVersion = 1;

double raw_score(const LogRegModel& model, const SparseVector& x) {
    double z = model.bias;
    for (std::size_t i = 0; i < x.indices.size(); ++i) {
        if (x.indices[i] >= model.n_features) {
            throw std::out_of_range("logreg: feature index " +
                                    std::to_string(x.indices[i]) +
                                    " out of range for " +
                                    std::to_string(model.n_features) + " features");
        }
        z += model.weights[x.indices[i]] * x.values[i];
    }
    return z;
}

// log(1 + exp(-m)) without overflow; m = z for y=1, -z for y=0.
double log_loss_from_margin(double margin) {
    if (margin > 0.0) return std::log1p(std::exp(-margin));
    return -margin + std::log1p(std::exp(margin));
}

} // namespace

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double mean_loss(const LogRegModel& model, std::span<const SparseVector> X,
                 std::span<const int> y, double l2_lambda) {
    double total = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double z = raw_score(model, X[i]);
        total += log_loss_from_margin(y[i] == 1 ? z : -z);
    }
    double reg = 0.0;
    for (double w : model.weights) reg += w * w;
    return total / static_cast<double>(X.size()) + 0.5 * l2_lambda * reg;
}

LogRegModel train_logreg(std::span<const SparseVector> X, std::span<const int> y,
                         std::uint32_t n_features, const LinearTrainConfig& config) {
    if (X.size() != y.size() || X.size() < 2) {
        throw std::invalid_argument("train_logreg: need |X| == |y| >= 2");
    }
    if (config.learning_rate <= 0.0 || config.epochs < 1) {
        throw std::invalid_argument("train_logreg: bad learning_rate/epochs");
    }
    bool has_pos = false, has_neg = false;
    for (int label : y) {
        (label == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
        throw std::invalid_argument("train_logreg: both classes must be present");
    }
    for (const SparseVector& x : X) {
        if (!x.empty() && x.indices.back() >= n_features) {
            throw std::invalid_argument("train_logreg: feature index exceeds n_features");
        }
    }

    LogRegModel model;
    model.n_features = n_features;
    model.weights.assign(n_features, 0.0);

    const std::size_t n = X.size();
    const std::size_t batch = config.batch_size == 0 ? n : std::min(config.batch_size, n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    Rng rng(config.seed);
    std::vector<double> grad_w(n_features, 0.0);
    double prev = std::numeric_limits<double>::infinity();

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t end = std::min(start + batch, n);
            const double inv = 1.0 / static_cast<double>(end - start);
            std::fill(grad_w.begin(), grad_w.end(), 0.0);
            double grad_b = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const SparseVector& x = X[order[k]];
                const double err = sigmoid(raw_score(model, x)) - y[order[k]];
                for (std::size_t j = 0; j < x.indices.size(); ++j) {
                    grad_w[x.indices[j]] += err * x.values[j];
                }
                grad_b += err;
            }
            if (config.l2_lambda > 0.0) {
                for (std::uint32_t j = 0; j < n_features; ++j) {
                    model.weights[j] -= config.learning_rate *
                        (grad_w[j] * inv + config.l2_lambda * model.weights[j]);
                }
            } else {
                for (std::uint32_t j = 0; j < n_features; ++j) {
                    model.weights[j] -= config.learning_rate * grad_w[j] * inv;
                }
            }
            model.bias -= config.learning_rate * grad_b * inv;
        }
        const double cur = mean_loss(model, X, y, config.l2_lambda);
        if (prev - cur < config.tolerance) break;
        prev = cur;
    }
    return model;
}

double predict_proba(const LogRegModel& model, const SparseVector& x) {
    return sigmoid(raw_score(model, x));
}

int predict(const LogRegModel& model, const SparseVector& x, double threshold) {
    return predict_proba(model, x) >= threshold ? 1 : 0;
}

std::string to_json_string(const LogRegModel& model) {
    json j{{"format_version", kFormatVersion},
           {"model_type", "logreg"},
           {"n_features", model.n_features},
           {"bias", model.bias},
           {"weights", model.weights}};
    return j.dump();
}

LogRegModel from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("logreg: bad model json: ") + e.what());
    }
    if (j.value("format_version", -1) != kFormatVersion) {
        throw DataError("logreg: unsupported format_version");
    }
    if (j.value("model_type", "") != "logreg") {
        throw DataError("logreg: wrong model_type");
    }
    LogRegModel model;
    model.n_features = j.at("n_features").get<std::uint32_t>();
    model.bias = j.at("bias").get<double>();
    model.weights = j.at("weights").get<std::vector<double>>();
    if (model.weights.size() != model.n_features) {
        throw DataError("logreg: weights length does not match n_features");
    }
    return model;
}

void save(const LogRegModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("logreg: cannot write " + path);
    out << to_json_string(model) << '\n';
}

LogRegModel load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("logreg: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

} // namespace phishkit::linear
