#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "midpredict/data.hpp"

namespace midpredict {

// Two layers of adaptive weights: tanh hidden units, one logistic output
// giving P(conflict).
struct MlpNetwork {
    std::size_t inputs = 0;
    std::size_t hidden = 0;
    std::vector<double> w1;  // hidden x inputs, row-major: w1[j * inputs + i]
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // hidden (single output row)
    double b2 = 0.0;

    static MlpNetwork zeros(std::size_t inputs, std::size_t hidden);
    // Uniform in +-1/sqrt(fan_in) per layer.
    static MlpNetwork random(std::size_t inputs, std::size_t hidden, std::uint64_t seed);

    std::size_t parameter_count() const { return hidden * inputs + 2 * hidden + 1; }

    // Flat order: w1, b1, w2, b2.
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> p);

    void check() const;

    friend bool operator==(const MlpNetwork&, const MlpNetwork&) = default;
};

double logistic(double a);

double mlp_forward(const MlpNetwork& net, std::span<const double> x);

// Mean binary cross-entropy (predictions clamped to [1e-12, 1-1e-12]) and its
// exact gradient, laid out like the network.
struct LossGradient {
    double loss = 0.0;
    MlpNetwork grad;
};

LossGradient mlp_loss_grad(const MlpNetwork& net, std::span<const std::vector<double>> inputs,
                           std::span<const double> targets);
LossGradient mlp_loss_grad(const MlpNetwork& net, const Samples& batch);

std::vector<double> mlp_targets(std::span<const Label> labels);

struct TrainConfig {
    std::size_t cycles = 100;
    std::uint64_t seed = 0;
    double sigma0 = 1e-4;
    double lambda0 = 1e-6;
    double grad_tol = 1e-8;

    void check() const;
};

struct ScgTrace {
    std::vector<double> accepted_losses;  // loss after initialisation, then after each accepted step
    std::size_t iterations = 0;
    std::size_t accepted = 0;
    bool converged = false;  // stopped on gradient norm
};

// Moller's scaled conjugate gradient, full-batch, from a seeded initialisation.
MlpNetwork scg_train(const Samples& train, std::size_t hidden, const TrainConfig& cfg, ScgTrace* trace = nullptr);
MlpNetwork scg_train(const Dataset& ds, std::size_t hidden, const TrainConfig& cfg, ScgTrace* trace = nullptr);

// Continues training an existing network.
MlpNetwork scg_refine(MlpNetwork net, const Samples& train, const TrainConfig& cfg, ScgTrace* trace = nullptr);

Label mlp_predict(const MlpNetwork& net, std::span<const double> x, double threshold = 0.5);

}  // namespace midpredict
