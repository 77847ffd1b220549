#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "midpredict/data.hpp"

namespace midpredict {

enum class KernelKind { Rbf, Linear };

struct KernelSpec {
    KernelKind kind = KernelKind::Rbf;
    double gamma = 1.0;  // rbf only

    static KernelSpec rbf(double gamma) { return {KernelKind::Rbf, gamma}; }
    static KernelSpec linear() { return {KernelKind::Linear, 0.0}; }

    void check() const;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b);

// Kernel expansion of the decision function. Only points with alpha > 0 are kept;
// support_index records each one's row in the training data.
struct SvmModel {
    std::vector<std::vector<double>> support_x;
    std::vector<int> support_y;  // +1 conflict, -1 peace
    std::vector<double> alpha;
    std::vector<std::size_t> support_index;
    double b = 0.0;
    KernelSpec kernel;
    double c = 1.0;
    std::size_t dim = 0;

    std::size_t support_count() const { return alpha.size(); }

    friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

// C that stands in for the hard-margin problem.
inline constexpr double kHardMarginC = 1e6;

struct SmoConfig {
    double kkt_tol = 1e-3;
    std::size_t max_passes = 10000;  // iteration budget is max_passes * n
    std::uint64_t seed = 0;
    std::size_t cache_limit = 5000;  // full Gram matrix cached up to this many points
    bool record_objective = false;

    void check() const;
};

struct SmoStats {
    std::size_t iterations = 0;
    double final_gap = 0.0;  // maximal violating-pair gap at exit
    double objective = 0.0;
    std::vector<double> objective_trace;  // after each pair update, if requested
};

int label_sign(Label l);

// Solves max sum(a) - 1/2 sum a_i a_j y_i y_j k(x_i, x_j), 0 <= a <= C, sum a_i y_i = 0.
SvmModel smo_solve(std::span<const std::vector<double>> x, std::span<const int> y, const KernelSpec& kernel,
                   double c, const SmoConfig& cfg = {}, SmoStats* stats = nullptr);
SvmModel smo_solve(const Samples& train, const KernelSpec& kernel, double c, const SmoConfig& cfg = {},
                   SmoStats* stats = nullptr);

// Pre-sign score: sum y_i a_i k(x, x_i) + b.
double svm_decision(const SvmModel& model, std::span<const double> x);
Label svm_predict(const SvmModel& model, std::span<const double> x);

// Dense alpha vector over the n training rows.
std::vector<double> full_alpha(const SvmModel& model, std::size_t n);

double dual_objective(std::span<const double> alpha, std::span<const std::vector<double>> x, std::span<const int> y,
                      const KernelSpec& kernel);

// Largest soft-margin KKT residual over the training set.
double kkt_violation(const SvmModel& model, std::span<const std::vector<double>> x, std::span<const int> y);

}  // namespace midpredict
