#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "midpredict/classifier.hpp"
#include "midpredict/data.hpp"
#include "midpredict/report.hpp"
#include "midpredict/svm.hpp"

namespace midpredict {

using Fold = std::vector<std::size_t>;  // sorted row indices

// Stratified: per-class counts in any two folds differ by at most one.
std::vector<Fold> kfold_split(std::span<const Label> labels, std::size_t k, std::uint64_t seed);
std::vector<Fold> kfold_split(const Dataset& ds, std::size_t k, std::uint64_t seed);

// Accuracy on each held-out fold after training on the other k-1.
std::vector<double> cross_validate(const Samples& data, std::span<const Fold> folds, const Trainer& trainer);

struct GridSpec {
    std::vector<double> c_values;
    std::vector<double> gamma_values;
    std::size_t k = 10;
    std::uint64_t seed = 0;

    // C in 2^-2..2^6, gamma in 2^-4..2^6.
    static GridSpec default_grid(std::uint64_t seed = 0);
    void check() const;
};

struct CvCell {
    double c = 0.0;
    double gamma = 0.0;
    std::vector<double> fold_accuracy;
    double mean_accuracy = 0.0;
    bool failed = false;
    std::string failure;
};

struct CvResult {
    std::vector<CvCell> cells;  // C-major, gamma-minor, both ascending
    std::size_t best_index = 0;
    double best_c = 0.0;
    double best_gamma = 0.0;
    std::size_t k = 0;
    std::uint64_t seed = 0;

    const CvCell& best() const { return cells.at(best_index); }
};

// RBF SVM grid; ties on mean accuracy go to the smaller C, then the smaller gamma.
CvResult grid_search(const Dataset& ds, const GridSpec& grid, const SmoConfig& solver = {});

void write_cv_report(const CvResult& result, std::ostream& out, const Provenance& provenance);

struct HiddenCell {
    std::size_t hidden = 0;
    std::vector<double> fold_accuracy;
    double mean_accuracy = 0.0;
};

struct HiddenSearchResult {
    std::vector<HiddenCell> cells;
    std::size_t best_hidden = 0;
};

// Cross-validates an MLP for each hidden-unit count in `hidden_values`.
HiddenSearchResult hidden_search(const Dataset& ds, std::span<const std::size_t> hidden_values, const TrainConfig& cfg,
                                 std::size_t k, std::uint64_t seed);

}  // namespace midpredict
