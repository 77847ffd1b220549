#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "midpredict/evaluation.hpp"
#include "midpredict/mlp.hpp"
#include "midpredict/selection.hpp"
#include "midpredict/svm.hpp"

namespace midpredict {

struct PipelineConfig {
    std::filesystem::path data;
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
    std::size_t per_class = 500;
    GridSpec grid = GridSpec::default_grid();
    double kkt_tol = 1e-3;
    std::size_t hidden = 10;
    std::size_t cycles = 100;
};

struct Artifact {
    std::string file;
    std::string kind;
    std::string sha256;
};

struct PipelineResult {
    bool ok = false;
    std::string failed_stage;
    std::string error;
    bool input_error = false;  // failure caused by the input data rather than computation
    std::vector<Artifact> artifacts;

    std::optional<CvResult> cv;
    std::optional<ConfusionMatrix> svm_confusion;
    std::optional<ConfusionMatrix> mlp_confusion;
    double svm_auc = 0.0;
    double mlp_auc = 0.0;
};

// Balanced sample -> normalize -> SVM grid search and fixed-architecture MLP ->
// evaluation -> sensitivity reports. Writes every artifact plus manifest.txt
// into out_dir; a failing stage is recorded in the manifest, not thrown.
PipelineResult run_pipeline(const PipelineConfig& cfg);

}  // namespace midpredict
