#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <variant>

#include "midpredict/data.hpp"
#include "midpredict/mlp.hpp"
#include "midpredict/svm.hpp"

namespace midpredict {

enum class ModelFamily { Mlp, Svm };

std::string_view family_name(ModelFamily f);
ModelFamily parse_family(std::string_view s);

// A fitted MLP or SVM scoring inputs already in model space.
struct Classifier {
    std::variant<MlpNetwork, SvmModel> body;

    ModelFamily family() const;
    std::size_t input_dim() const;
    // Higher means more conflict-like: P(conflict) for the MLP, the decision value for the SVM.
    double score(std::span<const double> x) const;
    // MLP: conflict iff p >= 0.5. SVM: conflict iff score >= 0.
    Label predict(std::span<const double> x) const;

    friend bool operator==(const Classifier&, const Classifier&) = default;
};

// Everything needed to refit a classifier of the same kind on other data.
struct TrainSettings {
    ModelFamily family = ModelFamily::Svm;
    // svm
    KernelSpec kernel = KernelSpec::rbf(16.75);
    double c = 1.0;
    double kkt_tol = 1e-3;
    // mlp
    std::size_t hidden = 10;
    std::size_t cycles = 100;

    friend bool operator==(const TrainSettings&, const TrainSettings&) = default;
};

using Trainer = std::function<Classifier(const Samples&)>;

Trainer make_trainer(const TrainSettings& settings, std::uint64_t seed);

// Classifier plus the transform from raw variables into its input space.
struct TrainedModel {
    Classifier classifier;
    Normalizer normalizer;
    TrainSettings settings;
    std::uint64_t seed = 0;

    double score_raw(const Features& raw) const { return classifier.score(normalizer.apply(raw)); }
    Label predict_raw(const Features& raw) const { return classifier.predict(normalizer.apply(raw)); }

    friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

// Fits the normalizer on `raw_train`, then trains.
TrainedModel train_model(const Dataset& raw_train, const TrainSettings& settings, std::uint64_t seed,
                         ScgTrace* mlp_trace = nullptr, SmoStats* svm_stats = nullptr);

// Brings `ds` into the model's input space (normalizing raw data, checking normalized data).
Dataset to_model_space(const TrainedModel& model, const Dataset& ds);

std::vector<double> score_all(const Classifier& c, const Samples& s);
std::vector<Label> predict_all(const Classifier& c, const Samples& s);

}  // namespace midpredict
