#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "midpredict/classifier.hpp"
#include "midpredict/data.hpp"
#include "midpredict/report.hpp"

namespace midpredict {

enum class Direction { Min, Max };

std::string_view direction_name(Direction d);

// Raw-space input with the probed variable at one extreme and every other
// variable at the opposite extreme.
struct ExtremeProfile {
    Variable variable;
    Direction direction;
    Features raw;
};

// Extremes are the model normalizer's bounds: canonical for Democracy and the
// binaries, training-data min/max for the rest.
std::vector<ExtremeProfile> extreme_profiles(const Normalizer& normalizer);

struct ProfileOutcome {
    ExtremeProfile profile;
    double score;
    Label prediction;
};

// 7 max-against-min profiles followed by 7 min-against-max profiles.
std::vector<ProfileOutcome> experiment_one(const TrainedModel& model);

struct PerturbationRow {
    std::string name;  // "Test set results", "Dem-min", ...
    std::optional<Variable> variable;
    std::optional<Direction> direction;
    std::size_t peace = 0;
    std::size_t conflict = 0;
};

struct PerturbationReport {
    std::vector<PerturbationRow> rows;  // baseline first, then (variable, min/max) in variable order
    std::size_t test_size = 0;

    const PerturbationRow& baseline() const { return rows.front(); }
};

// Overwrites one variable across the whole test set with each extreme and
// recounts predictions. Raw test data is normalized with the model's transform.
PerturbationReport experiment_two(const TrainedModel& model, const Dataset& test);

struct RankingRow {
    std::size_t rank = 0;  // 0 for failed variables
    Variable variable = Variable::Democracy;
    double auc = 0.0;
    bool failed = false;
    std::string note;
};

struct RankingTable {
    std::vector<RankingRow> rows;  // ranked rows by descending AUC, then failures
};

// Trains on each variable alone and ranks variables by the test AUC. Ties keep
// canonical variable order, so `order` never changes the table.
RankingTable single_variable_ranking(const Trainer& trainer, const Dataset& train, const Dataset& test,
                                     std::span<const Variable> order = kAllVariables);

void write_experiment_one(const std::vector<ProfileOutcome>& outcomes, std::ostream& out, const Provenance& provenance);
void write_experiment_one_csv(const std::vector<ProfileOutcome>& outcomes, std::ostream& out,
                              const Provenance& provenance);
void write_perturbation_report(const PerturbationReport& report, std::ostream& out, const Provenance& provenance);
void write_perturbation_csv(const PerturbationReport& report, std::ostream& out, const Provenance& provenance);
void write_ranking(const RankingTable& table, std::ostream& out, const Provenance& provenance);
void write_ranking_csv(const RankingTable& table, std::ostream& out, const Provenance& provenance);

}  // namespace midpredict
