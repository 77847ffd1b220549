#include "midpredict/sensitivity.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "midpredict/error.hpp"
#include "midpredict/evaluation.hpp"
#include "midpredict/parallel.hpp"

namespace midpredict {

namespace {

void require_seven_inputs(const TrainedModel& model) {
    require_same_dim(kNumVariables, model.classifier.input_dim(), "sensitivity: model input dimension");
}

std::string row_name(Variable v, Direction d) {
    return std::string(variable_abbrev(v)) + "-" + std::string(direction_name(d));
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string lpad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string_view direction_name(Direction d) { return d == Direction::Min ? "min" : "max"; }

std::vector<ExtremeProfile> extreme_profiles(const Normalizer& normalizer) {
    std::vector<ExtremeProfile> out;
    for (auto direction : {Direction::Max, Direction::Min}) {
        for (auto probed : kAllVariables) {
            ExtremeProfile p{probed, direction, {}};
            for (auto v : kAllVariables) {
                const bool at_max = (v == probed) == (direction == Direction::Max);
                p.raw[index_of(v)] = at_max ? normalizer.upper(v) : normalizer.lower(v);
            }
            out.push_back(p);
        }
    }
    return out;
}

std::vector<ProfileOutcome> experiment_one(const TrainedModel& model) {
    require_seven_inputs(model);
    std::vector<ProfileOutcome> out;
    for (const auto& profile : extreme_profiles(model.normalizer)) {
        const auto x = model.normalizer.apply(profile.raw);
        out.push_back({profile, model.classifier.score(x), model.classifier.predict(x)});
    }
    return out;
}

PerturbationReport experiment_two(const TrainedModel& model, const Dataset& test) {
    require_seven_inputs(model);
    if (test.empty()) throw ValidationError("experiment_two: empty test set");
    const Samples base = to_samples(to_model_space(model, test));

    auto count = [&](const Samples& s, PerturbationRow row) {
        for (const auto& x : s.x) (model.classifier.predict(x) == Label::Conflict ? row.conflict : row.peace)++;
        return row;
    };

    PerturbationReport report;
    report.test_size = base.size();
    report.rows.resize(1 + 2 * kNumVariables);
    report.rows[0] = count(base, {"Test set results", std::nullopt, std::nullopt, 0, 0});

    parallel_for(2 * kNumVariables, [&](std::size_t job) {
        const Variable v = kAllVariables[job / 2];
        const Direction d = job % 2 == 0 ? Direction::Min : Direction::Max;
        const double raw = d == Direction::Max ? model.normalizer.upper(v) : model.normalizer.lower(v);
        const double scaled = model.normalizer.apply(v, raw);
        Samples perturbed = base;
        for (auto& x : perturbed.x) x[index_of(v)] = scaled;
        report.rows[1 + job] = count(perturbed, {row_name(v, d), v, d, 0, 0});
    });
    return report;
}

RankingTable single_variable_ranking(const Trainer& trainer, const Dataset& train, const Dataset& test,
                                     std::span<const Variable> order) {
    if (!train.normalized() || !test.normalized()) {
        throw ValidationError("single_variable_ranking expects normalized train and test sets");
    }
    const Samples train_all = to_samples(train);
    const Samples test_all = to_samples(test);

    std::vector<RankingRow> rows(order.size());
    parallel_for(order.size(), [&](std::size_t i) {
        RankingRow row;
        row.variable = order[i];
        const std::size_t column[] = {index_of(order[i])};
        try {
            const Classifier c = trainer(select_columns(train_all, column));
            const Samples test_1d = select_columns(test_all, column);
            row.auc = auc(roc_points(score_all(c, test_1d), test_1d.y));
        } catch (const Error& e) {
            row.failed = true;
            row.note = e.what();
        }
        rows[i] = std::move(row);
    });

    std::sort(rows.begin(), rows.end(), [](const RankingRow& a, const RankingRow& b) {
        if (a.failed != b.failed) return !a.failed;
        if (!a.failed && a.auc != b.auc) return a.auc > b.auc;
        return index_of(a.variable) < index_of(b.variable);
    });
    std::size_t rank = 0;
    for (auto& r : rows) {
        if (!r.failed) r.rank = ++rank;
    }
    return RankingTable{std::move(rows)};
}

void write_experiment_one(const std::vector<ProfileOutcome>& outcomes, std::ostream& out,
                          const Provenance& provenance) {
    std::ostringstream s;
    s << stamp_line(provenance) << '\n';
    s << pad("Profile", 14) << lpad("Score", 12) << "  Prediction\n";
    for (const auto& o : outcomes) {
        const auto opposite = o.profile.direction == Direction::Max ? "others-min" : "others-max";
        s << pad(row_name(o.profile.variable, o.profile.direction), 14) << lpad(format_fixed(o.score, 6), 12) << "  "
          << label_name(o.prediction) << "  (" << opposite << ")\n";
    }
    out << s.str();
}

void write_experiment_one_csv(const std::vector<ProfileOutcome>& outcomes, std::ostream& out,
                              const Provenance& provenance) {
    std::ostringstream s;
    s << stamp_line(provenance) << '\n';
    s << "variable,direction";
    for (auto v : kAllVariables) s << ',' << variable_column(v);
    s << ",score,prediction\n";
    for (const auto& o : outcomes) {
        s << variable_column(o.profile.variable) << ',' << direction_name(o.profile.direction);
        for (double x : o.profile.raw) s << ',' << format_double(x);
        s << ',' << format_double(o.score) << ',' << label_name(o.prediction) << '\n';
    }
    out << s.str();
}

void write_perturbation_report(const PerturbationReport& report, std::ostream& out, const Provenance& provenance) {
    std::ostringstream s;
    s << stamp_line(provenance) << '\n';
    s << pad("Variable", 18) << lpad("Peace", 8) << lpad("War", 8) << '\n';
    for (const auto& r : report.rows) {
        s << pad(r.name, 18) << lpad(std::to_string(r.peace), 8) << lpad(std::to_string(r.conflict), 8) << '\n';
    }
    out << s.str();
}

void write_perturbation_csv(const PerturbationReport& report, std::ostream& out, const Provenance& provenance) {
    std::ostringstream s;
    s << stamp_line(provenance) << '\n';
    s << "row,variable,direction,peace,conflict\n";
    for (const auto& r : report.rows) {
        s << r.name << ',' << (r.variable ? variable_column(*r.variable) : "") << ','
          << (r.direction ? direction_name(*r.direction) : "") << ',' << r.peace << ',' << r.conflict << '\n';
    }
    out << s.str();
}

void write_ranking(const RankingTable& table, std::ostream& out, const Provenance& provenance) {
    std::ostringstream s;
    s << stamp_line(provenance) << '\n';
    s << pad("Rank", 6) << pad("Variable", 14) << lpad("AUC", 8) << '\n';
    for (const auto& r : table.rows) {
        if (r.failed) {
            s << pad("-", 6) << pad(std::string(variable_name(r.variable)), 14) << "  failed: " << r.note << '\n';
        } else {
            s << pad(std::to_string(r.rank), 6) << pad(std::string(variable_name(r.variable)), 14)
              << lpad(format_fixed(r.auc, 4), 8) << '\n';
        }
    }
    out << s.str();
}

void write_ranking_csv(const RankingTable& table, std::ostream& out, const Provenance& provenance) {
    std::ostringstream s;
    s << stamp_line(provenance) << '\n';
    s << "rank,variable,auc,note\n";
    for (const auto& r : table.rows) {
        s << (r.failed ? std::string() : std::to_string(r.rank)) << ',' << variable_column(r.variable) << ','
          << (r.failed ? std::string() : format_double(r.auc)) << ',' << (r.failed ? "failed" : "") << '\n';
    }
    out << s.str();
}

}  // namespace midpredict
