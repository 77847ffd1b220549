#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "midpredict/error.hpp"
#include "midpredict/evaluation.hpp"
#include "midpredict/sensitivity.hpp"

using namespace midpredict;

namespace {

// Linear SVM whose score is 0.5 - scaled democracy.
TrainedModel democracy_model(const Dataset& raw_train) {
    SvmModel m;
    m.kernel = KernelSpec::linear();
    m.dim = kNumVariables;
    std::vector<double> sv(kNumVariables, 0.0);
    sv[index_of(Variable::Democracy)] = 1.0;
    m.support_x = {sv};
    m.support_y = {-1};
    m.alpha = {1.0};
    m.support_index = {0};
    m.b = 0.5;
    return {Classifier{m}, Normalizer::fit(raw_train.specs, raw_train.records), {}, 0};
}

TrainedModel constant_model(const Dataset& raw_train, double b) {
    SvmModel m;
    m.dim = kNumVariables;
    m.b = b;
    return {Classifier{m}, Normalizer::fit(raw_train.specs, raw_train.records), {}, 0};
}

Trainer quick_mlp(std::uint64_t seed) {
    TrainSettings s;
    s.family = ModelFamily::Mlp;
    s.hidden = 2;
    s.cycles = 30;
    return make_trainer(s, seed);
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("extreme profiles sit on the normalizer bounds") {
    const auto raw = generate_synthetic(100, 100, 1.0, 1);
    const auto norm = Normalizer::fit(raw.specs, raw.records);
    const auto profiles = extreme_profiles(norm);
    REQUIRE(profiles.size() == 14);
    std::set<std::pair<int, int>> seen;
    for (std::size_t k = 0; k < profiles.size(); ++k) {
        const auto& p = profiles[k];
        CHECK(p.direction == (k < 7 ? Direction::Max : Direction::Min));
        seen.insert({static_cast<int>(index_of(p.variable)), static_cast<int>(p.direction)});
        for (auto v : kAllVariables) {
            const double x = p.raw[index_of(v)];
            const bool high = (v == p.variable) == (p.direction == Direction::Max);
            CHECK(x == (high ? norm.upper(v) : norm.lower(v)));
            CHECK(norm.apply(v, x) == (high ? 1.0 : 0.0));
        }
    }
    CHECK(seen.size() == 14);
    CHECK(norm.lower(Variable::Democracy) == -10.0);
    CHECK(norm.upper(Variable::Allies) == 1.0);
}

TEST_CASE("experiment one on a constant model") {
    const auto raw = generate_synthetic(50, 50, 1.0, 2);
    const auto out = experiment_one(constant_model(raw, -0.25));
    REQUIRE(out.size() == 14);
    for (const auto& o : out) {
        CHECK(o.score == -0.25);
        CHECK(o.prediction == Label::Peace);
    }
    std::ostringstream text, csv;
    write_experiment_one(out, text, Provenance{2, "d"});
    write_experiment_one_csv(out, csv, Provenance{2, "d"});
    CHECK(text.str().find("Dem-max") != std::string::npos);
    CHECK(lines(csv.str()) == 16);
}

TEST_CASE("experiment one follows a monotone model") {
    const auto raw = generate_synthetic(50, 50, 1.0, 3);
    const auto out = experiment_one(democracy_model(raw));
    for (const auto& o : out) {
        const bool dem_high = (o.profile.variable == Variable::Democracy) == (o.profile.direction == Direction::Max);
        CHECK(o.score == doctest::Approx(dem_high ? -0.5 : 0.5));
        CHECK(o.prediction == (dem_high ? Label::Peace : Label::Conflict));
    }
}

TEST_CASE("experiment two has fifteen rows that each cover the test set") {
    const auto train = generate_synthetic(200, 200, 2.0, 4);
    const auto test = generate_synthetic(300, 100, 2.0, 5);
    const auto model = train_model(train, TrainSettings{}, 4);
    const auto report = experiment_two(model, test);
    REQUIRE(report.rows.size() == 15);
    CHECK(report.test_size == 400);
    CHECK(report.baseline().name == "Test set results");
    CHECK(report.rows[1].name == "Dem-min");
    CHECK(report.rows[2].name == "Dem-max");
    CHECK(report.rows[14].name == "Majpow-max");
    for (const auto& r : report.rows) CHECK(r.peace + r.conflict == 400);

    const auto preds = predict_all(model.classifier, to_samples(to_model_space(model, test)));
    std::size_t conflicts = static_cast<std::size_t>(std::count(preds.begin(), preds.end(), Label::Conflict));
    CHECK(report.baseline().conflict == conflicts);

    std::ostringstream text, csv;
    write_perturbation_report(report, text, Provenance{4, "d"});
    write_perturbation_csv(report, csv, Provenance{4, "d"});
    CHECK(text.str().find("Test set results") != std::string::npos);
    CHECK(lines(csv.str()) == 17);
}

TEST_CASE("experiment two with a monotone model") {
    const auto train = generate_synthetic(100, 100, 2.0, 6);
    const auto test = generate_synthetic(150, 150, 2.0, 7);
    const auto report = experiment_two(democracy_model(train), test);
    const auto& base = report.baseline();
    const auto& dmin = report.rows[1];
    const auto& dmax = report.rows[2];
    CHECK(dmin.conflict == 300);
    CHECK(dmax.peace == 300);
    CHECK(dmax.conflict <= base.conflict);
    CHECK(base.conflict <= dmin.conflict);
    // Variables the model ignores leave the counts untouched.
    for (std::size_t k = 3; k < report.rows.size(); ++k) {
        CHECK(report.rows[k].conflict == base.conflict);
    }
}

TEST_CASE("a perturbation that matches the data changes nothing") {
    auto test = generate_synthetic(40, 40, 2.0, 8);
    for (auto& r : test.records) r.values[index_of(Variable::Allies)] = 1.0;
    const auto train = generate_synthetic(100, 100, 2.0, 9);
    const auto model = train_model(train, TrainSettings{}, 9);
    const auto report = experiment_two(model, test);
    const auto it = std::find_if(report.rows.begin(), report.rows.end(), [](const auto& r) { return r.name == "Allies-max"; });
    REQUIRE(it != report.rows.end());
    CHECK(it->conflict == report.baseline().conflict);
    CHECK_THROWS_AS(experiment_two(model, Dataset{{}, default_specs(), std::nullopt}), ValidationError);
}

TEST_CASE("ranking puts the only informative variable first") {
    SyntheticOptions opts;
    opts.informative = {Variable::Democracy};
    const auto raw_train = generate_synthetic(300, 300, 3.0, 10, opts);
    const auto raw_test = generate_synthetic(300, 300, 3.0, 11, opts);
    const auto train = normalize(raw_train);
    const auto test = normalize(raw_test, *train.normalizer);
    const auto table = single_variable_ranking(quick_mlp(1), train, test);
    REQUIRE(table.rows.size() == 7);
    CHECK(table.rows[0].variable == Variable::Democracy);
    CHECK(table.rows[0].rank == 1);
    CHECK(table.rows[0].auc > 0.8);
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        CHECK(table.rows[i].rank == i + 1);
        CHECK(table.rows[i].auc <= table.rows[i - 1].auc);
    }

    std::vector<Variable> reversed(kAllVariables.begin(), kAllVariables.end());
    std::reverse(reversed.begin(), reversed.end());
    const auto again = single_variable_ranking(quick_mlp(1), train, test, reversed);
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(again.rows[i].variable == table.rows[i].variable);
        CHECK(again.rows[i].auc == table.rows[i].auc);
    }

    std::ostringstream text, csv;
    write_ranking(table, text, Provenance{10, "d"});
    write_ranking_csv(table, csv, Provenance{10, "d"});
    CHECK(text.str().find("Democracy") != std::string::npos);
    CHECK(lines(csv.str()) == 9);
}

TEST_CASE("ranking on pure noise stays near chance") {
    SyntheticOptions opts;
    opts.informative = {};
    const auto train = normalize(generate_synthetic(500, 500, 0.0, 12, opts));
    const auto test = normalize(generate_synthetic(1000, 1000, 0.0, 13, opts), *train.normalizer);
    const auto table = single_variable_ranking(quick_mlp(2), train, test);
    for (const auto& r : table.rows) {
        REQUIRE_FALSE(r.failed);
        CHECK(r.auc >= 0.45);
        CHECK(r.auc <= 0.55);
    }
}

TEST_CASE("ranking reports failed variables last") {
    const auto train = normalize(generate_synthetic(30, 30, 1.0, 14));
    const auto test = normalize(generate_synthetic(30, 30, 1.0, 15), *train.normalizer);
    const Trainer flaky = [](const Samples&) -> Classifier { throw ComputationError("no"); };
    const auto table = single_variable_ranking(flaky, train, test);
    for (const auto& r : table.rows) {
        CHECK(r.failed);
        CHECK(r.rank == 0);
        CHECK(r.note == "no");
    }
    CHECK_THROWS_AS(single_variable_ranking(flaky, generate_synthetic(5, 5, 1.0, 1), test), ValidationError);
}
