#include "midpredict/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "midpredict/error.hpp"
#include "midpredict/parallel.hpp"
#include "midpredict/rng.hpp"

namespace midpredict {

namespace {

bool strictly_increasing_positive(const std::vector<double>& v) {
    if (v.empty() || !(v.front() > 0.0)) return false;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) return false;
    }
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

void require_normalized(const Dataset& ds, const char* who) {
    if (!ds.normalized()) throw ValidationError(std::string(who) + " expects a normalized dataset");
}

}  // namespace

std::vector<Fold> kfold_split(std::span<const Label> labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ValidationError("kfold_split: k must be at least 2");
    if (k > labels.size()) {
        throw ValidationError("kfold_split: k=" + std::to_string(k) + " exceeds record count " +
                              std::to_string(labels.size()));
    }
    CounterRng rng(seed, streams::kfold);
    std::vector<std::size_t> sequence;
    sequence.reserve(labels.size());
    for (auto cls : {Label::Conflict, Label::Peace}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) members.push_back(i);
        }
        rng.shuffle(members);
        sequence.insert(sequence.end(), members.begin(), members.end());
    }
    // Dealing the class-ordered sequence round-robin stratifies every fold.
    std::vector<Fold> folds(k);
    for (std::size_t pos = 0; pos < sequence.size(); ++pos) folds[pos % k].push_back(sequence[pos]);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

std::vector<Fold> kfold_split(const Dataset& ds, std::size_t k, std::uint64_t seed) {
    std::vector<Label> labels;
    labels.reserve(ds.size());
    for (const auto& r : ds.records) labels.push_back(r.label);
    return kfold_split(labels, k, seed);
}

std::vector<double> cross_validate(const Samples& data, std::span<const Fold> folds, const Trainer& trainer) {
    std::vector<double> accuracy;
    accuracy.reserve(folds.size());
    std::vector<bool> held_out(data.size());
    for (const auto& fold : folds) {
        std::fill(held_out.begin(), held_out.end(), false);
        for (auto i : fold) held_out.at(i) = true;
        std::vector<std::size_t> train_rows;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (!held_out[i]) train_rows.push_back(i);
        }
        const Samples train = subset(data, train_rows);
        const Samples test = subset(data, fold);
        const Classifier model = trainer(train);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < test.size(); ++i) {
            if (model.predict(test.x[i]) == test.y[i]) ++correct;
        }
        accuracy.push_back(static_cast<double>(correct) / static_cast<double>(test.size()));
    }
    return accuracy;
}

GridSpec GridSpec::default_grid(std::uint64_t seed) {
    GridSpec g;
    for (int e = -2; e <= 6; ++e) g.c_values.push_back(std::ldexp(1.0, e));
    for (int e = -4; e <= 6; ++e) g.gamma_values.push_back(std::ldexp(1.0, e));
    g.seed = seed;
    return g;
}

void GridSpec::check() const {
    if (k < 2) throw ValidationError("grid: k must be at least 2");
    if (!strictly_increasing_positive(c_values)) throw ValidationError("grid: C values must be positive and strictly increasing");
    if (!strictly_increasing_positive(gamma_values)) {
        throw ValidationError("grid: gamma values must be positive and strictly increasing");
    }
}

CvResult grid_search(const Dataset& ds, const GridSpec& grid, const SmoConfig& solver) {
    grid.check();
    require_normalized(ds, "grid_search");
    const Samples data = to_samples(ds);
    const auto folds = kfold_split(data.y, grid.k, grid.seed);

    CvResult result;
    result.k = grid.k;
    result.seed = grid.seed;
    for (double c : grid.c_values) {
        for (double g : grid.gamma_values) result.cells.push_back({c, g, {}, 0.0, false, {}});
    }

    parallel_for(result.cells.size(), [&](std::size_t idx) {
        auto& cell = result.cells[idx];
        SmoConfig cfg = solver;
        cfg.seed = grid.seed;
        const auto kernel = KernelSpec::rbf(cell.gamma);
        const double c = cell.c;
        const Trainer trainer = [&](const Samples& s) { return Classifier{smo_solve(s, kernel, c, cfg)}; };
        try {
            cell.fold_accuracy = cross_validate(data, folds, trainer);
            cell.mean_accuracy = mean(cell.fold_accuracy);
        } catch (const Error& e) {
            cell.failed = true;
            cell.failure = e.what();
            cell.fold_accuracy.clear();
        }
    });

    bool found = false;
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
        const auto& cell = result.cells[i];
        if (cell.failed) continue;
        // Cells are visited in ascending (C, gamma), so strict > keeps the simpler model on ties.
        if (!found || cell.mean_accuracy > result.cells[result.best_index].mean_accuracy) {
            result.best_index = i;
            found = true;
        }
    }
    if (!found) throw ComputationError("grid_search: every cell failed; first failure: " + result.cells.front().failure);
    result.best_c = result.best().c;
    result.best_gamma = result.best().gamma;
    return result;
}

void write_cv_report(const CvResult& result, std::ostream& out, const Provenance& provenance) {
    std::ostringstream s;
    s << stamp_line(provenance) << '\n';
    s << "C,gamma";
    for (std::size_t f = 1; f <= result.k; ++f) s << ",fold_" << f;
    s << ",mean_accuracy\n";
    for (const auto& cell : result.cells) {
        s << format_double(cell.c) << ',' << format_double(cell.gamma);
        if (cell.failed) {
            for (std::size_t f = 0; f < result.k; ++f) s << ',';
            s << ",failed\n";
            continue;
        }
        for (double a : cell.fold_accuracy) s << ',' << format_double(a);
        s << ',' << format_double(cell.mean_accuracy) << '\n';
    }
    for (const auto& cell : result.cells) {
        if (cell.failed) s << "# failed C=" << format_double(cell.c) << " gamma=" << format_double(cell.gamma) << ": " << cell.failure << '\n';
    }
    s << "# best C=" << format_double(result.best_c) << " gamma=" << format_double(result.best_gamma)
      << " mean_accuracy=" << format_double(result.best().mean_accuracy) << '\n';
    out << s.str();
}

HiddenSearchResult hidden_search(const Dataset& ds, std::span<const std::size_t> hidden_values, const TrainConfig& cfg,
                                 std::size_t k, std::uint64_t seed) {
    require_normalized(ds, "hidden_search");
    if (hidden_values.empty()) throw ValidationError("hidden_search: no hidden-unit counts given");
    const Samples data = to_samples(ds);
    const auto folds = kfold_split(data.y, k, seed);
    HiddenSearchResult result;
    for (auto m : hidden_values) result.cells.push_back({m, {}, 0.0});
    parallel_for(result.cells.size(), [&](std::size_t idx) {
        auto& cell = result.cells[idx];
        const auto hidden = cell.hidden;
        const Trainer trainer = [&](const Samples& s) { return Classifier{scg_train(s, hidden, cfg)}; };
        cell.fold_accuracy = cross_validate(data, folds, trainer);
        cell.mean_accuracy = mean(cell.fold_accuracy);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < result.cells.size(); ++i) {
        const auto& a = result.cells[i];
        const auto& b = result.cells[best];
        if (a.mean_accuracy > b.mean_accuracy || (a.mean_accuracy == b.mean_accuracy && a.hidden < b.hidden)) best = i;
    }
    result.best_hidden = result.cells[best].hidden;
    return result;
}

}  // namespace midpredict
