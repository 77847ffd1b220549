// One PASS/FAIL line per acceptance criterion; exits non-zero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "midpredict/evaluation.hpp"
#include "midpredict/mlp.hpp"
#include "midpredict/model_io.hpp"
#include "midpredict/pipeline.hpp"
#include "midpredict/rng.hpp"
#include "midpredict/sensitivity.hpp"
#include "midpredict/svm.hpp"
#include "oracles.hpp"

using namespace midpredict;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ConfusionMatrix from_counts(std::size_t tc, std::size_t fp, std::size_t tp, std::size_t fc) {
    std::vector<Label> pred, actual;
    auto add = [&](std::size_t n, Label p, Label a) {
        pred.insert(pred.end(), n, p);
        actual.insert(actual.end(), n, a);
    };
    add(tc, Label::Conflict, Label::Conflict);
    add(fp, Label::Peace, Label::Conflict);
    add(tp, Label::Peace, Label::Peace);
    add(fc, Label::Conflict, Label::Peace);
    return confusion(pred, actual);
}

struct SmallDual {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    KernelSpec kernel;
    double c;
};

SmallDual small_dual(std::uint64_t seed) {
    CounterRng rng(seed, 4242);
    SmallDual p;
    const std::size_t n = 2 + rng.index(5);
    const std::size_t d = 1 + rng.index(3);
    const double cs[] = {0.1, 1.0, 1000.0};
    p.c = cs[rng.index(3)];
    p.kernel = seed % 2 == 0 ? KernelSpec::linear() : KernelSpec::rbf(rng.uniform(0.2, 3.0));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(d);
        for (auto& v : x) v = rng.uniform(-2.0, 2.0);
        p.x.push_back(x);
        p.y.push_back(i == 0 ? 1 : i == 1 ? -1 : (rng.bernoulli(0.5) ? 1 : -1));
    }
    return p;
}

Outcome z_regression() {
    const double z = auc_z_test(0.84, 0.01022, 0.81, 0.00998, 0.3937);
    return {std::abs(z - 2.697) <= 0.005, "z=" + fmt("%.6f", z)};
}

Outcome table_rates() {
    const auto svm = from_counts(295, 97, 20914, 5431);
    const auto nn = from_counts(297, 95, 19464, 6881);
    const double got[] = {100 * svm.peace_accuracy(), 100 * svm.conflict_accuracy(), 100 * nn.peace_accuracy(),
                          100 * nn.conflict_accuracy()};
    const double want[] = {79.4, 75.3, 73.9, 75.8};
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 4; ++i) {
        ok = ok && std::abs(got[i] - want[i]) <= 0.1;
        detail += fmt("%.2f%% ", got[i]);
    }
    return {ok, detail};
}

Outcome se_sanity() {
    const double se = auc_standard_error(0.84, 392, 26345).value;
    const double rel = (se - 0.01022) / 0.01022;
    return {std::abs(rel) <= 0.15, "SE=" + fmt("%.6f", se) + " vs 0.01022 (" + fmt("%+.1f%%", 100 * rel) + ")"};
}

Outcome dual_oracle() {
    double worst_obj = 0.0, worst_bal = 0.0;
    bool box = true;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto p = small_dual(seed);
        SmoConfig cfg;
        cfg.kkt_tol = 1e-10;
        cfg.seed = seed;
        const auto model = smo_solve(p.x, p.y, p.kernel, p.c, cfg);
        const auto alpha = full_alpha(model, p.x.size());
        const double best = oracle::brute_force_dual(p.x, p.y, p.kernel, p.c);
        worst_obj = std::max(worst_obj, std::abs(dual_objective(alpha, p.x, p.y, p.kernel) - best));
        double bal = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            bal += alpha[i] * p.y[i];
            box = box && alpha[i] >= 0.0 && alpha[i] <= p.c;
        }
        worst_bal = std::max(worst_bal, std::abs(bal));
    }
    return {worst_obj <= 1e-6 && worst_bal <= 1e-8 && box,
            "max |dObj|=" + fmt("%.2e", worst_obj) + " max |sum a y|=" + fmt("%.2e", worst_bal)};
}

Outcome kkt() {
    double worst = 0.0;
    std::size_t models = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto p = small_dual(seed);
        worst = std::max(worst, kkt_violation(smo_solve(p.x, p.y, p.kernel, p.c), p.x, p.y));
        ++models;
    }
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = to_samples(normalize(generate_synthetic(200, 200, 1.0 + seed * 0.3, seed)));
        std::vector<int> y;
        for (auto l : s.y) y.push_back(label_sign(l));
        const double c = std::ldexp(1.0, static_cast<int>(seed % 7) - 2);
        const auto kernel = KernelSpec::rbf(std::ldexp(1.0, static_cast<int>(seed % 5)));
        worst = std::max(worst, kkt_violation(smo_solve(s.x, y, kernel, c), s.x, y));
        ++models;
    }
    const std::vector<std::vector<double>> x2 = {{1.0}, {-1.0}};
    const std::vector<int> y2 = {1, -1};
    const double analytic = kkt_violation(smo_solve(x2, y2, KernelSpec::linear(), 1000.0), x2, y2);
    return {worst <= 1e-3 && analytic <= 1e-9, std::to_string(models) + " models, worst=" + fmt("%.2e", worst) +
                                                   ", 2-point=" + fmt("%.2e", analytic)};
}

Outcome xor_witness() {
    const std::vector<std::vector<double>> x = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    const std::vector<int> y = {1, 1, -1, -1};
    const auto rbf = smo_solve(x, y, KernelSpec::rbf(1.0), 1000.0);
    const auto lin = smo_solve(x, y, KernelSpec::linear(), 1000.0);
    int rbf_wrong = 0, lin_wrong = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        rbf_wrong += (svm_predict(rbf, x[i]) == Label::Conflict) != (y[i] == 1);
        lin_wrong += (svm_predict(lin, x[i]) == Label::Conflict) != (y[i] == 1);
    }
    return {rbf_wrong == 0 && lin_wrong >= 1,
            "rbf errors=" + std::to_string(rbf_wrong) + " linear errors=" + std::to_string(lin_wrong)};
}

Outcome mlp_gradient() {
    double worst = 0.0;
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        CounterRng rng(seed, 31337);
        const std::size_t d = 1 + rng.index(5), m = 1 + rng.index(5), n = 1 + rng.index(8);
        auto net = MlpNetwork::zeros(d, m);
        auto p = net.parameters();
        for (auto& w : p) w = rng.uniform(-1.5, 1.5);
        net.set_parameters(p);
        std::vector<std::vector<double>> xs;
        std::vector<double> ts;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> x(d);
            for (auto& v : x) v = rng.uniform(-1.0, 1.0);
            xs.push_back(x);
            ts.push_back(rng.bernoulli(0.5) ? 1.0 : 0.0);
        }
        const auto analytic = mlp_loss_grad(net, xs, ts).grad.parameters();
        const auto numeric = oracle::central_difference_grad(net, xs, ts, 1e-5);
        for (std::size_t k = 0; k < analytic.size(); ++k) {
            const double scale = std::max(std::abs(analytic[k]), std::abs(numeric[k]));
            const double diff = std::abs(analytic[k] - numeric[k]);
            if (scale < 1e-8) {
                ok = ok && diff <= 1e-8;
            } else {
                worst = std::max(worst, diff / scale);
            }
        }
    }
    return {ok && worst <= 1e-6, "max relative error=" + fmt("%.2e", worst)};
}

Outcome scg_monotone() {
    const auto ds = normalize(generate_synthetic(200, 200, 1.5, 8));
    std::size_t steps = 0;
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        TrainConfig cfg;
        cfg.seed = seed;
        ScgTrace trace;
        scg_train(ds, 10, cfg, &trace);
        steps += trace.accepted_losses.size();
        for (std::size_t k = 1; k < trace.accepted_losses.size(); ++k) {
            ok = ok && trace.accepted_losses[k] <= trace.accepted_losses[k - 1];
        }
    }
    return {ok && steps > 10, std::to_string(steps) + " accepted steps over 10 runs"};
}

Outcome auc_oracle() {
    CounterRng rng(2024);
    std::size_t exact = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + rng.index(199);
        std::vector<double> s(n);
        std::vector<Label> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = t % 2 ? std::floor(rng.uniform(0.0, 10.0)) : rng.uniform();
            y[i] = rng.bernoulli(0.5) ? Label::Conflict : Label::Peace;
        }
        y[0] = Label::Conflict;
        y[1] = Label::Peace;
        exact += auc(roc_points(s, y)) == oracle::pair_count_auc(s, y).value();
    }
    const std::vector<double> sep = {0.9, 0.8, 0.3, 0.1};
    const std::vector<double> flat(4, 0.5);
    const std::vector<Label> y = {Label::Conflict, Label::Conflict, Label::Peace, Label::Peace};
    const double a_sep = auc(roc_points(sep, y));
    const double a_flat = auc(roc_points(flat, y));
    return {exact == 100 && a_sep == 1.0 && a_flat == 0.5,
            std::to_string(exact) + "/100 exact, separated=" + fmt("%g", a_sep) + ", constant=" + fmt("%g", a_flat)};
}

Outcome pipeline() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto root = fs::temp_directory_path() / "midpredict_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    const auto data = root / "synthetic.csv";
    write_dataset(generate_synthetic(2000, 2000, 3.0, 20), data);

    PipelineConfig cfg;
    cfg.data = data;
    cfg.seed = 20;
    cfg.per_class = 500;
    cfg.grid = GridSpec::default_grid(20);
    cfg.out_dir = root / "a";
    const auto a = run_pipeline(cfg);
    cfg.out_dir = root / "b";
    const auto b = run_pipeline(cfg);
    if (!a.ok || !b.ok) return {false, "pipeline failed at " + a.failed_stage + b.failed_stage + ": " + a.error + b.error};

    bool identical = a.artifacts.size() == b.artifacts.size();
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        ++files;
        identical = identical && slurp(entry.path()) == slurp(root / "b" / entry.path().filename());
    }
    const auto& s = *a.svm_confusion;
    const auto& m = *a.mlp_confusion;
    const double worst = std::min({s.conflict_accuracy(), s.peace_accuracy(), m.conflict_accuracy(), m.peace_accuracy()});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {worst >= 0.90 && identical && secs < 300.0,
            "svm " + fmt("%.3f", s.conflict_accuracy()) + "/" + fmt("%.3f", s.peace_accuracy()) + ", mlp " +
                fmt("%.3f", m.conflict_accuracy()) + "/" + fmt("%.3f", m.peace_accuracy()) + ", " +
                std::to_string(files) + " files " + (identical ? "identical" : "DIFFER") + ", " + fmt("%.1fs", secs)};
}

Outcome sensitivity_shape() {
    SyntheticOptions opts;
    opts.informative = {Variable::Capability};
    const auto raw_train = generate_synthetic(500, 500, 3.0, 30, opts);
    const auto raw_test = generate_synthetic(1000, 500, 3.0, 31, opts);
    const auto model = train_model(raw_train, TrainSettings{}, 30);

    const auto one = experiment_one(model);
    const auto two = experiment_two(model, raw_test);
    bool rows_ok = two.rows.size() == 15;
    for (const auto& r : two.rows) rows_ok = rows_ok && r.peace + r.conflict == raw_test.size();

    TrainSettings mlp;
    mlp.family = ModelFamily::Mlp;
    const auto train = normalize(raw_train);
    const auto table = single_variable_ranking(make_trainer(mlp, 30), train, normalize(raw_test, *train.normalizer));
    const auto first = table.rows.front();
    return {one.size() == 14 && rows_ok && first.variable == Variable::Capability && first.rank == 1,
            "profiles=" + std::to_string(one.size()) + " rows=" + std::to_string(two.rows.size()) + " top=" +
                std::string(variable_name(first.variable)) + " (AUC " + fmt("%.3f", first.auc) + ")"};
}

Outcome serialization() {
    const auto train = generate_synthetic(300, 300, 2.0, 40);
    const auto test = generate_synthetic(1000, 1000, 2.0, 41);
    const auto dir = fs::temp_directory_path() / "midpredict_acceptance_io";
    fs::create_directories(dir);
    std::size_t checked = 0, mismatches = 0;
    for (auto family : {ModelFamily::Svm, ModelFamily::Mlp}) {
        TrainSettings s;
        s.family = family;
        const auto model = train_model(train, s, 40);
        const auto path = dir / (std::string(family_name(family)) + ".model");
        save_model(model, path, Provenance{40, ""});
        const auto loaded = load_model(path);
        for (const auto& r : test.records) {
            ++checked;
            mismatches += loaded.predict_raw(r.values) != model.predict_raw(r.values);
        }
    }
    return {mismatches == 0, std::to_string(checked) + " predictions, " + std::to_string(mismatches) + " mismatches"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"correlated-AUC z regression", z_regression},
        {"confusion-rate arithmetic", table_rates},
        {"AUC standard error within 15% of 0.01022", se_sanity},
        {"SVM dual vs brute force", dual_oracle},
        {"KKT residuals", kkt},
        {"XOR witness", xor_witness},
        {"MLP gradient vs central differences", mlp_gradient},
        {"SCG monotone accepted losses", scg_monotone},
        {"AUC vs pair count", auc_oracle},
        {"end-to-end pipeline", pipeline},
        {"sensitivity report shape", sensitivity_shape},
        {"model serialization round trip", serialization},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s [%2zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
