#include <cmath>
#include <numeric>

#include "doctest.h"
#include "midpredict/error.hpp"
#include "midpredict/rng.hpp"
#include "midpredict/svm.hpp"
#include "oracles.hpp"

using namespace midpredict;

namespace {

using Points = std::vector<std::vector<double>>;

SvmModel two_point_model() {
    SvmModel m;
    m.kernel = KernelSpec::linear();
    m.c = 1000.0;
    m.dim = 1;
    m.support_x = {{1.0}, {-1.0}};
    m.support_y = {1, -1};
    m.alpha = {0.5, 0.5};
    m.support_index = {0, 1};
    return m;
}

struct Problem {
    Points x;
    std::vector<int> y;
    KernelSpec kernel;
    double c;
};

Problem random_problem(std::uint64_t seed) {
    CounterRng rng(seed, 77);
    Problem p;
    const std::size_t n = 2 + rng.index(5);  // 2..6 points
    const std::size_t d = 1 + rng.index(3);
    const double cs[] = {0.1, 1.0, 1000.0};
    p.c = cs[rng.index(3)];
    p.kernel = rng.bernoulli(0.5) ? KernelSpec::linear() : KernelSpec::rbf(rng.uniform(0.2, 3.0));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(d);
        for (auto& v : x) v = rng.uniform(-2.0, 2.0);
        p.x.push_back(x);
        p.y.push_back(i == 0 ? 1 : i == 1 ? -1 : (rng.bernoulli(0.5) ? 1 : -1));
    }
    return p;
}

double balance(const std::vector<double>& a, const std::vector<int>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * y[i];
    return s;
}

}  // namespace

TEST_CASE("kernel values") {
    const std::vector<double> a = {0.3, -1.2}, b = {1.0, 0.0}, o = {0.0, 0.0};
    CHECK(kernel_eval(KernelSpec::rbf(5.0), a, a) == 1.0);
    CHECK(kernel_eval(KernelSpec::rbf(1.0), o, b) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(kernel_eval(KernelSpec::rbf(16.75), std::vector<double>{0.0}, std::vector<double>{1.0}) ==
          doctest::Approx(5.3157852544244216e-08).epsilon(1e-12));
    CHECK(kernel_eval(KernelSpec::linear(), a, b) == doctest::Approx(0.3));
    CHECK_THROWS_AS(kernel_eval(KernelSpec::linear(), a, std::vector<double>{1.0}), DimensionError);
    CHECK_THROWS_AS(KernelSpec::rbf(0.0).check(), ValidationError);
}

TEST_CASE("kernel symmetry and range") {
    CounterRng rng(5);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> a(4), b(4);
        for (auto& v : a) v = rng.uniform(-3, 3);
        for (auto& v : b) v = rng.uniform(-3, 3);
        const auto rbf = KernelSpec::rbf(rng.uniform(0.01, 10.0));
        CHECK(kernel_eval(rbf, a, b) == kernel_eval(rbf, b, a));
        CHECK(kernel_eval(KernelSpec::linear(), a, b) == kernel_eval(KernelSpec::linear(), b, a));
        const double k = kernel_eval(rbf, a, b);
        CHECK(k > 0.0);
        CHECK(k <= 1.0);
    }
}

TEST_CASE("two symmetric points solve analytically") {
    const Points x = {{1.0}, {-1.0}};
    const std::vector<int> y = {1, -1};
    const auto model = smo_solve(x, y, KernelSpec::linear(), 1000.0);
    REQUIRE(model.support_count() == 2);
    CHECK(model.alpha[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(model.alpha[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(model.b) < 1e-12);
    CHECK(oracle::brute_force_dual(x, y, KernelSpec::linear(), 1000.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("decision function of the analytic model") {
    const auto m = two_point_model();
    CHECK(svm_decision(m, std::vector<double>{0.0}) == 0.0);
    CHECK(svm_decision(m, std::vector<double>{1.0}) == doctest::Approx(1.0));
    CHECK(svm_predict(m, std::vector<double>{0.0}) == Label::Conflict);
    CHECK(svm_predict(m, std::vector<double>{-0.1}) == Label::Peace);
    CHECK_THROWS_AS(svm_decision(m, std::vector<double>{0.0, 1.0}), DimensionError);

    SvmModel bias_only;
    bias_only.b = 0.3;
    bias_only.dim = 2;
    CHECK(svm_decision(bias_only, std::vector<double>{5.0, -1.0}) == 0.3);
}

TEST_CASE("KKT residuals") {
    const Points x = {{1.0}, {-1.0}};
    const std::vector<int> y = {1, -1};
    CHECK(kkt_violation(two_point_model(), x, y) <= 1e-9);

    // A point with alpha = 0 whose margin is only 0.4.
    SvmModel m;
    m.kernel = KernelSpec::linear();
    m.c = 1.0;
    m.dim = 1;
    m.b = 0.4;
    const Points px = {{0.0}};
    const std::vector<int> py = {1};
    CHECK(kkt_violation(m, px, py) >= 0.6 - 1e-15);
    CHECK_THROWS_AS(kkt_violation(m, px, std::vector<int>{1, 1}), DimensionError);
}

TEST_CASE("XOR needs the RBF kernel") {
    const Points x = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    const std::vector<int> y = {1, 1, -1, -1};
    const auto rbf = smo_solve(x, y, KernelSpec::rbf(1.0), 1000.0);
    CHECK(rbf.support_count() == 4);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(svm_decision(rbf, x[i]) * y[i] > 0.0);
    const auto rbf_alpha = full_alpha(rbf, 4);
    CHECK(dual_objective(rbf_alpha, x, y, KernelSpec::rbf(1.0)) ==
          doctest::Approx(oracle::brute_force_dual(x, y, KernelSpec::rbf(1.0), 1000.0)).epsilon(1e-6));

    const auto lin = smo_solve(x, y, KernelSpec::linear(), 1000.0);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < x.size(); ++i) wrong += (svm_predict(lin, x[i]) == Label::Conflict) != (y[i] == 1);
    CHECK(wrong >= 1);
}

TEST_CASE("solver matches the brute-force dual on small problems") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto p = random_problem(seed);
        SmoConfig cfg;
        cfg.kkt_tol = 1e-10;
        cfg.seed = seed;
        SmoStats stats;
        const auto model = smo_solve(p.x, p.y, p.kernel, p.c, cfg, &stats);
        const auto alpha = full_alpha(model, p.x.size());
        const double best = oracle::brute_force_dual(p.x, p.y, p.kernel, p.c);
        INFO("seed " << seed);
        CHECK(std::abs(dual_objective(alpha, p.x, p.y, p.kernel) - best) <= 1e-6);
        CHECK(std::abs(balance(alpha, p.y)) <= 1e-8);
        for (double a : alpha) {
            CHECK(a >= 0.0);
            CHECK(a <= p.c);
        }
        CHECK(kkt_violation(model, p.x, p.y) <= 1e-6);
    }
}

TEST_CASE("dual objective never decreases across pair updates") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto ds = normalize(generate_synthetic(40, 40, 1.0, seed));
        SmoConfig cfg;
        cfg.record_objective = true;
        cfg.seed = seed;
        SmoStats stats;
        smo_solve(to_samples(ds), KernelSpec::rbf(4.0), 10.0, cfg, &stats);
        REQUIRE(stats.objective_trace.size() == stats.iterations + 1);
        for (std::size_t k = 1; k < stats.objective_trace.size(); ++k) {
            CHECK(stats.objective_trace[k] >= stats.objective_trace[k - 1] - 1e-12);
        }
    }
}

TEST_CASE("solved models satisfy the margin property and KKT tolerance") {
    const auto ds = normalize(generate_synthetic(150, 150, 1.5, 31));
    const auto s = to_samples(ds);
    std::vector<int> y;
    for (auto l : s.y) y.push_back(label_sign(l));
    SmoConfig cfg;
    for (double c : {0.5, 4.0, 64.0}) {
        const auto model = smo_solve(s.x, y, KernelSpec::rbf(8.0), c, cfg);
        CHECK(kkt_violation(model, s.x, y) <= cfg.kkt_tol);
        CHECK(std::abs(balance(full_alpha(model, s.size()), y)) <= 1e-8);
        for (std::size_t k = 0; k < model.support_count(); ++k) {
            CHECK(model.alpha[k] > 0.0);
            CHECK(model.alpha[k] <= c);
            if (model.alpha[k] < c) {
                const auto i = model.support_index[k];
                CHECK(std::abs(y[i] * svm_decision(model, s.x[i]) - 1.0) <= cfg.kkt_tol);
            }
        }
    }
}

TEST_CASE("cached and on-the-fly Gram paths agree") {
    const auto s = to_samples(normalize(generate_synthetic(60, 60, 1.0, 2)));
    SmoConfig cached, uncached;
    uncached.cache_limit = 0;
    const auto a = smo_solve(s, KernelSpec::rbf(2.0), 1.0, cached);
    const auto b = smo_solve(s, KernelSpec::rbf(2.0), 1.0, uncached);
    CHECK(a == b);
}

TEST_CASE("solver is deterministic under a seed") {
    const auto s = to_samples(normalize(generate_synthetic(80, 80, 1.0, 3)));
    SmoConfig cfg;
    cfg.seed = 11;
    CHECK(smo_solve(s, KernelSpec::rbf(1.0), 2.0, cfg) == smo_solve(s, KernelSpec::rbf(1.0), 2.0, cfg));
}

TEST_CASE("hard margin is the large-C limit") {
    const Points x = {{0.0}, {0.2}, {1.0}, {1.3}};
    const std::vector<int> y = {-1, -1, 1, 1};
    const auto m = smo_solve(x, y, KernelSpec::linear(), kHardMarginC);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] * svm_decision(m, x[i]) >= 1.0 - 1e-3);
    // Separating margin sits halfway between 0.2 and 1.0.
    CHECK(svm_decision(m, std::vector<double>{0.6}) == doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("solver error paths") {
    const Points x = {{0.0}, {1.0}};
    CHECK_THROWS_AS(smo_solve(x, std::vector<int>{1, 1}, KernelSpec::linear(), 1.0), ValidationError);
    CHECK_THROWS_AS(smo_solve(x, std::vector<int>{1, -1}, KernelSpec::linear(), 0.0), ValidationError);
    CHECK_THROWS_AS(smo_solve(x, std::vector<int>{1, 0}, KernelSpec::linear(), 1.0), ValidationError);

    const auto s = to_samples(normalize(generate_synthetic(100, 100, 0.5, 4)));
    SmoConfig starved;
    starved.max_passes = 1;
    starved.kkt_tol = 1e-12;
    try {
        smo_solve(s, KernelSpec::rbf(32.0), 100.0, starved);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.residual() > starved.kkt_tol);
    }
}
