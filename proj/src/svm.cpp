#include "midpredict/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "midpredict/error.hpp"
#include "midpredict/rng.hpp"

namespace midpredict {

namespace {

constexpr double kTau = 1e-12;

// Q_ij = y_i y_j k(x_i, x_j), either fully cached or computed a row at a time.
class QMatrix {
public:
    QMatrix(std::span<const std::vector<double>> x, std::span<const int> y, const KernelSpec& kernel,
            std::size_t cache_limit)
        : x_(x), y_(y), kernel_(kernel), n_(x.size()), cached_(x.size() <= cache_limit), diag_(x.size()) {
        if (cached_) {
            full_.resize(n_ * n_);
            for (std::size_t i = 0; i < n_; ++i) {
                for (std::size_t j = i; j < n_; ++j) {
                    const double q = y_[i] * y_[j] * kernel_eval(kernel_, x_[i], x_[j]);
                    full_[i * n_ + j] = full_[j * n_ + i] = q;
                }
            }
        }
        for (std::size_t i = 0; i < n_; ++i) diag_[i] = kernel_eval(kernel_, x_[i], x_[i]);
    }

    // Row i as a span; the uncached path reuses `scratch`.
    std::span<const double> row(std::size_t i, std::vector<double>& scratch) const {
        if (cached_) return std::span(full_).subspan(i * n_, n_);
        scratch.resize(n_);
        for (std::size_t t = 0; t < n_; ++t) scratch[t] = y_[i] * y_[t] * kernel_eval(kernel_, x_[i], x_[t]);
        return scratch;
    }

    double diag(std::size_t i) const { return diag_[i]; }

private:
    std::span<const std::vector<double>> x_;
    std::span<const int> y_;
    KernelSpec kernel_;
    std::size_t n_;
    bool cached_;
    std::vector<double> full_;
    std::vector<double> diag_;
};

void check_problem(std::span<const std::vector<double>> x, std::span<const int> y, double c) {
    if (x.empty()) throw ValidationError("smo_solve: empty training set");
    require_same_dim(x.size(), y.size(), "smo_solve labels");
    if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("smo_solve: C must be positive and finite");
    const std::size_t d = x.front().size();
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        require_same_dim(d, x[i].size(), "smo_solve input");
        if (!std::all_of(x[i].begin(), x[i].end(), [](double v) { return std::isfinite(v); })) {
            throw ValidationError("smo_solve: non-finite input at row " + std::to_string(i));
        }
        if (y[i] == 1) pos = true;
        else if (y[i] == -1) neg = true;
        else throw ValidationError("smo_solve: labels must be +1 or -1");
    }
    if (!pos || !neg) throw ValidationError("smo_solve: both classes must be present (dual is degenerate)");
}

}  // namespace

void KernelSpec::check() const {
    if (kind == KernelKind::Rbf && !(gamma > 0.0 && std::isfinite(gamma))) {
        throw ValidationError("rbf kernel needs gamma > 0");
    }
}

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b) {
    require_same_dim(a.size(), b.size(), "kernel_eval");
    if (spec.kind == KernelKind::Linear) return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-spec.gamma * d2);
}

void SmoConfig::check() const {
    if (!(kkt_tol > 0.0)) throw ValidationError("kkt_tol must be positive");
    if (max_passes < 1) throw ValidationError("max_passes must be at least 1");
}

int label_sign(Label l) { return l == Label::Conflict ? 1 : -1; }

SvmModel smo_solve(std::span<const std::vector<double>> x, std::span<const int> y, const KernelSpec& kernel,
                   double c, const SmoConfig& cfg, SmoStats* stats) {
    kernel.check();
    cfg.check();
    check_problem(x, y, c);

    const std::size_t n = x.size();
    const QMatrix q(x, y, kernel, cfg.cache_limit);
    const auto order = CounterRng(cfg.seed, streams::smo_order).permutation(n);

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - sum(a)
    std::vector<double> row_i, row_j;

    auto in_up = [&](std::size_t t) { return y[t] == 1 ? alpha[t] < c : alpha[t] > 0.0; };
    auto in_low = [&](std::size_t t) { return y[t] == 1 ? alpha[t] > 0.0 : alpha[t] < c; };
    auto objective = [&] {
        double f = 0.0;
        for (std::size_t t = 0; t < n; ++t) f += alpha[t] * (1.0 - grad[t]);
        return 0.5 * f;
    };

    SmoStats local;
    SmoStats& st = stats ? *stats : local;
    st = SmoStats{};
    if (cfg.record_objective) st.objective_trace.push_back(0.0);

    const std::size_t budget = cfg.max_passes * n;
    double gap = std::numeric_limits<double>::infinity();
    while (true) {
        // Maximal violating pair; scanning in seeded order breaks ties.
        std::size_t i = n, j = n;
        double up_max = -std::numeric_limits<double>::infinity();
        double low_min = std::numeric_limits<double>::infinity();
        for (auto t : order) {
            const double f = -y[t] * grad[t];
            if (in_up(t) && f > up_max) {
                up_max = f;
                i = t;
            }
            if (in_low(t) && f < low_min) {
                low_min = f;
                j = t;
            }
        }
        gap = (i == n || j == n) ? 0.0 : up_max - low_min;
        if (gap <= cfg.kkt_tol) break;
        if (st.iterations >= budget) {
            throw ConvergenceError("smo_solve: iteration budget exhausted with KKT gap " + std::to_string(gap), gap);
        }
        ++st.iterations;

        const auto qi = q.row(i, row_i);
        const auto qj = q.row(j, row_j);
        const double old_i = alpha[i];
        const double old_j = alpha[j];

        if (y[i] != y[j]) {
            double quad = q.diag(i) + q.diag(j) + 2.0 * qi[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = q.diag(i) + q.diag(j) - 2.0 * qi[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) grad[t] += qi[t] * di + qj[t] * dj;
        if (cfg.record_objective) st.objective_trace.push_back(objective());
    }
    st.final_gap = gap;
    st.objective = objective();

    // Bias: mean over free vectors, else midpoint of the interval the bound vectors allow.
    double free_sum = 0.0;
    std::size_t free_count = 0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        const double f = -y[t] * grad[t];
        if (alpha[t] > 0.0 && alpha[t] < c) {
            free_sum += f;
            ++free_count;
        } else {
            if (in_up(t)) lower = std::max(lower, f);
            if (in_low(t)) upper = std::min(upper, f);
        }
    }
    double b;
    if (free_count > 0) {
        b = free_sum / static_cast<double>(free_count);
    } else if (std::isfinite(lower) && std::isfinite(upper)) {
        b = 0.5 * (lower + upper);
    } else {
        b = std::isfinite(lower) ? lower : upper;
    }

    SvmModel model;
    model.kernel = kernel;
    model.c = c;
    model.b = b;
    model.dim = x.front().size();
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            model.support_x.push_back(x[t]);
            model.support_y.push_back(y[t]);
            model.alpha.push_back(alpha[t]);
            model.support_index.push_back(t);
        }
    }
    return model;
}

SvmModel smo_solve(const Samples& train, const KernelSpec& kernel, double c, const SmoConfig& cfg, SmoStats* stats) {
    std::vector<int> y;
    y.reserve(train.size());
    for (auto l : train.y) y.push_back(label_sign(l));
    return smo_solve(train.x, y, kernel, c, cfg, stats);
}

double svm_decision(const SvmModel& model, std::span<const double> x) {
    require_same_dim(model.dim, x.size(), "svm_decision");
    double s = model.b;
    for (std::size_t k = 0; k < model.alpha.size(); ++k) {
        s += model.support_y[k] * model.alpha[k] * kernel_eval(model.kernel, x, model.support_x[k]);
    }
    return s;
}

Label svm_predict(const SvmModel& model, std::span<const double> x) {
    return svm_decision(model, x) >= 0.0 ? Label::Conflict : Label::Peace;
}

std::vector<double> full_alpha(const SvmModel& model, std::size_t n) {
    std::vector<double> a(n, 0.0);
    require_same_dim(model.alpha.size(), model.support_index.size(), "full_alpha support indices");
    for (std::size_t k = 0; k < model.alpha.size(); ++k) {
        if (model.support_index[k] >= n) throw DimensionError("full_alpha: support index beyond training set");
        a[model.support_index[k]] = model.alpha[k];
    }
    return a;
}

double dual_objective(std::span<const double> alpha, std::span<const std::vector<double>> x, std::span<const int> y,
                      const KernelSpec& kernel) {
    require_same_dim(x.size(), alpha.size(), "dual_objective alpha");
    require_same_dim(x.size(), y.size(), "dual_objective labels");
    double linear = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        linear += alpha[i];
        if (alpha[i] == 0.0) continue;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (alpha[j] == 0.0) continue;
            quad += alpha[i] * alpha[j] * y[i] * y[j] * kernel_eval(kernel, x[i], x[j]);
        }
    }
    return linear - 0.5 * quad;
}

double kkt_violation(const SvmModel& model, std::span<const std::vector<double>> x, std::span<const int> y) {
    require_same_dim(x.size(), y.size(), "kkt_violation labels");
    const auto alpha = full_alpha(model, x.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double margin = y[i] * svm_decision(model, x[i]);
        double residual;
        if (alpha[i] <= 0.0) residual = std::max(0.0, 1.0 - margin);
        else if (alpha[i] >= model.c) residual = std::max(0.0, margin - 1.0);
        else residual = std::abs(margin - 1.0);
        worst = std::max(worst, residual);
    }
    return worst;
}

}  // namespace midpredict
