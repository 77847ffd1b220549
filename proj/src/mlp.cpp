#include "midpredict/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "midpredict/error.hpp"
#include "midpredict/rng.hpp"

namespace midpredict {

namespace {

constexpr double kProbClamp = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

struct Evaluation {
    double loss;
    std::vector<double> grad;
};

}  // namespace

MlpNetwork MlpNetwork::zeros(std::size_t inputs, std::size_t hidden) {
    MlpNetwork net;
    net.inputs = inputs;
    net.hidden = hidden;
    net.w1.assign(inputs * hidden, 0.0);
    net.b1.assign(hidden, 0.0);
    net.w2.assign(hidden, 0.0);
    net.check();
    return net;
}

MlpNetwork MlpNetwork::random(std::size_t inputs, std::size_t hidden, std::uint64_t seed) {
    MlpNetwork net = zeros(inputs, hidden);
    CounterRng rng(seed, streams::mlp_init);
    const double r1 = 1.0 / std::sqrt(static_cast<double>(inputs));
    const double r2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (auto& w : net.w1) w = rng.uniform(-r1, r1);
    for (auto& b : net.b1) b = rng.uniform(-r1, r1);
    for (auto& w : net.w2) w = rng.uniform(-r2, r2);
    net.b2 = rng.uniform(-r2, r2);
    return net;
}

std::vector<double> MlpNetwork::parameters() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    p.insert(p.end(), w1.begin(), w1.end());
    p.insert(p.end(), b1.begin(), b1.end());
    p.insert(p.end(), w2.begin(), w2.end());
    p.push_back(b2);
    return p;
}

void MlpNetwork::set_parameters(std::span<const double> p) {
    require_same_dim(parameter_count(), p.size(), "MlpNetwork::set_parameters");
    auto it = p.begin();
    std::copy_n(it, w1.size(), w1.begin());
    it += static_cast<std::ptrdiff_t>(w1.size());
    std::copy_n(it, b1.size(), b1.begin());
    it += static_cast<std::ptrdiff_t>(b1.size());
    std::copy_n(it, w2.size(), w2.begin());
    it += static_cast<std::ptrdiff_t>(w2.size());
    b2 = *it;
}

void MlpNetwork::check() const {
    if (inputs < 1 || hidden < 1) throw ValidationError("MLP needs at least one input and one hidden unit");
    if (w1.size() != inputs * hidden || b1.size() != hidden || w2.size() != hidden) {
        throw DimensionError("MLP weight arrays do not match inputs=" + std::to_string(inputs) +
                             ", hidden=" + std::to_string(hidden));
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(w1.begin(), w1.end(), finite) || !std::all_of(b1.begin(), b1.end(), finite) ||
        !std::all_of(w2.begin(), w2.end(), finite) || !std::isfinite(b2)) {
        throw ValidationError("MLP has non-finite weights");
    }
}

double logistic(double a) {
    if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
    const double e = std::exp(a);
    return e / (1.0 + e);
}

double mlp_forward(const MlpNetwork& net, std::span<const double> x) {
    require_same_dim(net.inputs, x.size(), "mlp_forward");
    double out = net.b2;
    for (std::size_t j = 0; j < net.hidden; ++j) {
        const double a = dot(std::span(net.w1).subspan(j * net.inputs, net.inputs), x) + net.b1[j];
        out += net.w2[j] * std::tanh(a);
    }
    return logistic(out);
}

std::vector<double> mlp_targets(std::span<const Label> labels) {
    std::vector<double> t;
    t.reserve(labels.size());
    for (auto l : labels) t.push_back(l == Label::Conflict ? 1.0 : 0.0);
    return t;
}

LossGradient mlp_loss_grad(const MlpNetwork& net, std::span<const std::vector<double>> inputs,
                           std::span<const double> targets) {
    if (inputs.empty()) throw ValidationError("mlp_loss_grad: empty batch");
    require_same_dim(inputs.size(), targets.size(), "mlp_loss_grad targets");

    LossGradient out{0.0, MlpNetwork::zeros(net.inputs, net.hidden)};
    auto& g = out.grad;
    const double inv_n = 1.0 / static_cast<double>(inputs.size());
    std::vector<double> h(net.hidden);

    for (std::size_t n = 0; n < inputs.size(); ++n) {
        const auto& x = inputs[n];
        require_same_dim(net.inputs, x.size(), "mlp_loss_grad input");
        const double t = targets[n];
        if (t != 0.0 && t != 1.0) throw ValidationError("mlp_loss_grad: targets must be 0 or 1");

        double o = net.b2;
        for (std::size_t j = 0; j < net.hidden; ++j) {
            h[j] = std::tanh(dot(std::span(net.w1).subspan(j * net.inputs, net.inputs), x) + net.b1[j]);
            o += net.w2[j] * h[j];
        }
        const double raw = logistic(o);
        const double p = std::clamp(raw, kProbClamp, 1.0 - kProbClamp);
        out.loss -= inv_n * (t * std::log(p) + (1.0 - t) * std::log(1.0 - p));

        // d(loss)/d(o); zero where the clamp is active.
        const double delta_o = (raw == p) ? inv_n * (p - t) : 0.0;
        if (delta_o == 0.0) continue;
        g.b2 += delta_o;
        for (std::size_t j = 0; j < net.hidden; ++j) {
            g.w2[j] += delta_o * h[j];
            const double delta_h = delta_o * net.w2[j] * (1.0 - h[j] * h[j]);
            g.b1[j] += delta_h;
            double* row = g.w1.data() + j * net.inputs;
            for (std::size_t i = 0; i < net.inputs; ++i) row[i] += delta_h * x[i];
        }
    }
    return out;
}

LossGradient mlp_loss_grad(const MlpNetwork& net, const Samples& batch) {
    const auto targets = mlp_targets(batch.y);
    return mlp_loss_grad(net, batch.x, targets);
}

void TrainConfig::check() const {
    if (cycles < 1) throw ValidationError("training needs at least one cycle");
    if (!(sigma0 > 0.0) || !(lambda0 > 0.0) || !(grad_tol > 0.0)) {
        throw ValidationError("sigma0, lambda0 and grad_tol must be positive");
    }
}

MlpNetwork scg_refine(MlpNetwork net, const Samples& train, const TrainConfig& cfg, ScgTrace* trace) {
    cfg.check();
    net.check();
    if (train.size() == 0) throw ValidationError("cannot train on an empty dataset");
    const auto targets = mlp_targets(train.y);

    MlpNetwork scratch = net;
    auto evaluate = [&](std::span<const double> w) {
        scratch.set_parameters(w);
        auto lg = mlp_loss_grad(scratch, train.x, targets);
        return Evaluation{lg.loss, lg.grad.parameters()};
    };

    const std::size_t n_params = net.parameter_count();
    std::vector<double> w = net.parameters();
    auto current = evaluate(w);
    if (!std::isfinite(current.loss)) throw ComputationError("non-finite loss at initialisation");

    std::vector<double> r(n_params), p(n_params), s(n_params), trial(n_params);
    for (std::size_t i = 0; i < n_params; ++i) r[i] = p[i] = -current.grad[i];

    ScgTrace local;
    ScgTrace& tr = trace ? *trace : local;
    tr = ScgTrace{};
    tr.accepted_losses.push_back(current.loss);

    bool success = true;
    double lambda = cfg.lambda0;
    double lambda_bar = 0.0;
    double delta = 0.0;

    for (std::size_t k = 1; k <= cfg.cycles; ++k) {
        if (std::sqrt(dot(r, r)) < cfg.grad_tol) {
            tr.converged = true;
            break;
        }
        ++tr.iterations;

        // Restart along steepest descent if p stopped being a descent direction.
        if (dot(p, r) <= 0.0) {
            p = r;
            success = true;
        }
        const double p2 = dot(p, p);

        if (success) {
            const double sigma = cfg.sigma0 / std::sqrt(p2);
            for (std::size_t i = 0; i < n_params; ++i) trial[i] = w[i] + sigma * p[i];
            const auto probe = evaluate(trial);
            for (std::size_t i = 0; i < n_params; ++i) s[i] = (probe.grad[i] - current.grad[i]) / sigma;
            delta = dot(p, s);
        }

        // Scale to keep the Hessian approximation positive definite.
        delta += (lambda - lambda_bar) * p2;
        if (delta <= 0.0) {
            lambda_bar = 2.0 * (lambda - delta / p2);
            delta = -delta + lambda * p2;
            lambda = lambda_bar;
        }

        const double mu = dot(p, r);
        const double alpha = mu / delta;
        for (std::size_t i = 0; i < n_params; ++i) trial[i] = w[i] + alpha * p[i];
        auto next = evaluate(trial);
        if (!std::isfinite(next.loss)) {
            throw ComputationError("non-finite loss during SCG iteration " + std::to_string(k));
        }

        // Comparison parameter: actual vs. predicted reduction.
        const double comparison = 2.0 * delta * (current.loss - next.loss) / (mu * mu);
        if (comparison >= 0.0) {
            w = trial;
            std::vector<double> r_new(n_params);
            for (std::size_t i = 0; i < n_params; ++i) r_new[i] = -next.grad[i];
            lambda_bar = 0.0;
            success = true;
            if (k % n_params == 0) {
                p = r_new;
            } else {
                const double beta = (dot(r_new, r_new) - dot(r_new, r)) / mu;
                for (std::size_t i = 0; i < n_params; ++i) p[i] = r_new[i] + beta * p[i];
            }
            r = std::move(r_new);
            current = std::move(next);
            ++tr.accepted;
            tr.accepted_losses.push_back(current.loss);
            if (comparison >= 0.75) lambda *= 0.25;
        } else {
            lambda_bar = lambda;
            success = false;
        }
        if (comparison < 0.25) lambda += delta * (1.0 - comparison) / p2;
    }
    if (!tr.converged && std::sqrt(dot(r, r)) < cfg.grad_tol) tr.converged = true;

    net.set_parameters(w);
    return net;
}

MlpNetwork scg_train(const Samples& train, std::size_t hidden, const TrainConfig& cfg, ScgTrace* trace) {
    if (train.size() == 0) throw ValidationError("cannot train on an empty dataset");
    return scg_refine(MlpNetwork::random(train.dim(), hidden, cfg.seed), train, cfg, trace);
}

MlpNetwork scg_train(const Dataset& ds, std::size_t hidden, const TrainConfig& cfg, ScgTrace* trace) {
    if (ds.empty()) throw ValidationError("cannot train on an empty dataset");
    if (!ds.normalized()) throw ValidationError("MLP training expects a normalized dataset");
    return scg_train(to_samples(ds), hidden, cfg, trace);
}

Label mlp_predict(const MlpNetwork& net, std::span<const double> x, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("threshold must lie in (0, 1)");
    return mlp_forward(net, x) >= threshold ? Label::Conflict : Label::Peace;
}

}  // namespace midpredict
