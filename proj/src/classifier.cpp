#include "midpredict/classifier.hpp"

#include <string>

#include "midpredict/error.hpp"

namespace midpredict {

std::string_view family_name(ModelFamily f) { return f == ModelFamily::Mlp ? "mlp" : "svm"; }

ModelFamily parse_family(std::string_view s) {
    if (s == "mlp") return ModelFamily::Mlp;
    if (s == "svm") return ModelFamily::Svm;
    throw ValidationError("unknown model family '" + std::string(s) + "'");
}

ModelFamily Classifier::family() const {
    return std::holds_alternative<MlpNetwork>(body) ? ModelFamily::Mlp : ModelFamily::Svm;
}

std::size_t Classifier::input_dim() const {
    if (const auto* net = std::get_if<MlpNetwork>(&body)) return net->inputs;
    return std::get<SvmModel>(body).dim;
}

double Classifier::score(std::span<const double> x) const {
    if (const auto* net = std::get_if<MlpNetwork>(&body)) return mlp_forward(*net, x);
    return svm_decision(std::get<SvmModel>(body), x);
}

Label Classifier::predict(std::span<const double> x) const {
    if (const auto* net = std::get_if<MlpNetwork>(&body)) return mlp_predict(*net, x);
    return svm_predict(std::get<SvmModel>(body), x);
}

Trainer make_trainer(const TrainSettings& settings, std::uint64_t seed) {
    if (settings.family == ModelFamily::Mlp) {
        TrainConfig cfg;
        cfg.cycles = settings.cycles;
        cfg.seed = seed;
        const auto hidden = settings.hidden;
        return [cfg, hidden](const Samples& s) { return Classifier{scg_train(s, hidden, cfg)}; };
    }
    SmoConfig cfg;
    cfg.kkt_tol = settings.kkt_tol;
    cfg.seed = seed;
    const auto kernel = settings.kernel;
    const auto c = settings.c;
    return [cfg, kernel, c](const Samples& s) { return Classifier{smo_solve(s, kernel, c, cfg)}; };
}

TrainedModel train_model(const Dataset& raw_train, const TrainSettings& settings, std::uint64_t seed,
                         ScgTrace* mlp_trace, SmoStats* svm_stats) {
    if (raw_train.empty()) throw ValidationError("cannot train on an empty dataset");
    const Dataset train = normalize(raw_train);
    const Samples samples = to_samples(train);

    TrainedModel model{Classifier{}, *train.normalizer, settings, seed};
    if (settings.family == ModelFamily::Mlp) {
        TrainConfig cfg;
        cfg.cycles = settings.cycles;
        cfg.seed = seed;
        model.classifier.body = scg_train(samples, settings.hidden, cfg, mlp_trace);
    } else {
        SmoConfig cfg;
        cfg.kkt_tol = settings.kkt_tol;
        cfg.seed = seed;
        model.classifier.body = smo_solve(samples, settings.kernel, settings.c, cfg, svm_stats);
    }
    return model;
}

Dataset to_model_space(const TrainedModel& model, const Dataset& ds) {
    require_same_dim(kNumVariables, model.classifier.input_dim(), "model input dimension");
    if (!ds.normalized()) return normalize(ds, model.normalizer);
    if (!(*ds.normalizer == model.normalizer)) {
        throw ValidationError("dataset was normalized with a different transform than the model");
    }
    return ds;
}

std::vector<double> score_all(const Classifier& c, const Samples& s) {
    std::vector<double> out;
    out.reserve(s.size());
    for (const auto& x : s.x) out.push_back(c.score(x));
    return out;
}

std::vector<Label> predict_all(const Classifier& c, const Samples& s) {
    std::vector<Label> out;
    out.reserve(s.size());
    for (const auto& x : s.x) out.push_back(c.predict(x));
    return out;
}

}  // namespace midpredict
