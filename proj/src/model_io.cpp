#include "midpredict/model_io.hpp"

#include <fstream>
#include <iterator>

#include "json.hpp"
#include "midpredict/error.hpp"

namespace midpredict {

namespace {

using nlohmann::json;

constexpr std::string_view kFormat = "midpredict-model";
constexpr int kFormatVersion = 1;

json kernel_json(const KernelSpec& k) {
    json j{{"kind", k.kind == KernelKind::Rbf ? "rbf" : "linear"}};
    if (k.kind == KernelKind::Rbf) j["gamma"] = k.gamma;
    return j;
}

KernelSpec kernel_from(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "linear") return KernelSpec::linear();
    if (kind == "rbf") return KernelSpec::rbf(j.at("gamma").get<double>());
    throw ValidationError("unknown kernel kind '" + kind + "'");
}

json normalizer_json(const Normalizer& n) {
    json vars = json::array();
    for (auto v : kAllVariables) {
        vars.push_back({{"name", variable_column(v)}, {"lower", n.lower(v)}, {"upper", n.upper(v)}, {"clamp", n.clamps(v)}});
    }
    return vars;
}

Normalizer normalizer_from(const json& j) {
    std::array<double, kNumVariables> lo{}, hi{};
    std::array<bool, kNumVariables> clamp{};
    std::array<bool, kNumVariables> seen{};
    for (const auto& e : j) {
        const auto name = e.at("name").get<std::string>();
        const auto v = parse_variable(name);
        if (!v) throw ValidationError("unknown variable '" + name + "' in normalizer");
        const auto i = index_of(*v);
        lo[i] = e.at("lower").get<double>();
        hi[i] = e.at("upper").get<double>();
        clamp[i] = e.at("clamp").get<bool>();
        seen[i] = true;
    }
    for (auto v : kAllVariables) {
        if (!seen[index_of(v)]) throw ValidationError("normalizer lacks variable " + std::string(variable_column(v)));
    }
    return Normalizer(lo, hi, clamp);
}

json settings_json(const TrainSettings& s) {
    return {{"family", family_name(s.family)}, {"kernel", kernel_json(s.kernel)}, {"C", s.c},
            {"kkt_tol", s.kkt_tol},         {"hidden", s.hidden},             {"cycles", s.cycles}};
}

TrainSettings settings_from(const json& j) {
    TrainSettings s;
    s.family = parse_family(j.at("family").get<std::string>());
    s.kernel = kernel_from(j.at("kernel"));
    s.c = j.at("C").get<double>();
    s.kkt_tol = j.at("kkt_tol").get<double>();
    s.hidden = j.at("hidden").get<std::size_t>();
    s.cycles = j.at("cycles").get<std::size_t>();
    return s;
}

json mlp_json(const MlpNetwork& net) {
    json w1 = json::array();
    for (std::size_t j = 0; j < net.hidden; ++j) {
        w1.push_back(std::vector<double>(net.w1.begin() + static_cast<std::ptrdiff_t>(j * net.inputs),
                                         net.w1.begin() + static_cast<std::ptrdiff_t>((j + 1) * net.inputs)));
    }
    return {{"inputs", net.inputs},
            {"hidden", net.hidden},
            {"activations", {{"hidden", "tanh"}, {"output", "logistic"}}},
            {"w1", w1},
            {"b1", net.b1},
            {"w2", net.w2},
            {"b2", net.b2}};
}

MlpNetwork mlp_from(const json& j) {
    const auto& act = j.at("activations");
    if (act.at("hidden") != "tanh" || act.at("output") != "logistic") {
        throw ValidationError("unsupported MLP activations");
    }
    auto net = MlpNetwork::zeros(j.at("inputs").get<std::size_t>(), j.at("hidden").get<std::size_t>());
    const auto& w1 = j.at("w1");
    if (w1.size() != net.hidden) throw DimensionError("w1 row count does not match hidden units");
    for (std::size_t r = 0; r < net.hidden; ++r) {
        const auto row = w1[r].get<std::vector<double>>();
        require_same_dim(net.inputs, row.size(), "w1 row");
        std::copy(row.begin(), row.end(), net.w1.begin() + static_cast<std::ptrdiff_t>(r * net.inputs));
    }
    net.b1 = j.at("b1").get<std::vector<double>>();
    net.w2 = j.at("w2").get<std::vector<double>>();
    net.b2 = j.at("b2").get<double>();
    net.check();
    return net;
}

json svm_json(const SvmModel& m) {
    json svs = json::array();
    for (std::size_t k = 0; k < m.alpha.size(); ++k) {
        svs.push_back({{"index", m.support_index[k]}, {"y", m.support_y[k]}, {"alpha", m.alpha[k]}, {"x", m.support_x[k]}});
    }
    return {{"kernel", kernel_json(m.kernel)}, {"C", m.c}, {"b", m.b}, {"dim", m.dim}, {"support_vectors", svs}};
}

SvmModel svm_from(const json& j) {
    SvmModel m;
    m.kernel = kernel_from(j.at("kernel"));
    m.c = j.at("C").get<double>();
    m.b = j.at("b").get<double>();
    m.dim = j.at("dim").get<std::size_t>();
    for (const auto& sv : j.at("support_vectors")) {
        m.support_index.push_back(sv.at("index").get<std::size_t>());
        m.support_y.push_back(sv.at("y").get<int>());
        m.alpha.push_back(sv.at("alpha").get<double>());
        m.support_x.push_back(sv.at("x").get<std::vector<double>>());
        require_same_dim(m.dim, m.support_x.back().size(), "support vector");
    }
    return m;
}

}  // namespace

std::string model_to_text(const TrainedModel& model, const Provenance& provenance) {
    json doc;
    doc["format"] = kFormat;
    doc["format_version"] = kFormatVersion;
    doc["tool_version"] = kToolVersion;
    doc["seed"] = model.seed;
    doc["input_sha256"] = provenance.input_digest;
    doc["settings"] = settings_json(model.settings);
    doc["normalizer"] = normalizer_json(model.normalizer);
    doc["family"] = family_name(model.classifier.family());
    if (const auto* net = std::get_if<MlpNetwork>(&model.classifier.body)) {
        doc["mlp"] = mlp_json(*net);
    } else {
        doc["svm"] = svm_json(std::get<SvmModel>(model.classifier.body));
    }
    return doc.dump(2) + "\n";
}

TrainedModel model_from_text(std::string_view text, const std::string& source) {
    try {
        const json doc = json::parse(text);
        if (doc.at("format") != kFormat) throw ValidationError(source + ": not a midpredict model file");
        if (doc.at("format_version").get<int>() != kFormatVersion) {
            throw ValidationError(source + ": unsupported model format version");
        }
        TrainedModel model;
        model.seed = doc.at("seed").get<std::uint64_t>();
        model.settings = settings_from(doc.at("settings"));
        model.normalizer = normalizer_from(doc.at("normalizer"));
        if (parse_family(doc.at("family").get<std::string>()) == ModelFamily::Mlp) {
            model.classifier.body = mlp_from(doc.at("mlp"));
        } else {
            model.classifier.body = svm_from(doc.at("svm"));
        }
        return model;
    } catch (const json::exception& e) {
        throw ValidationError(source + ": malformed model file: " + e.what());
    }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path, const Provenance& provenance) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write model '" + path.string() + "'");
    out << model_to_text(model, provenance);
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open model '" + path.string() + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_text(text, path.string());
}

}  // namespace midpredict
