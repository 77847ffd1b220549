#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "midpredict/classifier.hpp"
#include "midpredict/error.hpp"
#include "midpredict/evaluation.hpp"
#include "midpredict/model_io.hpp"
#include "midpredict/pipeline.hpp"
#include "midpredict/report.hpp"
#include "midpredict/selection.hpp"
#include "midpredict/sensitivity.hpp"

namespace midpredict::cli {

namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kComputationError = 1;
constexpr int kInputError = 2;

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void write_text(const fs::path& p, const std::string& text) {
    ensure_parent(p);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + p.string() + "'");
    out << text;
}

template <class Fn>
std::string capture(Fn&& fn) {
    std::ostringstream s;
    fn(s);
    return s.str();
}

struct SynthOptions {
    std::size_t peace = 1000;
    std::size_t conflict = 1000;
    double separation = 3.0;
    std::uint64_t seed = 0;
    std::vector<std::string> informative = {"democracy", "capability"};
    std::string out;
};

struct TrainOptions {
    std::string model = "svm";
    std::string data;
    std::string out;
    std::string summary;
    std::uint64_t seed = 0;
    double c = 1.0;
    double gamma = 16.75;
    std::string kernel = "rbf";
    double kkt_tol = 1e-3;
    std::size_t hidden = 10;
    std::size_t cycles = 100;
};

struct GridOptions {
    std::string data;
    std::string out;
    std::uint64_t seed = 0;
    std::size_t k = 10;
    std::vector<double> c_values = GridSpec::default_grid().c_values;
    std::vector<double> gamma_values = GridSpec::default_grid().gamma_values;
    double kkt_tol = 1e-3;
};

struct EvaluateOptions {
    std::string model;
    std::string data;
    std::string roc;
    std::string compare;
    double r = 0.0;
    bool r_given = false;
};

struct SensitivityOptions {
    std::string model;
    std::string data;
    std::string train;
    std::string out_dir;
    std::string format = "text";
};

struct PipelineOptions {
    std::string data;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t classes = 500;
    std::size_t k = 10;
    std::vector<double> c_values = GridSpec::default_grid().c_values;
    std::vector<double> gamma_values = GridSpec::default_grid().gamma_values;
    double kkt_tol = 1e-3;
    std::size_t hidden = 10;
    std::size_t cycles = 100;
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
    SyntheticOptions so;
    so.informative.clear();
    for (const auto& name : o.informative) {
        const auto v = parse_variable(name);
        if (!v) throw ValidationError("unknown variable '" + name + "'");
        so.informative.push_back(*v);
    }
    const Dataset ds = generate_synthetic(o.peace, o.conflict, o.separation, o.seed, so);
    if (o.out.empty()) {
        write_dataset(ds, out);
    } else {
        ensure_parent(o.out);
        write_dataset(ds, fs::path(o.out));
    }
    return kOk;
}

int cmd_train(const TrainOptions& o, std::ostream& out) {
    TrainSettings settings;
    settings.family = parse_family(o.model);
    if (o.kernel == "rbf") settings.kernel = KernelSpec::rbf(o.gamma);
    else if (o.kernel == "linear") settings.kernel = KernelSpec::linear();
    else throw ValidationError("unknown kernel '" + o.kernel + "'");
    settings.c = o.c;
    settings.kkt_tol = o.kkt_tol;
    settings.hidden = o.hidden;
    settings.cycles = o.cycles;

    const Dataset raw = load_dataset(o.data);
    const Provenance prov{o.seed, sha256_file(o.data)};
    ScgTrace trace;
    SmoStats stats;
    const TrainedModel model = train_model(raw, settings, o.seed, &trace, &stats);

    const Samples s = to_samples(normalize(raw, model.normalizer));
    const auto cm = confusion(predict_all(model.classifier, s), s.y);

    std::ostringstream summary;
    summary << stamp_line(prov) << '\n';
    summary << "model: " << family_name(settings.family) << '\n';
    summary << "records: " << raw.size() << " (conflict " << raw.count(Label::Conflict) << ", peace "
            << raw.count(Label::Peace) << ")\n";
    summary << "training accuracy: " << format_fixed(cm.overall_accuracy(), 4) << '\n';
    if (settings.family == ModelFamily::Svm) {
        const auto& svm = std::get<SvmModel>(model.classifier.body);
        summary << "kernel: " << (settings.kernel.kind == KernelKind::Rbf ? "rbf gamma=" + format_double(settings.kernel.gamma) : std::string("linear"))
                << " C=" << format_double(settings.c) << '\n';
        summary << "support vectors: " << svm.support_count() << '\n';
        summary << "smo iterations: " << stats.iterations << '\n';
    } else {
        summary << "hidden units: " << settings.hidden << " cycles: " << settings.cycles << '\n';
        summary << "scg iterations: " << trace.iterations << " accepted: " << trace.accepted << '\n';
        summary << "loss trace:";
        for (double l : trace.accepted_losses) summary << ' ' << format_double(l);
        summary << '\n';
    }

    ensure_parent(o.out);
    save_model(model, o.out, prov);
    if (o.summary.empty()) out << summary.str();
    else write_text(o.summary, summary.str());
    return kOk;
}

int cmd_grid(const GridOptions& o, std::ostream& out) {
    GridSpec grid;
    grid.c_values = o.c_values;
    grid.gamma_values = o.gamma_values;
    grid.k = o.k;
    grid.seed = o.seed;
    SmoConfig smo;
    smo.kkt_tol = o.kkt_tol;
    const Provenance prov{o.seed, sha256_file(o.data)};
    const Dataset ds = normalize(load_dataset(o.data));
    const CvResult result = grid_search(ds, grid, smo);
    const auto text = capture([&](std::ostream& s) { write_cv_report(result, s, prov); });
    if (o.out.empty()) out << text;
    else write_text(o.out, text);
    return kOk;
}

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
    const TrainedModel model = load_model(o.model);
    const Dataset raw = load_dataset(o.data);
    const Provenance prov{model.seed, sha256_file(o.data)};
    const Samples s = to_samples(to_model_space(model, raw));
    const auto scores = score_all(model.classifier, s);
    const auto cm = confusion(predict_all(model.classifier, s), s.y);

    out << stamp_line(prov) << '\n';
    out << confusion_report(fs::path(o.model).filename().string(), cm);

    const auto n_conflict = raw.count(Label::Conflict);
    const auto n_peace = raw.count(Label::Peace);
    if (!o.roc.empty()) {
        const auto curve = roc_points(scores, s.y);
        ensure_parent(o.roc);
        std::ofstream roc(o.roc, std::ios::binary);
        if (!roc) throw ValidationError("cannot write '" + o.roc + "'");
        write_roc_tsv(curve, roc, prov);
        const double a = auc(curve);
        const auto se = auc_standard_error(a, n_conflict, n_peace);
        out << "AUC " << format_fixed(a, 4) << " +- " << format_fixed(se.value, 5)
            << (se.degenerate ? " (degenerate: zero variance)" : "") << '\n';
    }
    if (!o.compare.empty()) {
        const TrainedModel other = load_model(o.compare);
        const Samples s2 = to_samples(to_model_space(other, raw));
        const auto scores2 = score_all(other.classifier, s2);
        const double a1 = auc(roc_points(scores, s.y));
        const double a2 = auc(roc_points(scores2, s2.y));
        const auto se1 = auc_standard_error(a1, n_conflict, n_peace);
        const auto se2 = auc_standard_error(a2, n_conflict, n_peace);
        if (se1.degenerate || se2.degenerate) throw ComputationError("cannot compare: an area of 0 or 1 has zero standard error");
        const double r = o.r_given ? o.r : estimate_auc_correlation(scores, scores2, s.y);
        out << comparison_report(fs::path(o.model).filename().string(), fs::path(o.compare).filename().string(),
                                 compare_aucs(a1, se1.value, a2, se2.value, r));
    }
    return kOk;
}

int cmd_sensitivity(const SensitivityOptions& o, std::ostream& out) {
    if (o.format != "text" && o.format != "csv") throw ValidationError("format must be text or csv");
    const bool csv = o.format == "csv";
    const TrainedModel model = load_model(o.model);
    const Dataset test = load_dataset(o.data);
    const Provenance prov{model.seed, sha256_file(o.data)};

    auto emit = [&](const std::string& name, const std::string& text) {
        if (o.out_dir.empty()) {
            out << text << '\n';
        } else {
            write_text(fs::path(o.out_dir) / (name + (csv ? ".csv" : ".txt")), text);
        }
    };

    const auto one = experiment_one(model);
    emit("experiment_one", capture([&](std::ostream& s) {
             csv ? write_experiment_one_csv(one, s, prov) : write_experiment_one(one, s, prov);
         }));
    const auto two = experiment_two(model, test);
    emit("experiment_two", capture([&](std::ostream& s) {
             csv ? write_perturbation_csv(two, s, prov) : write_perturbation_report(two, s, prov);
         }));
    if (!o.train.empty()) {
        const Dataset train = normalize(load_dataset(o.train), model.normalizer);
        const auto table =
            single_variable_ranking(make_trainer(model.settings, model.seed), train, to_model_space(model, test));
        emit("ranking", capture([&](std::ostream& s) {
                 csv ? write_ranking_csv(table, s, prov) : write_ranking(table, s, prov);
             }));
    }
    return kOk;
}

int cmd_pipeline(const PipelineOptions& o, std::ostream& out, std::ostream& err) {
    PipelineConfig cfg;
    cfg.data = o.data;
    cfg.out_dir = o.out_dir;
    cfg.seed = o.seed;
    cfg.per_class = o.classes;
    cfg.grid.c_values = o.c_values;
    cfg.grid.gamma_values = o.gamma_values;
    cfg.grid.k = o.k;
    cfg.kkt_tol = o.kkt_tol;
    cfg.hidden = o.hidden;
    cfg.cycles = o.cycles;
    const auto result = run_pipeline(cfg);
    if (!result.ok) {
        err << "pipeline failed at stage " << result.failed_stage << ": " << result.error << '\n';
        return result.input_error ? kInputError : kComputationError;
    }
    out << "pipeline complete: " << result.artifacts.size() << " artifacts in " << o.out_dir << '\n';
    if (result.svm_confusion) out << confusion_report("Support Vector Machine", *result.svm_confusion);
    if (result.mlp_confusion) out << confusion_report("Neural Network", *result.mlp_confusion);
    out << "AUC svm " << format_fixed(result.svm_auc, 4) << "  AUC mlp " << format_fixed(result.mlp_auc, 4) << '\n';
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Conflict prediction with SCG-trained MLPs and RBF SVMs"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.set_config("--config", "", "Optional config file (key = value); command-line flags take precedence");
    app.require_subcommand(1);

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dyad-year dataset");
    synth_cmd->add_option("--peace", synth.peace, "Number of peace records");
    synth_cmd->add_option("--conflict", synth.conflict, "Number of conflict records");
    synth_cmd->add_option("--separation", synth.separation, "Class mean separation in standard deviations")
        ->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--seed", synth.seed);
    synth_cmd->add_option("--informative", synth.informative, "Variables carrying class signal")->delimiter(',');
    synth_cmd->add_option("--out", synth.out, "Output CSV (stdout if omitted)");

    TrainOptions train;
    auto* train_cmd = app.add_subcommand("train", "Train an MLP or SVM on a dataset");
    train_cmd->add_option("--model", train.model, "mlp or svm")->check(CLI::IsMember({"mlp", "svm"}));
    train_cmd->add_option("--data", train.data)->required();
    train_cmd->add_option("--out", train.out, "Model file")->required();
    train_cmd->add_option("--summary", train.summary, "Write the training summary here instead of stdout");
    train_cmd->add_option("--seed", train.seed);
    train_cmd->add_option("--c", train.c, "SVM penalty C")->check(CLI::PositiveNumber);
    train_cmd->add_option("--gamma", train.gamma, "RBF gamma")->check(CLI::PositiveNumber);
    train_cmd->add_option("--kernel", train.kernel)->check(CLI::IsMember({"rbf", "linear"}));
    train_cmd->add_option("--kkt-tol", train.kkt_tol)->check(CLI::PositiveNumber);
    train_cmd->add_option("--hidden", train.hidden, "MLP hidden units")->check(CLI::PositiveNumber);
    train_cmd->add_option("--cycles", train.cycles, "SCG iterations")->check(CLI::PositiveNumber);

    GridOptions grid;
    auto* grid_cmd = app.add_subcommand("grid-search", "k-fold cross-validated (C, gamma) grid search");
    grid_cmd->add_option("--data", grid.data)->required();
    grid_cmd->add_option("--out", grid.out, "CV report CSV (stdout if omitted)");
    grid_cmd->add_option("--seed", grid.seed);
    grid_cmd->add_option("--k", grid.k)->check(CLI::Range(2, 1000000));
    grid_cmd->add_option("--c-values", grid.c_values)->delimiter(',');
    grid_cmd->add_option("--gamma-values", grid.gamma_values)->delimiter(',');
    grid_cmd->add_option("--kkt-tol", grid.kkt_tol)->check(CLI::PositiveNumber);

    EvaluateOptions eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "Confusion matrix, ROC and AUC comparison");
    eval_cmd->add_option("--model", eval.model)->required();
    eval_cmd->add_option("--data", eval.data)->required();
    eval_cmd->add_option("--roc", eval.roc, "Write the ROC curve as TSV");
    eval_cmd->add_option("--compare", eval.compare, "Second model for the correlated-AUC z test");
    auto* r_opt = eval_cmd->add_option("--r", eval.r, "Correlation between the two areas")->check(CLI::Range(-1.0, 1.0));

    SensitivityOptions sens;
    auto* sens_cmd = app.add_subcommand("sensitivity", "Variable perturbation experiments and single-variable ranking");
    sens_cmd->add_option("--model", sens.model)->required();
    sens_cmd->add_option("--data", sens.data, "Test data")->required();
    sens_cmd->add_option("--train", sens.train, "Training data; enables the single-variable ranking");
    sens_cmd->add_option("--out-dir", sens.out_dir, "Write reports here instead of stdout");
    sens_cmd->add_option("--format", sens.format)->check(CLI::IsMember({"text", "csv"}));

    PipelineOptions pipe;
    auto* pipe_cmd = app.add_subcommand("pipeline", "Full protocol: sample, select, train, evaluate, sensitivity");
    pipe_cmd->add_option("--data", pipe.data)->required();
    pipe_cmd->add_option("--out-dir", pipe.out_dir)->required();
    pipe_cmd->add_option("--seed", pipe.seed);
    pipe_cmd->add_option("--classes", pipe.classes, "Training records per class");
    pipe_cmd->add_option("--k", pipe.k)->check(CLI::Range(2, 1000000));
    pipe_cmd->add_option("--c-values", pipe.c_values)->delimiter(',');
    pipe_cmd->add_option("--gamma-values", pipe.gamma_values)->delimiter(',');
    pipe_cmd->add_option("--kkt-tol", pipe.kkt_tol)->check(CLI::PositiveNumber);
    pipe_cmd->add_option("--hidden", pipe.hidden)->check(CLI::PositiveNumber);
    pipe_cmd->add_option("--cycles", pipe.cycles)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*synth_cmd) return cmd_synth(synth, out);
        if (*train_cmd) return cmd_train(train, out);
        if (*grid_cmd) return cmd_grid(grid, out);
        if (*eval_cmd) {
            eval.r_given = r_opt->count() > 0;
            return cmd_evaluate(eval, out);
        }
        if (*sens_cmd) return cmd_sensitivity(sens, out);
        if (*pipe_cmd) return cmd_pipeline(pipe, out, err);
    } catch (const ComputationError& e) {
        err << "error: " << e.what() << '\n';
        return kComputationError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kComputationError;
    }
    return kInputError;
}

}  // namespace midpredict::cli
