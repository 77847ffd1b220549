#include "midpredict/pipeline.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "midpredict/error.hpp"
#include "midpredict/model_io.hpp"
#include "midpredict/report.hpp"
#include "midpredict/sensitivity.hpp"

namespace midpredict {

namespace {

class ArtifactWriter {
public:
    ArtifactWriter(std::filesystem::path dir, PipelineResult& result) : dir_(std::move(dir)), result_(result) {}

    void write(const std::string& file, const std::string& kind, const std::string& content) {
        std::ofstream out(dir_ / file, std::ios::binary);
        if (!out) throw ValidationError("cannot write '" + (dir_ / file).string() + "'");
        out << content;
        result_.artifacts.push_back({file, kind, sha256_hex(content)});
    }

    template <class Fn>
    void write_with(const std::string& file, const std::string& kind, Fn&& fn) {
        std::ostringstream s;
        fn(s);
        write(file, kind, s.str());
    }

private:
    std::filesystem::path dir_;
    PipelineResult& result_;
};

void write_manifest(const std::filesystem::path& dir, const PipelineResult& result, const Provenance& prov) {
    std::ostringstream s;
    s << stamp_line(prov) << '\n';
    s << "status: " << (result.ok ? "ok" : "failed") << '\n';
    if (!result.ok) {
        s << "failed_stage: " << result.failed_stage << '\n';
        s << "error: " << result.error << '\n';
    }
    s << "artifact\tkind\tsha256\n";
    for (const auto& a : result.artifacts) s << a.file << '\t' << a.kind << '\t' << a.sha256 << '\n';
    std::ofstream out(dir / "manifest.txt", std::ios::binary);
    out << s.str();
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    PipelineResult result;
    std::filesystem::create_directories(cfg.out_dir);
    ArtifactWriter writer(cfg.out_dir, result);
    Provenance prov{cfg.seed, {}};

    std::string stage;
    auto run = [&](const std::string& name, const std::function<void()>& body) {
        stage = name;
        body();
    };

    try {
        Dataset raw;
        Split split;
        Dataset train, test;
        TrainedModel svm, mlp;

        run("load", [&] {
            prov.input_digest = sha256_file(cfg.data);
            raw = load_dataset(cfg.data);
        });
        run("balanced_sample", [&] { split = balanced_sample(raw, cfg.per_class, cfg.seed); });
        run("normalize", [&] {
            train = normalize(split.train);
            test = normalize(split.test, *train.normalizer);
        });
        run("grid_search", [&] {
            GridSpec grid = cfg.grid;
            grid.seed = cfg.seed;
            SmoConfig smo;
            smo.kkt_tol = cfg.kkt_tol;
            result.cv = grid_search(train, grid, smo);
            writer.write_with("cv_svm.csv", "cv_table", [&](std::ostream& o) { write_cv_report(*result.cv, o, prov); });
        });
        run("train", [&] {
            TrainSettings svm_settings;
            svm_settings.family = ModelFamily::Svm;
            svm_settings.kernel = KernelSpec::rbf(result.cv->best_gamma);
            svm_settings.c = result.cv->best_c;
            svm_settings.kkt_tol = cfg.kkt_tol;
            svm = train_model(split.train, svm_settings, cfg.seed);

            TrainSettings mlp_settings;
            mlp_settings.family = ModelFamily::Mlp;
            mlp_settings.hidden = cfg.hidden;
            mlp_settings.cycles = cfg.cycles;
            mlp = train_model(split.train, mlp_settings, cfg.seed);

            writer.write("svm.model", "model", model_to_text(svm, prov));
            writer.write("mlp.model", "model", model_to_text(mlp, prov));
        });
        run("evaluate", [&] {
            const Samples s = to_samples(test);
            const auto svm_scores = score_all(svm.classifier, s);
            const auto mlp_scores = score_all(mlp.classifier, s);
            result.svm_confusion = confusion(predict_all(svm.classifier, s), s.y);
            result.mlp_confusion = confusion(predict_all(mlp.classifier, s), s.y);
            writer.write("confusion.txt", "confusion",
                         stamp_line(prov) + "\n" + confusion_report("Support Vector Machine", *result.svm_confusion) +
                             confusion_report("Neural Network", *result.mlp_confusion));

            const auto svm_roc = roc_points(svm_scores, s.y);
            const auto mlp_roc = roc_points(mlp_scores, s.y);
            writer.write_with("roc_svm.tsv", "roc", [&](std::ostream& o) { write_roc_tsv(svm_roc, o, prov); });
            writer.write_with("roc_mlp.tsv", "roc", [&](std::ostream& o) { write_roc_tsv(mlp_roc, o, prov); });

            result.svm_auc = auc(svm_roc);
            result.mlp_auc = auc(mlp_roc);
            const auto n_conflict = test.count(Label::Conflict);
            const auto n_peace = test.count(Label::Peace);
            const auto se_svm = auc_standard_error(result.svm_auc, n_conflict, n_peace);
            const auto se_mlp = auc_standard_error(result.mlp_auc, n_conflict, n_peace);
            std::string text = stamp_line(prov) + "\n";
            if (se_svm.degenerate || se_mlp.degenerate) {
                text += "AUC svm = " + format_fixed(result.svm_auc, 4) + ", AUC mlp = " + format_fixed(result.mlp_auc, 4) +
                        "\nz test skipped: an area of 0 or 1 has zero standard error\n";
            } else {
                const double r = estimate_auc_correlation(svm_scores, mlp_scores, s.y);
                text += comparison_report("svm", "mlp", compare_aucs(result.svm_auc, se_svm.value, result.mlp_auc,
                                                                     se_mlp.value, r));
            }
            writer.write("comparison.txt", "comparison", text);
        });
        run("sensitivity", [&] {
            for (const auto* m : {&svm, &mlp}) {
                const std::string tag(family_name(m->classifier.family()));
                const auto one = experiment_one(*m);
                writer.write_with("experiment_one_" + tag + ".txt", "sensitivity_experiment_one",
                                  [&](std::ostream& o) { write_experiment_one(one, o, prov); });
                writer.write_with("experiment_one_" + tag + ".csv", "sensitivity_experiment_one",
                                  [&](std::ostream& o) { write_experiment_one_csv(one, o, prov); });
                const auto two = experiment_two(*m, test);
                writer.write_with("experiment_two_" + tag + ".txt", "sensitivity_experiment_two",
                                  [&](std::ostream& o) { write_perturbation_report(two, o, prov); });
                writer.write_with("experiment_two_" + tag + ".csv", "sensitivity_experiment_two",
                                  [&](std::ostream& o) { write_perturbation_csv(two, o, prov); });
            }
        });
        run("ranking", [&] {
            for (const auto* m : {&svm, &mlp}) {
                const std::string tag(family_name(m->classifier.family()));
                const auto table = single_variable_ranking(make_trainer(m->settings, m->seed), train, test);
                writer.write_with("ranking_" + tag + ".txt", "ranking",
                                  [&](std::ostream& o) { write_ranking(table, o, prov); });
                writer.write_with("ranking_" + tag + ".csv", "ranking",
                                  [&](std::ostream& o) { write_ranking_csv(table, o, prov); });
            }
        });
        result.ok = true;
    } catch (const Error& e) {
        result.failed_stage = stage;
        result.error = e.what();
        result.input_error = dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ParseError*>(&e);
    }
    write_manifest(cfg.out_dir, result, prov);
    return result;
}

}  // namespace midpredict
