#include "midpredict/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "midpredict/error.hpp"

namespace midpredict {

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : static_cast<double>(num) / static_cast<double>(den);
}

// Average ranks, ties sharing the mean rank.
std::vector<double> ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = mean_rank;
        i = j + 1;
    }
    return r;
}

}  // namespace

double ConfusionMatrix::conflict_accuracy() const { return ratio(tc, tc + fp); }
double ConfusionMatrix::peace_accuracy() const { return ratio(tp, tp + fc); }
double ConfusionMatrix::overall_accuracy() const { return ratio(tc + tp, total()); }

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual) {
    require_same_dim(actual.size(), predicted.size(), "confusion");
    if (actual.empty()) throw ValidationError("confusion: no predictions");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const bool pred_conflict = predicted[i] == Label::Conflict;
        if (actual[i] == Label::Conflict) (pred_conflict ? m.tc : m.fp)++;
        else (pred_conflict ? m.fc : m.tp)++;
    }
    return m;
}

RocCurve roc_points(std::span<const double> scores, std::span<const Label> actual) {
    require_same_dim(actual.size(), scores.size(), "roc_points");
    RocCurve curve;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) throw ValidationError("roc_points: non-finite score");
        (actual[i] == Label::Conflict ? curve.positives : curve.negatives)++;
    }
    if (curve.positives == 0 || curve.negatives == 0) {
        throw ValidationError("roc_points: both classes are required");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

    const double pos = static_cast<double>(curve.positives);
    const double neg = static_cast<double>(curve.negatives);
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0, 0, 0});
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double threshold = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == threshold; ++i) {
            (actual[order[i]] == Label::Conflict ? tp : fp)++;
        }
        curve.points.push_back({threshold, static_cast<double>(fp) / neg, static_cast<double>(tp) / pos, fp, tp});
    }
    return curve;
}

double auc(const RocCurve& curve) {
    if (curve.points.size() < 2 || curve.positives == 0 || curve.negatives == 0) {
        throw ValidationError("auc: invalid ROC curve");
    }
    // Twice the area in units of one (positive, negative) pair.
    unsigned long long twice_area = 0;
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
        const auto& a = curve.points[k - 1];
        const auto& b = curve.points[k];
        twice_area += static_cast<unsigned long long>(b.false_positives - a.false_positives) *
                      (a.true_positives + b.true_positives);
    }
    return static_cast<double>(twice_area) /
           (2.0 * static_cast<double>(curve.positives) * static_cast<double>(curve.negatives));
}

StandardError auc_standard_error(double area, std::size_t n_conflict, std::size_t n_peace) {
    if (!(area >= 0.0 && area <= 1.0)) throw ValidationError("auc_standard_error: area must lie in [0, 1]");
    if (n_conflict < 1 || n_peace < 1) throw ValidationError("auc_standard_error: both counts must be >= 1");
    if (area == 0.0 || area == 1.0) return {0.0, true};
    const double a2 = area * area;
    const double q1 = area / (2.0 - area);
    const double q2 = 2.0 * a2 / (1.0 + area);
    const double nc = static_cast<double>(n_conflict);
    const double np = static_cast<double>(n_peace);
    const double var = (area * (1.0 - area) + (nc - 1.0) * (q1 - a2) + (np - 1.0) * (q2 - a2)) / (nc * np);
    return {std::sqrt(var), false};
}

double auc_z_test(double a1, double se1, double a2, double se2, double r) {
    if (!(se1 > 0.0) || !(se2 > 0.0)) throw ValidationError("auc_z_test: standard errors must be positive");
    if (!(r >= -1.0 && r <= 1.0)) throw ValidationError("auc_z_test: r must lie in [-1, 1]");
    const double var = se1 * se1 + se2 * se2 - 2.0 * r * se1 * se2;
    if (!(var > 0.0)) throw ComputationError("auc_z_test: non-positive variance of the difference (inconsistent r)");
    return (a1 - a2) / std::sqrt(var);
}

bool AucComparison::significant() const { return std::abs(z) > kZCritical95; }

AucComparison compare_aucs(double a1, double se1, double a2, double se2, double r) {
    return {a1, a2, se1, se2, r, auc_z_test(a1, se1, a2, se2, r)};
}

double spearman(std::span<const double> a, std::span<const double> b) {
    require_same_dim(a.size(), b.size(), "spearman");
    if (a.size() < 2) return 0.0;
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

double estimate_auc_correlation(std::span<const double> scores1, std::span<const double> scores2,
                                std::span<const Label> actual) {
    require_same_dim(actual.size(), scores1.size(), "estimate_auc_correlation");
    require_same_dim(actual.size(), scores2.size(), "estimate_auc_correlation");
    double total = 0.0;
    for (auto cls : {Label::Conflict, Label::Peace}) {
        std::vector<double> s1, s2;
        for (std::size_t i = 0; i < actual.size(); ++i) {
            if (actual[i] != cls) continue;
            s1.push_back(scores1[i]);
            s2.push_back(scores2[i]);
        }
        total += spearman(s1, s2);
    }
    return 0.5 * total;
}

void write_roc_tsv(const RocCurve& curve, std::ostream& out, const Provenance& provenance) {
    std::ostringstream s;
    s << stamp_line(provenance) << '\n';
    s << "threshold\tfpr\tsensitivity\n";
    for (const auto& p : curve.points) {
        s << (std::isinf(p.threshold) ? std::string("inf") : format_double(p.threshold)) << '\t'
          << format_double(p.fpr) << '\t' << format_double(p.tpr) << '\n';
    }
    out << s.str();
}

std::string confusion_report(const std::string& name, const ConfusionMatrix& m) {
    std::ostringstream s;
    s << name << '\n';
    s << "  TC " << m.tc << "  FP " << m.fp << "  TP " << m.tp << "  FC " << m.fc << '\n';
    s << "  conflict accuracy " << format_fixed(100.0 * m.conflict_accuracy(), 1) << "%"
      << "  peace accuracy " << format_fixed(100.0 * m.peace_accuracy(), 1) << "%"
      << "  overall " << format_fixed(100.0 * m.overall_accuracy(), 1) << "%\n";
    return s.str();
}

std::string comparison_report(const std::string& name1, const std::string& name2, const AucComparison& cmp) {
    std::ostringstream s;
    s << "AUC " << name1 << " = " << format_fixed(cmp.a1, 4) << " (SE " << format_fixed(cmp.se1, 5) << ")\n";
    s << "AUC " << name2 << " = " << format_fixed(cmp.a2, 4) << " (SE " << format_fixed(cmp.se2, 5) << ")\n";
    s << "r = " << format_fixed(cmp.r, 4) << '\n';
    s << "z = " << format_fixed(cmp.z, 3) << '\n';
    s << (cmp.significant() ? "significant difference at the 95% level (|z| > 1.96)\n"
                            : "no significant difference at the 95% level (|z| <= 1.96)\n");
    return s.str();
}

}  // namespace midpredict
