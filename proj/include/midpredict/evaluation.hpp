#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "midpredict/data.hpp"
#include "midpredict/report.hpp"

namespace midpredict {

// Counts in conflict-detection vocabulary: conflict is the positive class.
struct ConfusionMatrix {
    std::size_t tc = 0;  // true conflict  (true positive)
    std::size_t fp = 0;  // false peace    (false negative)
    std::size_t tp = 0;  // true peace     (true negative)
    std::size_t fc = 0;  // false conflict (false positive)

    std::size_t total() const { return tc + fp + tp + fc; }
    std::size_t actual_conflicts() const { return tc + fp; }
    std::size_t actual_peaces() const { return tp + fc; }
    std::size_t predicted_conflicts() const { return tc + fc; }
    std::size_t predicted_peaces() const { return tp + fp; }

    // Sensitivity and specificity; NaN when the class is absent.
    double conflict_accuracy() const;
    double peace_accuracy() const;
    double overall_accuracy() const;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual);

struct RocPoint {
    double threshold;  // conflict iff score >= threshold; +inf for the origin
    double fpr;
    double tpr;
    std::size_t false_positives;
    std::size_t true_positives;
};

struct RocCurve {
    std::vector<RocPoint> points;
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

// One point per distinct score (descending) plus the origin.
RocCurve roc_points(std::span<const double> scores, std::span<const Label> actual);

// Trapezoidal area, accumulated on integer counts so it equals the
// Mann-Whitney statistic with half-credit ties bit for bit.
double auc(const RocCurve& curve);

struct StandardError {
    double value = 0.0;
    bool degenerate = false;  // area of exactly 0 or 1
};

// Hanley-McNeil approximation.
StandardError auc_standard_error(double area, std::size_t n_conflict, std::size_t n_peace);

double auc_z_test(double a1, double se1, double a2, double se2, double r);

inline constexpr double kZCritical95 = 1.96;

struct AucComparison {
    double a1 = 0.0;
    double a2 = 0.0;
    double se1 = 0.0;
    double se2 = 0.0;
    double r = 0.0;
    double z = 0.0;

    bool significant() const;
};

AucComparison compare_aucs(double a1, double se1, double a2, double se2, double r);

// Average of the within-class Spearman correlations between two classifiers'
// scores on the same cases, used as the correlation between their areas.
double estimate_auc_correlation(std::span<const double> scores1, std::span<const double> scores2,
                                std::span<const Label> actual);

double spearman(std::span<const double> a, std::span<const double> b);

void write_roc_tsv(const RocCurve& curve, std::ostream& out, const Provenance& provenance);
std::string confusion_report(const std::string& name, const ConfusionMatrix& m);
std::string comparison_report(const std::string& name1, const std::string& name2, const AucComparison& cmp);

}  // namespace midpredict
