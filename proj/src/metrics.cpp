// metrics.cpp
#include "more/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "more/errors.hpp"

namespace more {

namespace {

void require_same_shape(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b,
                        const char* where) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ArgumentError(std::string(where) + ": shape mismatch (" +
                            std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                            " vs " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()) + ")");
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double f1_of(double p, double r) { return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

double mae(const Eigen::Ref<const Matrix>& y_true, const Eigen::Ref<const Matrix>& y_pred) {
    require_same_shape(y_true, y_pred, "mae");
    if (y_true.size() == 0) throw ArgumentError("mae: empty matrices");
    return (y_true - y_pred).cwiseAbs().mean();
}

double r2_score(const Eigen::Ref<const Matrix>& y_true, const Eigen::Ref<const Matrix>& y_pred) {
    require_same_shape(y_true, y_pred, "r2_score");
    if (y_true.rows() < 2) throw ArgumentError("r2_score: need at least 2 rows");
    const auto cols = y_true.cols();
    double total = 0.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
        const double mean = y_true.col(j).mean();
        const double ss_tot = (y_true.col(j).array() - mean).square().sum();
        const double ss_res = (y_true.col(j) - y_pred.col(j)).squaredNorm();
        if (ss_tot == 0.0) {
            total += (ss_res == 0.0) ? 1.0 : 0.0;
        } else {
            total += 1.0 - ss_res / ss_tot;
        }
    }
    return total / static_cast<double>(cols);
}

std::vector<int> sigma_threshold_binarize(const Eigen::Ref<const Vector>& values, double mu,
                                          double sigma, int k) {
    if (!(sigma >= 0.0)) throw ArgumentError("sigma_threshold_binarize: sigma must be >= 0");
    const double threshold = mu + static_cast<double>(k) * sigma;
    std::vector<int> labels(static_cast<std::size_t>(values.size()));
    for (Eigen::Index i = 0; i < values.size(); ++i)
        labels[static_cast<std::size_t>(i)] = values(i) > threshold ? 1 : 0;
    return labels;
}

ClassificationReport classification_report(const std::vector<int>& true_labels,
                                           const std::vector<int>& pred_labels, int k) {
    if (true_labels.size() != pred_labels.size())
        throw ArgumentError("classification_report: label vectors differ in length");
    if (true_labels.empty()) throw ArgumentError("classification_report: empty label vectors");

    ClassificationReport rep;
    rep.threshold_shift = k;
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
        const int t = true_labels[i];
        const int p = pred_labels[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1))
            throw ArgumentError("classification_report: labels must be 0 or 1");
        if (t == 1 && p == 1) ++rep.tp;
        else if (t == 0 && p == 1) ++rep.fp;
        else if (t == 1 && p == 0) ++rep.fn;
        else ++rep.tn;
    }

    const auto tp = static_cast<double>(rep.tp);
    const auto fp = static_cast<double>(rep.fp);
    const auto fn = static_cast<double>(rep.fn);
    const auto tn = static_cast<double>(rep.tn);

    rep.class1.precision = safe_ratio(tp, tp + fp);
    rep.class1.recall = safe_ratio(tp, tp + fn);
    rep.class1.f1 = f1_of(rep.class1.precision, rep.class1.recall);

    // Class 0 scores treat label 0 as the positive class.
    rep.class0.precision = safe_ratio(tn, tn + fn);
    rep.class0.recall = safe_ratio(tn, tn + fp);
    rep.class0.f1 = f1_of(rep.class0.precision, rep.class0.recall);

    rep.macro_avg.precision = 0.5 * (rep.class1.precision + rep.class0.precision);
    rep.macro_avg.recall = 0.5 * (rep.class1.recall + rep.class0.recall);
    rep.macro_avg.f1 = 0.5 * (rep.class1.f1 + rep.class0.f1);

    // Pooled one-vs-rest counts collapse to accuracy for single-label binary
    // classification, so micro P = R = F1 exactly.
    const double accuracy = (tp + tn) / (tp + fp + fn + tn);
    rep.micro_avg.precision = accuracy;
    rep.micro_avg.recall = accuracy;
    rep.micro_avg.f1 = accuracy;
    return rep;
}

std::vector<MethodReport> evaluate_methods(
    const Eigen::Ref<const Matrix>& y_true,
    const std::vector<std::pair<std::string, Matrix>>& predictions) {
    if (predictions.empty()) throw ArgumentError("evaluate_methods: no predictions given");
    for (const auto& [name, pred] : predictions) require_same_shape(y_true, pred, "evaluate_methods");
    const auto num = y_true.rows();
    const auto m = y_true.cols();
    if (num < 2) throw ArgumentError("evaluate_methods: need at least 2 samples");

    std::vector<MethodReport> table(predictions.size());
    for (std::size_t p = 0; p < predictions.size(); ++p) {
        table[p].method = predictions[p].first;
        table[p].mae = mae(y_true, predictions[p].second);
        table[p].r2 = r2_score(y_true, predictions[p].second);
        for (int shift = kSigmaShiftMin; shift <= kSigmaShiftMax; ++shift)
            table[p].by_shift[static_cast<std::size_t>(shift - kSigmaShiftMin)]
                .threshold_shift = shift;
    }

    auto add = [](ClassScores& acc, const ClassScores& s) {
        acc.precision += s.precision;
        acc.recall += s.recall;
        acc.f1 += s.f1;
    };

    for (Eigen::Index i = 0; i < num; ++i) {
        Vector truth = y_true.row(i).transpose();
        const double mu = truth.mean();
        const double sigma =
            std::sqrt((truth.array() - mu).square().sum() / static_cast<double>(m));
        for (int shift = kSigmaShiftMin; shift <= kSigmaShiftMax; ++shift) {
            const auto slot = static_cast<std::size_t>(shift - kSigmaShiftMin);
            const auto true_labels = sigma_threshold_binarize(truth, mu, sigma, shift);
            for (std::size_t p = 0; p < predictions.size(); ++p) {
                Vector pred = predictions[p].second.row(i).transpose();
                const auto pred_labels = sigma_threshold_binarize(pred, mu, sigma, shift);
                const auto rep = classification_report(true_labels, pred_labels, shift);
                auto& acc = table[p].by_shift[slot];
                add(acc.class1, rep.class1);
                add(acc.class0, rep.class0);
                add(acc.macro_avg, rep.macro_avg);
                add(acc.micro_avg, rep.micro_avg);
            }
        }
    }

    const double inv_n = 1.0 / static_cast<double>(num);
    auto scale = [&](ClassScores& s) {
        s.precision *= inv_n;
        s.recall *= inv_n;
        s.f1 *= inv_n;
    };
    for (auto& method : table) {
        for (auto& shift : method.by_shift) {
            scale(shift.class1);
            scale(shift.class0);
            scale(shift.macro_avg);
            scale(shift.micro_avg);
        }
    }
    return table;
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw ArgumentError("anova_oneway: need at least 2 groups");
    std::size_t total = 0;
    for (const auto& g : groups) {
        if (g.empty()) throw ArgumentError("anova_oneway: empty group");
        for (double v : g)
            if (!std::isfinite(v)) throw ArgumentError("anova_oneway: non-finite value");
        total += g.size();
    }
    if (total <= groups.size())
        throw ArgumentError("anova_oneway: total sample count must exceed group count");

    AnovaResult res;
    res.df_between = static_cast<int>(groups.size()) - 1;
    res.df_within = static_cast<int>(total - groups.size());

    bool all_same = true;
    const double first = groups[0][0];
    for (const auto& g : groups)
        for (double v : g)
            if (v != first) all_same = false;
    if (all_same) {
        res.f_statistic = 0.0;
        res.p_value = 1.0;
        return res;
    }

    double grand = 0.0;
    for (const auto& g : groups)
        for (double v : g) grand += v;
    grand /= static_cast<double>(total);

    double ss_between = 0.0;
    double ss_within = 0.0;
    for (const auto& g : groups) {
        double mean = 0.0;
        for (double v : g) mean += v;
        mean /= static_cast<double>(g.size());
        ss_between += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
        for (double v : g) ss_within += (v - mean) * (v - mean);
    }

    if (ss_within == 0.0) {
        res.f_statistic = std::numeric_limits<double>::infinity();
        res.p_value = 0.0;
        return res;
    }

    const double d1 = static_cast<double>(res.df_between);
    const double d2 = static_cast<double>(res.df_within);
    res.f_statistic = (ss_between / d1) / (ss_within / d2);
    // Upper tail of the F distribution through the regularized incomplete
    // beta: P(F > f) = I_{d2/(d2 + d1 f)}(d2/2, d1/2).
    const double x = d2 / (d2 + d1 * res.f_statistic);
    res.p_value = boost::math::ibeta(0.5 * d2, 0.5 * d1, x);
    return res;
}

}  // namespace more
