// metrics.hpp -- regression metrics, mu+k*sigma threshold classification
// reports, and one-way ANOVA for method comparison.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "more/numerics.hpp"

namespace more {

/// Mean absolute error over all entries.
double mae(const Eigen::Ref<const Matrix>& y_true, const Eigen::Ref<const Matrix>& y_pred);

/// Per-output-dimension R^2, uniformly averaged over dimensions. A dimension
/// with zero variance contributes 0, or 1 when its residuals are also zero.
double r2_score(const Eigen::Ref<const Matrix>& y_true, const Eigen::Ref<const Matrix>& y_pred);

/// Label 1 where value > mu + k*sigma, else 0. mu and sigma are meant to come
/// from the ground-truth vector and be applied to truth and prediction alike.
std::vector<int> sigma_threshold_binarize(const Eigen::Ref<const Vector>& values, double mu,
                                          double sigma, int k);

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct ClassificationReport {
    int threshold_shift = 0;
    // Confusion counts with class 1 as positive.
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    ClassScores class1, class0, macro_avg, micro_avg;
};

/// Binary precision/recall/F1 per class plus macro and micro averages.
/// Zero-denominator precision or recall is defined as 0. Micro scores equal
/// accuracy by construction.
ClassificationReport classification_report(const std::vector<int>& true_labels,
                                           const std::vector<int>& pred_labels, int k = 0);

inline constexpr int kSigmaShiftMin = -3;
inline constexpr int kSigmaShiftMax = 3;
inline constexpr int kSigmaShiftCount = kSigmaShiftMax - kSigmaShiftMin + 1;

struct AveragedScores {
    int threshold_shift = 0;
    ClassScores class1, class0, macro_avg, micro_avg;
};

struct MethodReport {
    std::string method;
    double mae = 0.0;
    double r2 = 0.0;
    /// Per-sample classification reports averaged over samples, one entry per
    /// threshold shift in [-3, 3] (index shift + 3).
    std::array<AveragedScores, kSigmaShiftCount> by_shift{};
};

/// Full comparison table: for every test sample, binarize the ground truth
/// and each method's prediction at mu + k*sigma of that sample's truth vector
/// for k = -3..3, and average the resulting reports over samples. Also
/// reports each method's MAE and R^2.
std::vector<MethodReport> evaluate_methods(
    const Eigen::Ref<const Matrix>& y_true,
    const std::vector<std::pair<std::string, Matrix>>& predictions);

struct AnovaResult {
    double f_statistic = 0.0;
    int df_between = 0;
    int df_within = 0;
    double p_value = 1.0;
};

/// One-way ANOVA over >= 2 groups. All values identical gives F = 0, p = 1;
/// zero within-group variance with real between-group spread gives
/// F = +infinity, p = 0.
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

}  // namespace more
