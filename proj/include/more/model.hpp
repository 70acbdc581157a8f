// model.hpp -- the mixture-of-regression-experts model: K linear experts with
// diagonal Gaussian noise, selected by a softmax gating network.
#pragma once

#include <vector>

#include "more/dataset.hpp"
#include "more/numerics.hpp"

namespace more {

/// Variances are floored here on construction and after every update so no
/// expert can collapse to a degenerate zero-variance density.
inline constexpr double kDefaultVarianceFloor = 1e-6;

/// One mixture component: a linear map plus per-output-dimension variances.
struct Expert {
    Matrix weights;    // m x n
    Vector variances;  // m, every entry >= variance floor

    Eigen::Index output_dim() const { return weights.rows(); }
    Eigen::Index input_dim() const { return weights.cols(); }

    /// log N(y; W x, diag(variances)).
    double log_density(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) const;
};

/// Softmax gating: expert j scores v_j . x; probabilities are the softmax of
/// the scores.
struct GatingNetwork {
    Matrix params;  // K x n, row j = v_j
};

class MixtureModel {
public:
    MixtureModel(std::vector<Expert> experts, GatingNetwork gating,
                 double variance_floor = kDefaultVarianceFloor);

    int k() const { return static_cast<int>(experts_.size()); }
    Eigen::Index input_dim() const { return input_dim_; }
    Eigen::Index output_dim() const { return output_dim_; }
    double variance_floor() const { return variance_floor_; }
    const std::vector<Expert>& experts() const { return experts_; }
    const GatingNetwork& gating() const { return gating_; }

    /// log softmax of the gating scores; entries <= 0, exp sums to 1.
    Vector gate_log_probabilities(const Eigen::Ref<const Vector>& x) const;
    Vector gate_probabilities(const Eigen::Ref<const Vector>& x) const;

    /// Posterior probability of each expert given (x, y).
    Vector responsibilities(const Eigen::Ref<const Vector>& x,
                            const Eigen::Ref<const Vector>& y) const;

    /// Gate-weighted combination of the expert means, sum_j g_j(x) W_j x.
    Vector predict_mean(const Eigen::Ref<const Vector>& x) const;
    Matrix predict_mean_batch(const Eigen::Ref<const Matrix>& xs) const;

    struct Assignment {
        int expert = 0;
        Vector probabilities;
    };
    /// Most probable expert under the gate; ties break to the lowest index.
    Assignment assign_expert(const Eigen::Ref<const Vector>& x) const;

    /// sum_n log sum_j g_j(x_n) p(y_n | x_n, expert j). Empty data gives 0.
    double log_likelihood(const Dataset& data) const;

    /// log g_j(x) + log p(y | x, expert j) for every j; the per-sample terms
    /// behind responsibilities and the likelihood.
    Vector joint_log_terms(const Eigen::Ref<const Vector>& x,
                           const Eigen::Ref<const Vector>& y) const;

private:
    void validate() const;

    std::vector<Expert> experts_;
    GatingNetwork gating_;
    Eigen::Index input_dim_ = 0;
    Eigen::Index output_dim_ = 0;
    double variance_floor_ = kDefaultVarianceFloor;
};

}  // namespace more
