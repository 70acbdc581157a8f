#include "more/model.hpp"

#include <cmath>

namespace more {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;
}

double Expert::log_density(const Eigen::Ref<const Vector>& x,
                           const Eigen::Ref<const Vector>& y) const {
    if (x.size() != input_dim() || y.size() != output_dim())
        throw ArgumentError("Expert::log_density: dimension mismatch");
    const Vector residual = y - weights * x;
    const double quad = (residual.array().square() / (2.0 * variances.array())).sum();
    const double log_det = variances.array().log().sum();
    return -0.5 * static_cast<double>(output_dim()) * kLogTwoPi - 0.5 * log_det - quad;
}

MixtureModel::MixtureModel(std::vector<Expert> experts, GatingNetwork gating,
                           double variance_floor)
    : experts_(std::move(experts)), gating_(std::move(gating)), variance_floor_(variance_floor) {
    if (experts_.empty())
        throw ArgumentError("MixtureModel: needs at least one expert");
    if (variance_floor_ <= 0.0)
        throw ArgumentError("MixtureModel: variance floor must be positive");
    input_dim_ = experts_.front().input_dim();
    output_dim_ = experts_.front().output_dim();
    for (Expert& e : experts_)
        if (e.variances.size() > 0) e.variances = e.variances.cwiseMax(variance_floor_);
    validate();
}

void MixtureModel::validate() const {
    if (variance_floor_ <= 0.0)
        throw ArgumentError("MixtureModel: variance floor must be positive");
    for (const Expert& e : experts_) {
        if (e.input_dim() != input_dim_ || e.output_dim() != output_dim_)
            throw ArgumentError("MixtureModel: experts disagree on dimensions");
        if (e.variances.size() != output_dim_)
            throw ArgumentError("MixtureModel: variance vector length mismatch");
        check_finite(e.weights, "Expert.weights");
        check_finite(e.variances, "Expert.variances");
    }
    if (gating_.params.rows() != k() || gating_.params.cols() != input_dim_)
        throw ArgumentError("MixtureModel: gating parameter shape mismatch");
    check_finite(gating_.params, "GatingNetwork.params");
}

Vector MixtureModel::gate_log_probabilities(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != input_dim_)
        throw ArgumentError("MixtureModel::gate_log_probabilities: dimension mismatch");
    Vector scores = gating_.params * x;
    return (scores.array() - log_sum_exp(scores)).matrix();
}

Vector MixtureModel::gate_probabilities(const Eigen::Ref<const Vector>& x) const {
    return gate_log_probabilities(x).array().exp().matrix();
}

Vector MixtureModel::joint_log_terms(const Eigen::Ref<const Vector>& x,
                                     const Eigen::Ref<const Vector>& y) const {
    Vector terms = gate_log_probabilities(x);
    for (int j = 0; j < k(); ++j)
        terms(j) += experts_[static_cast<std::size_t>(j)].log_density(x, y);
    return terms;
}

Vector MixtureModel::responsibilities(const Eigen::Ref<const Vector>& x,
                                      const Eigen::Ref<const Vector>& y) const {
    Vector terms = joint_log_terms(x, y);
    return (terms.array() - log_sum_exp(terms)).exp().matrix();
}

Vector MixtureModel::predict_mean(const Eigen::Ref<const Vector>& x) const {
    const Vector gates = gate_probabilities(x);
    Vector mean = Vector::Zero(output_dim_);
    for (int j = 0; j < k(); ++j)
        mean.noalias() += gates(j) * (experts_[static_cast<std::size_t>(j)].weights * x);
    return mean;
}

Matrix MixtureModel::predict_mean_batch(const Eigen::Ref<const Matrix>& xs) const {
    if (xs.cols() != input_dim_)
        throw ArgumentError("MixtureModel::predict_mean_batch: dimension mismatch");
    const Eigen::Index n = xs.rows();

    // Gate probabilities for all rows at once.
    Matrix scores = xs * gating_.params.transpose();  // N x K
    Matrix gates(n, k());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector row = scores.row(i).transpose();
        gates.row(i) = (row.array() - log_sum_exp(row)).exp().matrix().transpose();
    }

    Matrix mean = Matrix::Zero(n, output_dim_);
    for (int j = 0; j < k(); ++j) {
        const Matrix expert_mean = xs * experts_[static_cast<std::size_t>(j)].weights.transpose();
        mean.array() += expert_mean.array().colwise() * gates.col(j).array();
    }
    return mean;
}

MixtureModel::Assignment MixtureModel::assign_expert(const Eigen::Ref<const Vector>& x) const {
    Assignment a;
    a.probabilities = gate_probabilities(x);
    a.expert = 0;
    for (int j = 1; j < k(); ++j)
        if (a.probabilities(j) > a.probabilities(a.expert)) a.expert = j;
    return a;
}

double MixtureModel::log_likelihood(const Dataset& data) const {
    if (data.size() == 0) return 0.0;
    if (!data.has_targets() || data.input_dim() != input_dim_ || data.output_dim() != output_dim_)
        throw ArgumentError("MixtureModel::log_likelihood: dataset dimensions do not match model");
    double total = 0.0;
    for (Eigen::Index i = 0; i < data.size(); ++i)
        total += log_sum_exp(joint_log_terms(data.x.row(i).transpose(), data.y.row(i).transpose()));
    return total;
}

}  // namespace more
