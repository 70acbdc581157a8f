// helpers.hpp -- shared builders and comparators for the test suites.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "more/dataset.hpp"
#include "more/model.hpp"

namespace testutil {

inline more::Matrix normal_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                                  double scale = 1.0) {
    std::normal_distribution<double> normal;
    more::Matrix out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = scale * normal(rng);
    return out;
}

inline more::Vector normal_vector(std::mt19937_64& rng, Eigen::Index size, double scale = 1.0) {
    std::normal_distribution<double> normal;
    more::Vector out(size);
    for (Eigen::Index i = 0; i < size; ++i) out(i) = scale * normal(rng);
    return out;
}

/// Random mixture model with well-behaved variances.
inline more::MixtureModel random_model(std::mt19937_64& rng, int k, Eigen::Index n,
                                       Eigen::Index m) {
    std::uniform_real_distribution<double> var(0.05, 2.0);
    std::vector<more::Expert> experts;
    for (int j = 0; j < k; ++j) {
        more::Expert e;
        e.weights = normal_matrix(rng, m, n);
        e.variances = more::Vector(m);
        for (Eigen::Index i = 0; i < m; ++i) e.variances(i) = var(rng);
        experts.push_back(std::move(e));
    }
    more::GatingNetwork gating{normal_matrix(rng, k, n)};
    return more::MixtureModel(std::move(experts), std::move(gating));
}

/// Random dataset; y is arbitrary (not drawn from any particular model).
inline more::Dataset random_dataset(std::mt19937_64& rng, Eigen::Index n_samples,
                                    Eigen::Index n, Eigen::Index m) {
    more::Dataset data;
    data.x = normal_matrix(rng, n_samples, n);
    data.y = normal_matrix(rng, n_samples, m);
    return data;
}

inline double max_abs_diff(const more::Matrix& a, const more::Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        return std::numeric_limits<double>::infinity();
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const more::Vector& a, const more::Vector& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

inline double rel_frobenius(const more::Matrix& a, const more::Matrix& b) {
    const double denom = b.norm();
    return denom == 0.0 ? a.norm() : (a - b).norm() / denom;
}

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool near_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace testutil
