// baseline.hpp -- closed-form multi-output ridge regression.
#pragma once

#include <vector>

#include "more/dataset.hpp"
#include "more/numerics.hpp"

namespace more {

struct RidgeModel {
    Matrix weights;  // m x n
    double lambda = 0.0;

    Eigen::Index input_dim() const { return weights.cols(); }
    Eigen::Index output_dim() const { return weights.rows(); }
};

/// Solves (X^T X + lambda I) w_i = X^T y_i for every output dimension with a
/// single factorization. lambda = 0 is ordinary least squares and fails with
/// SingularSystemError on rank-deficient inputs; pass lambda > 0 instead.
RidgeModel ridge_fit(const Dataset& data, double lambda);

Vector ridge_predict(const RidgeModel& model, const Eigen::Ref<const Vector>& x);
Matrix ridge_predict_batch(const RidgeModel& model, const Eigen::Ref<const Matrix>& xs);

struct RidgeGridEntry {
    double lambda = 0.0;
    double validation_mae = 0.0;
};

struct RidgeGridResult {
    RidgeModel best;
    std::vector<RidgeGridEntry> entries;  // in the order the lambdas were given
};

/// Fits one model per lambda on `train`, scores each by MAE on `validation`,
/// and returns the winner (ties broken toward the earlier lambda).
RidgeGridResult ridge_grid_search(const Dataset& train, const Dataset& validation,
                                  const std::vector<double>& lambdas);

}  // namespace more
