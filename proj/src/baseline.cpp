// baseline.cpp
#include "more/baseline.hpp"

#include <string>

#include <Eigen/Cholesky>

#include "more/errors.hpp"
#include "more/metrics.hpp"

namespace more {

RidgeModel ridge_fit(const Dataset& data, double lambda) {
    data.validate();
    if (!data.has_targets()) throw ArgumentError("ridge_fit: dataset has no targets");
    if (data.size() < 1) throw ArgumentError("ridge_fit: empty dataset");
    if (!(lambda >= 0.0)) throw ArgumentError("ridge_fit: lambda must be >= 0");

    Eigen::MatrixXd gram = data.x.transpose() * data.x;
    gram.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw SingularSystemError(
            "ridge_fit: X^T X + lambda I is not positive definite at lambda = " +
            std::to_string(lambda) + "; use a larger lambda");

    Eigen::MatrixXd wt = llt.solve(Eigen::MatrixXd(data.x.transpose() * data.y));  // n x m
    RidgeModel model;
    model.weights = wt.transpose();
    model.lambda = lambda;
    check_finite(model.weights, "ridge_fit: weights");
    return model;
}

Vector ridge_predict(const RidgeModel& model, const Eigen::Ref<const Vector>& x) {
    if (x.size() != model.input_dim())
        throw ArgumentError("ridge_predict: input has wrong dimension");
    return model.weights * x;
}

Matrix ridge_predict_batch(const RidgeModel& model, const Eigen::Ref<const Matrix>& xs) {
    if (xs.cols() != model.input_dim())
        throw ArgumentError("ridge_predict_batch: inputs have wrong dimension");
    return xs * model.weights.transpose();
}

RidgeGridResult ridge_grid_search(const Dataset& train, const Dataset& validation,
                                  const std::vector<double>& lambdas) {
    if (lambdas.empty()) throw ArgumentError("ridge_grid_search: no lambdas given");
    if (!validation.has_targets())
        throw ArgumentError("ridge_grid_search: validation set has no targets");

    RidgeGridResult result;
    bool have_best = false;
    double best_mae = 0.0;
    for (double lambda : lambdas) {
        RidgeModel model = ridge_fit(train, lambda);
        Matrix pred = ridge_predict_batch(model, validation.x);
        const double score = mae(validation.y, pred);
        result.entries.push_back({lambda, score});
        if (!have_best || score < best_mae) {
            have_best = true;
            best_mae = score;
            result.best = std::move(model);
        }
    }
    return result;
}

}  // namespace more
