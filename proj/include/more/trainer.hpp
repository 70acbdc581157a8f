// trainer.hpp -- generalized EM for the mixture of regression experts:
// closed-form expert updates, safeguarded gradient-ascent gating updates.
#pragma once

#include <cstdint>
#include <vector>

#include "more/dataset.hpp"
#include "more/model.hpp"

namespace more {

enum class InitMethod { kmeans_partition, random };

struct TrainingConfig {
    int k = 1;
    int max_iters = 200;
    double tol = 1e-10;  // relative log-likelihood change
    double eta = 0.1;    // gating ascent step size
    int gating_steps = 5;
    std::uint64_t seed = 0;
    double variance_floor = kDefaultVarianceFloor;
    InitMethod init = InitMethod::kmeans_partition;
    int threads = 1;

    void validate() const;
};

struct EmptyExpertEvent {
    int iteration = 0;
    int expert = 0;
};

struct TrainingTrace {
    /// Entry 0 is the initial model's log-likelihood, then one entry per
    /// completed iteration. Non-decreasing up to 1e-8 absolute slack.
    std::vector<double> log_likelihoods;
    int iterations_run = 0;
    bool converged = false;
    std::vector<EmptyExpertEvent> empty_expert_events;

    double final_log_likelihood() const { return log_likelihoods.back(); }
};

/// k-means-partition or random initialization; deterministic given seed.
MixtureModel initialize(const Dataset& data, const TrainingConfig& config);

struct EStepResult {
    Matrix responsibilities;  // N x K, rows sum to 1
    double log_likelihood = 0.0;
};

/// Responsibilities of every expert for every sample, plus the data
/// log-likelihood of the current model (a free byproduct).
EStepResult e_step(const MixtureModel& model, const Dataset& data, int threads = 1);

struct ExpertUpdate {
    std::vector<Expert> experts;
    std::vector<int> reinitialized;  // experts rebuilt via the empty-expert path
};

/// Closed-form weighted-least-squares update of every expert's weights,
/// then the responsibility-weighted residual variances (floored). An expert
/// whose responsibility column sums below 1e-12 is reinitialized from the
/// worst-reconstructed samples instead of being dropped.
ExpertUpdate m_step_experts(const MixtureModel& current, const Dataset& data,
                            const Matrix& responsibilities, const TrainingConfig& config);

/// Up to gating_steps gradient-ascent steps on the gating part of Q,
/// halving the step (up to 10 times) whenever it would decrease, so the
/// gating objective never goes down.
GatingNetwork m_step_gating(const MixtureModel& model, const Dataset& data,
                            const Matrix& responsibilities, const TrainingConfig& config);

/// Expected complete-data log-likelihood of `updated` under responsibilities
/// computed from the previous model. Used for monotonicity checks.
double evaluate_q(const MixtureModel& updated, const Dataset& data,
                  const Matrix& responsibilities);

/// The gating part of Q for arbitrary gating parameters; exposed for tests.
double gating_q(const Eigen::Ref<const Matrix>& x, const Matrix& responsibilities,
                const Matrix& gating_params);

/// Gradient of gating_q with respect to the gating parameters:
/// (responsibilities - gates)^T x, shape K x n.
Matrix gating_q_gradient(const Eigen::Ref<const Matrix>& x, const Matrix& responsibilities,
                         const Matrix& gating_params);

struct FitResult {
    MixtureModel model;
    TrainingTrace trace;
};

/// Alternates E-steps and M-steps until the relative log-likelihood change
/// drops below tol or max_iters is reached.
FitResult fit(const Dataset& data, const TrainingConfig& config);

}  // namespace more
