// selection.hpp -- choosing the number of experts: BIC sweep and K-fold
// cross-validated scoring.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "more/dataset.hpp"
#include "more/trainer.hpp"

namespace more {

/// Free parameter count of a k-expert model: k(mn + m + n). Throws
/// DomainError if the product overflows 64 bits.
std::uint64_t n_params(std::uint64_t k, std::uint64_t n, std::uint64_t m);

/// Schwarz criterion d*ln(N) - 2*ln L (natural log). Lower is better.
double bic(std::uint64_t d, std::uint64_t n_samples, double log_likelihood);

struct BicEntry {
    int k = 0;
    std::uint64_t d = 0;
    Eigen::Index n_samples = 0;
    double log_likelihood = 0.0;
    double bic = 0.0;
    double log10_bic = 0.0;  // NaN when bic <= 0
    std::uint64_t seed_of_best = 0;
    bool failed = false;
    std::string error;
};

struct BicReport {
    std::vector<BicEntry> entries;  // ascending k
    int best_k = 0;
};

/// Fits each k in [k_min, k_max] with `restarts` derived seeds, keeps the
/// best final log-likelihood per k, and picks best_k by minimum BIC (ties go
/// to the smaller k). A k whose every restart throws is recorded as failed
/// rather than dropped.
BicReport select_k(const Dataset& data, int k_min, int k_max,
                   const TrainingConfig& base_config, int restarts = 3);

/// CSV with columns k, d, n_samples, log_likelihood, bic, log10_bic,
/// seed_of_best, status.
std::string bic_report_csv(const BicReport& report);

struct FoldPlan {
    int n_folds = 5;
    std::uint64_t seed = 0;
    std::vector<int> assignment;  // per-sample fold index in [0, n_folds)

    /// Shuffled balanced partition; fold sizes differ by at most 1.
    static FoldPlan make(Eigen::Index n_samples, int n_folds, std::uint64_t seed);

    std::vector<Eigen::Index> fold_indices(int fold) const;
    std::vector<Eigen::Index> complement_indices(int fold) const;
};

struct FoldScore {
    double mae = 0.0;
    double r2 = 0.0;
};

struct KFoldResult {
    std::vector<FoldScore> folds;
    double mean_mae = 0.0;
    double mean_r2 = 0.0;
};

/// Trains on each fold's complement and scores MAE / R^2 on the held-out
/// fold. Per-fold seeds are derived from config.seed.
KFoldResult kfold_evaluate(const Dataset& data, const TrainingConfig& config,
                           const FoldPlan& plan);

}  // namespace more
