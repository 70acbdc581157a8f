// numerics.hpp -- shared numerical kernels: stable log-sum-exp, SPD solves,
// weighted least squares, PCA, and k-means.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "more/errors.hpp"

namespace more {

/// Dense real matrix, row-major so sample rows are contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Throws ArgumentError if any entry of m is NaN or infinite.
template <typename Derived>
void check_finite(const Eigen::DenseBase<Derived>& values, const std::string& what) {
    if (!values.allFinite()) throw ArgumentError(what + ": non-finite value");
}

/// log(sum_i exp(v_i)), shift-invariant. Entries may be -infinity but not all.
double log_sum_exp(std::span<const double> values);
double log_sum_exp(const Vector& values);

/// Cholesky factorization of (A + jitter*I) with an escalation schedule for
/// near-singular systems: a zero jitter escalates to 1e-10*trace(A)/n, then
/// multiplies by 10 up to 1e-3*trace(A)/n before giving up. Reusable across
/// many right-hand sides.
class SpdFactorization {
public:
    explicit SpdFactorization(const Eigen::Ref<const Matrix>& a, double jitter = 0.0);

    Vector solve(const Eigen::Ref<const Vector>& b) const;
    /// Multi-RHS variant (one solve per column).
    Eigen::MatrixXd solve_all(const Eigen::MatrixXd& b) const;

    /// Jitter actually applied after escalation.
    double jitter() const { return jitter_; }
    Eigen::Index dim() const { return llt_.matrixLLT().rows(); }

private:
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double jitter_ = 0.0;
};

/// Solves (A + jitter*I) x = b for symmetric positive-definite A.
Vector solve_spd(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Vector>& b,
                 double jitter = 0.0);

/// Minimizes sum_n h_n (t_n - w.x_n)^2 via the normal equations.
/// Throws EmptyExpertError if the total weight is below 1e-12.
Vector weighted_least_squares(const Eigen::Ref<const Matrix>& x,
                              const Eigen::Ref<const Vector>& t,
                              const Eigen::Ref<const Vector>& h, double jitter = 0.0);

struct PcaResult {
    Matrix components;                // n_components x n_features, orthonormal rows
    Vector explained_variance_ratio;  // retained ratios, non-increasing
    Eigen::Index n_components = 0;
};

/// Centers columns, eigendecomposes the sample covariance, and keeps the
/// smallest leading set of components reaching variance_target. Each
/// component's largest-magnitude entry is made positive so results are
/// reproducible.
PcaResult pca(const Eigen::Ref<const Matrix>& data, double variance_target);

enum class Metric { euclidean, cosine };

struct KMeansResult {
    std::vector<int> assignments;  // size N, values in [0, k)
    Matrix centroids;              // k x d
    double inertia = 0.0;          // final within-cluster SSE
    int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding, deterministic given seed.
/// The cosine metric L2-normalizes rows first and then clusters in
/// Euclidean space.
KMeansResult kmeans(const Eigen::Ref<const Matrix>& data, int k, Metric metric,
                    std::uint64_t seed, int max_iters = 100);

}  // namespace more
