#include "more/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace more {

double log_sum_exp(std::span<const double> values) {
    if (values.empty())
        throw ArgumentError("log_sum_exp: empty input");
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
            throw ArgumentError("log_sum_exp: entries must be finite or -infinity");
        mx = std::max(mx, v);
    }
    if (mx == -std::numeric_limits<double>::infinity())
        throw DomainError("log_sum_exp: all entries are -infinity");
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - mx);
    return mx + std::log(sum);
}

double log_sum_exp(const Vector& values) {
    return log_sum_exp(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

SpdFactorization::SpdFactorization(const Eigen::Ref<const Matrix>& a, double jitter) {
    const Eigen::Index n = a.rows();
    if (n == 0 || a.cols() != n)
        throw ArgumentError("SpdFactorization: matrix must be square and non-empty");
    check_finite(a, "SpdFactorization");
    if (jitter < 0.0)
        throw ArgumentError("SpdFactorization: jitter must be non-negative");

    const Eigen::MatrixXd base = a;  // column-major working copy
    const double scale = base.trace() / static_cast<double>(n);
    const double cap = 1e-3 * scale;

    double j = jitter;
    while (true) {
        Eigen::MatrixXd m = base;
        m.diagonal().array() += j;
        llt_.compute(m);
        if (llt_.info() == Eigen::Success) {
            jitter_ = j;
            return;
        }
        double next = (j == 0.0) ? 1e-10 * scale : j * 10.0;
        if (next <= j || next > cap)
            throw SingularSystemError("SpdFactorization: matrix not positive definite after jitter escalation");
        j = next;
    }
}

Vector SpdFactorization::solve(const Eigen::Ref<const Vector>& b) const {
    if (b.size() != dim())
        throw ArgumentError("SpdFactorization::solve: dimension mismatch");
    return llt_.solve(b);
}

Eigen::MatrixXd SpdFactorization::solve_all(const Eigen::MatrixXd& b) const {
    if (b.rows() != dim())
        throw ArgumentError("SpdFactorization::solve: dimension mismatch");
    return llt_.solve(b);
}

Vector solve_spd(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Vector>& b,
                 double jitter) {
    if (a.rows() != b.size())
        throw ArgumentError("solve_spd: dimension mismatch");
    return SpdFactorization(a, jitter).solve(b);
}

Vector weighted_least_squares(const Eigen::Ref<const Matrix>& x,
                              const Eigen::Ref<const Vector>& t,
                              const Eigen::Ref<const Vector>& h, double jitter) {
    const Eigen::Index n_samples = x.rows();
    if (t.size() != n_samples || h.size() != n_samples)
        throw ArgumentError("weighted_least_squares: row-count mismatch");
    if ((h.array() < 0.0).any())
        throw ArgumentError("weighted_least_squares: negative weight");
    if (h.sum() <= 1e-12)
        throw EmptyExpertError("weighted_least_squares: total weight below 1e-12");

    const Matrix xw = x.array().colwise() * h.array();
    const Matrix gram = x.transpose() * xw;           // sum_n h_n x_n x_n^T
    const Vector rhs = xw.transpose() * t;            // sum_n h_n t_n x_n
    return SpdFactorization(gram, jitter).solve(rhs);
}

PcaResult pca(const Eigen::Ref<const Matrix>& data, double variance_target) {
    const Eigen::Index n = data.rows(), d = data.cols();
    if (n < 2 || d < 1)
        throw ArgumentError("pca: need at least 2 rows and 1 column");
    if (!(variance_target > 0.0) || variance_target > 1.0)
        throw ArgumentError("pca: variance_target must be in (0, 1]");
    check_finite(data, "pca");

    const Eigen::RowVectorXd mean = data.colwise().mean();
    const Matrix centered = data.rowwise() - mean;
    const Eigen::MatrixXd cov =
        (centered.transpose() * centered).eval().cast<double>() / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success)
        throw Error("pca: eigendecomposition failed");

    // Eigenvalues come back ascending; flip and clamp round-off negatives.
    Vector values = eig.eigenvalues().reverse();
    values = values.cwiseMax(0.0);
    const double total = values.sum();
    const double scale = std::max(1.0, data.cwiseAbs().maxCoeff());
    if (total <= 1e-20 * scale * scale)
        throw DataError("pca: zero total variance");

    const Vector ratio = values / total;
    Eigen::Index keep = 0;
    double cum = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        cum += ratio(i);
        ++keep;
        if (cum >= variance_target - 1e-12) break;
    }

    PcaResult result;
    result.n_components = keep;
    result.explained_variance_ratio = ratio.head(keep);
    result.components.resize(keep, d);
    for (Eigen::Index i = 0; i < keep; ++i) {
        Vector comp = eig.eigenvectors().col(d - 1 - i);
        // Sign convention: the largest-magnitude entry is positive.
        Eigen::Index arg = 0;
        comp.cwiseAbs().maxCoeff(&arg);
        if (comp(arg) < 0.0) comp = -comp;
        result.components.row(i) = comp.transpose();
    }
    return result;
}

namespace {

// Squared Euclidean distance between row r of data and row c of centroids.
inline double sq_dist(const Eigen::Ref<const Matrix>& data, Eigen::Index r,
                      const Matrix& centroids, Eigen::Index c) {
    return (data.row(r) - centroids.row(c)).squaredNorm();
}

Matrix kmeanspp_seed(const Eigen::Ref<const Matrix>& data, int k, std::mt19937_64& rng) {
    const Eigen::Index n = data.rows(), d = data.cols();
    Matrix centroids(k, d);
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    centroids.row(0) = data.row(first(rng));

    Vector dist2(n);
    for (Eigen::Index i = 0; i < n; ++i) dist2(i) = sq_dist(data, i, centroids, 0);

    for (int c = 1; c < k; ++c) {
        const double total = dist2.sum();
        Eigen::Index chosen;
        if (total <= 0.0) {
            // All points coincide with existing centroids; pick uniformly.
            chosen = first(rng);
        } else {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng), acc = 0.0;
            chosen = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += dist2(i);
                if (acc >= target) {
                    chosen = i;
                    break;
                }
            }
        }
        centroids.row(c) = data.row(chosen);
        for (Eigen::Index i = 0; i < n; ++i)
            dist2(i) = std::min(dist2(i), sq_dist(data, i, centroids, c));
    }
    return centroids;
}

}  // namespace

KMeansResult kmeans(const Eigen::Ref<const Matrix>& data, int k, Metric metric,
                    std::uint64_t seed, int max_iters) {
    const Eigen::Index n = data.rows();
    if (k < 1 || k > n)
        throw ArgumentError("kmeans: k must be in [1, N]");
    if (max_iters < 1)
        throw ArgumentError("kmeans: max_iters must be >= 1");
    check_finite(data, "kmeans");

    Matrix points = data;
    if (metric == Metric::cosine) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double norm = points.row(i).norm();
            if (norm == 0.0)
                throw DataError("kmeans: zero-norm row " + std::to_string(i) + " under cosine metric");
            points.row(i) /= norm;
        }
    }

    std::mt19937_64 rng(seed);
    Matrix centroids = kmeanspp_seed(points, k, rng);

    KMeansResult result;
    result.assignments.assign(static_cast<std::size_t>(n), 0);

    for (int iter = 0; iter < max_iters; ++iter) {
        // Assignment step; ties break to the lowest centroid index.
        bool changed = false;
        double sse = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(points, i, centroids, 0);
            for (int c = 1; c < k; ++c) {
                const double d2 = sq_dist(points, i, centroids, c);
                if (d2 < best_d) {
                    best_d = d2;
                    best = c;
                }
            }
            if (result.assignments[static_cast<std::size_t>(i)] != best) {
                result.assignments[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
            sse += best_d;
        }
        result.inertia = sse;
        result.iterations = iter + 1;
        if (iter > 0 && !changed) break;

        // Update step.
        Matrix sums = Matrix::Zero(k, points.cols());
        std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = result.assignments[static_cast<std::size_t>(i)];
            sums.row(c) += points.row(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            } else {
                // Re-seed an empty cluster at the point with the largest
                // current cost; strictly reduces SSE on the next pass.
                Eigen::Index worst = 0;
                double worst_d = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double d2 =
                        sq_dist(points, i, centroids, result.assignments[static_cast<std::size_t>(i)]);
                    if (d2 > worst_d) {
                        worst_d = d2;
                        worst = i;
                    }
                }
                centroids.row(c) = points.row(worst);
            }
        }
    }
    result.centroids = std::move(centroids);
    return result;
}

}  // namespace more
