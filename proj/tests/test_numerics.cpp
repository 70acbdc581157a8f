// Numerics primitives: log-sum-exp, SPD solves, weighted least squares,
// PCA, k-means, seed derivation.
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <doctest.h>

#include "helpers.hpp"
#include "more/errors.hpp"
#include "more/numerics.hpp"
#include "more/seeding.hpp"

using namespace more;
using namespace testutil;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("log_sum_exp survives large negative offsets") {
    const double values[] = {-1000.0, -1000.5};
    // log(exp(-1000) + exp(-1000.5)) evaluated with the shift trick.
    CHECK(near(log_sum_exp(std::span<const double>(values)), -999.5259230158199, 1e-12));
}

TEST_CASE("log_sum_exp is shift invariant") {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 30; ++rep) {
        Vector v = normal_vector(rng, 1 + rep % 9, 3.0);
        const double base = log_sum_exp(v);
        const double shift = (rep - 15) * 60.0;
        Vector shifted = v.array() + shift;
        CHECK(near(log_sum_exp(shifted), base + shift, 1e-9));
    }
}

TEST_CASE("log_sum_exp handles -infinity entries") {
    Vector v(3);
    v << 0.0, -kInf, -1.0;
    CHECK(near(log_sum_exp(v), std::log(1.0 + std::exp(-1.0)), 1e-14));

    Vector all_neg_inf = Vector::Constant(2, -kInf);
    CHECK_THROWS_AS(log_sum_exp(all_neg_inf), DomainError);
    CHECK_THROWS_AS(log_sum_exp(Vector()), ArgumentError);
    Vector with_nan(2);
    with_nan << 0.0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(log_sum_exp(with_nan), ArgumentError);
}

TEST_CASE("SpdFactorization solves well-conditioned systems") {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 10; ++rep) {
        const Eigen::Index n = 2 + rep % 5;
        Matrix a = normal_matrix(rng, n + 3, n);
        Matrix gram = a.transpose() * a + Matrix::Identity(n, n);
        Vector b = normal_vector(rng, n);
        SpdFactorization fact(gram);
        CHECK(fact.jitter() == 0.0);
        Vector x = fact.solve(b);
        CHECK(max_abs_diff(Vector(gram * x), b) < 1e-9);

        Matrix rhs = normal_matrix(rng, n, 4);
        Matrix xs = fact.solve_all(rhs);
        // Multi-RHS and single-RHS paths vectorize differently; agreement is
        // to rounding, not bitwise.
        for (Eigen::Index c = 0; c < 4; ++c)
            CHECK(max_abs_diff(Vector(xs.col(c)), fact.solve(rhs.col(c))) < 1e-12);
    }
}

TEST_CASE("SpdFactorization escalates jitter on singular systems") {
    // Rank-1 gram matrix: plain Cholesky fails, jitter must kick in.
    Matrix a(3, 3);
    a << 1, 1, 1, 1, 1, 1, 1, 1, 1;
    SpdFactorization fact(a);
    CHECK(fact.jitter() > 0.0);
    Vector b(3);
    b << 3, 3, 3;
    Vector x = fact.solve(b);
    CHECK(max_abs_diff(Vector(a * x), b) < 1e-3);
}

TEST_CASE("solve_spd rejects non-square and non-finite input") {
    CHECK_THROWS_AS(solve_spd(Matrix::Ones(2, 3), Vector::Ones(2)), ArgumentError);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(solve_spd(bad, Vector::Ones(2)), ArgumentError);
}

TEST_CASE("weighted_least_squares with equal weights equals OLS") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        const Eigen::Index n = 1 + rep % 4, rows = 20;
        Matrix x = normal_matrix(rng, rows, n);
        Vector t = normal_vector(rng, rows);
        Vector w_ols = weighted_least_squares(x, t, Vector::Ones(rows));
        // Scale invariance: any constant weight gives the same minimizer.
        Vector w_scaled = weighted_least_squares(x, t, Vector::Constant(rows, 0.37));
        CHECK(max_abs_diff(w_ols, w_scaled) < 1e-9);
        // Normal equations residual orthogonality.
        Vector resid = t - x * w_ols;
        CHECK((x.transpose() * resid).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("weighted_least_squares honors the weights") {
    // Two contradictory points; all the weight on the second one.
    Matrix x(2, 1);
    x << 1.0, 1.0;
    Vector t(2);
    t << 0.0, 10.0;
    Vector h(2);
    h << 1e-9, 1.0;
    Vector w = weighted_least_squares(x, t, h);
    CHECK(near(w(0), 10.0, 1e-6));
}

TEST_CASE("weighted_least_squares rejects vanishing total weight") {
    Matrix x = Matrix::Ones(3, 2);
    Vector t = Vector::Ones(3);
    CHECK_THROWS_AS(weighted_least_squares(x, t, Vector::Zero(3)), EmptyExpertError);
}

TEST_CASE("pca returns orthonormal components with ordered ratios") {
    std::mt19937_64 rng(4);
    Matrix data = normal_matrix(rng, 40, 6);
    data.col(0) *= 5.0;  // dominant direction
    PcaResult p = pca(data, 0.99);
    REQUIRE(p.n_components >= 1);
    Matrix gram = p.components * p.components.transpose();
    CHECK(max_abs_diff(gram, Matrix::Identity(p.n_components, p.n_components)) < 1e-10);
    for (Eigen::Index i = 1; i < p.n_components; ++i)
        CHECK(p.explained_variance_ratio(i) <= p.explained_variance_ratio(i - 1) + 1e-12);
    CHECK(p.explained_variance_ratio.sum() <= 1.0 + 1e-12);
    CHECK(p.explained_variance_ratio.sum() >= 0.99 - 1e-9);
}

TEST_CASE("pca sign convention pins the largest entry positive") {
    std::mt19937_64 rng(5);
    Matrix data = normal_matrix(rng, 25, 4);
    PcaResult p = pca(data, 1.0);
    for (Eigen::Index i = 0; i < p.n_components; ++i) {
        Eigen::Index arg = 0;
        p.components.row(i).cwiseAbs().maxCoeff(&arg);
        CHECK(p.components(i, arg) > 0.0);
    }
}

TEST_CASE("pca on rank-1 data keeps a single component") {
    std::mt19937_64 rng(6);
    Vector dir = normal_vector(rng, 5).normalized();
    Vector coef = normal_vector(rng, 12, 3.0);
    Matrix data = coef * dir.transpose();
    PcaResult p = pca(data, 1.0);
    CHECK(p.n_components == 1);
    CHECK(near(p.explained_variance_ratio(0), 1.0, 1e-9));
    // Component spans the planted direction (up to the fixed sign).
    CHECK(near(std::abs(p.components.row(0).dot(dir)), 1.0, 1e-9));
}

TEST_CASE("pca reconstructs centered data at full variance") {
    std::mt19937_64 rng(7);
    Matrix data = normal_matrix(rng, 15, 3);
    PcaResult p = pca(data, 1.0);
    Matrix centered = data.rowwise() - data.colwise().mean();
    Matrix scores = centered * p.components.transpose();
    CHECK(max_abs_diff(Matrix(scores * p.components), centered) < 1e-9);
}

TEST_CASE("pca rejects degenerate input") {
    CHECK_THROWS_AS(pca(Matrix::Ones(1, 3), 0.9), ArgumentError);
    CHECK_THROWS_AS(pca(Matrix::Ones(4, 3), 0.9), DataError);  // zero variance
    CHECK_THROWS_AS(pca(Matrix::Random(4, 3), 0.0), ArgumentError);
    CHECK_THROWS_AS(pca(Matrix::Random(4, 3), 1.5), ArgumentError);
}

TEST_CASE("kmeans recovers well-separated blobs") {
    std::mt19937_64 rng(8);
    const int per = 20;
    Matrix data(3 * per, 2);
    Matrix centers(3, 2);
    centers << 0, 0, 10, 0, 0, 10;
    for (int b = 0; b < 3; ++b)
        for (int i = 0; i < per; ++i)
            data.row(b * per + i) = centers.row(b) + 0.2 * normal_vector(rng, 2).transpose();

    KMeansResult result = kmeans(data, 3, Metric::euclidean, 17);
    // Every blob maps to exactly one cluster.
    std::set<int> used;
    for (int b = 0; b < 3; ++b) {
        const int label = result.assignments[static_cast<std::size_t>(b * per)];
        used.insert(label);
        for (int i = 1; i < per; ++i)
            CHECK(result.assignments[static_cast<std::size_t>(b * per + i)] == label);
    }
    CHECK(used.size() == 3);
    CHECK(result.inertia < 3 * per * 0.2 * 0.2 * 2 * 4);
}

TEST_CASE("kmeans is deterministic and validates arguments") {
    std::mt19937_64 rng(9);
    Matrix data = normal_matrix(rng, 30, 3);
    KMeansResult a = kmeans(data, 4, Metric::euclidean, 5);
    KMeansResult b = kmeans(data, 4, Metric::euclidean, 5);
    CHECK(a.assignments == b.assignments);
    CHECK(a.inertia == b.inertia);
    CHECK_THROWS_AS(kmeans(data, 0, Metric::euclidean, 1), ArgumentError);
    CHECK_THROWS_AS(kmeans(data, 31, Metric::euclidean, 1), ArgumentError);
}

TEST_CASE("kmeans k=1 centroid is the mean") {
    std::mt19937_64 rng(10);
    Matrix data = normal_matrix(rng, 12, 3);
    KMeansResult result = kmeans(data, 1, Metric::euclidean, 0);
    CHECK(max_abs_diff(Matrix(result.centroids), Matrix(data.colwise().mean())) < 1e-12);
}

TEST_CASE("kmeans cosine equals euclidean on pre-normalized rows") {
    std::mt19937_64 rng(11);
    Matrix data = normal_matrix(rng, 25, 4);
    Matrix normalized = data;
    for (Eigen::Index i = 0; i < data.rows(); ++i) normalized.row(i) /= data.row(i).norm();
    KMeansResult via_cosine = kmeans(data, 3, Metric::cosine, 21);
    KMeansResult via_euclid = kmeans(normalized, 3, Metric::euclidean, 21);
    CHECK(via_cosine.assignments == via_euclid.assignments);
    CHECK(near(via_cosine.inertia, via_euclid.inertia, 1e-12));

    Matrix with_zero = data;
    with_zero.row(3).setZero();
    CHECK_THROWS_AS(kmeans(with_zero, 3, Metric::cosine, 21), DataError);
}

TEST_CASE("derive_seed separates streams") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t base = 0; base < 8; ++base)
        for (std::uint64_t a = 0; a < 8; ++a)
            for (std::uint64_t b = 0; b < 4; ++b) seen.insert(derive_seed(base, a, b));
    CHECK(seen.size() == 8 * 8 * 4);
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
}

TEST_CASE("check_finite flags bad entries") {
    Matrix good = Matrix::Ones(2, 2);
    CHECK_NOTHROW(check_finite(good, "t"));
    good(1, 1) = kInf;
    CHECK_THROWS_AS(check_finite(good, "t"), ArgumentError);
}
