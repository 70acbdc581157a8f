// synthetic.cpp
#include "more/synthetic.hpp"

#include <cmath>
#include <random>
#include <utility>

#include "more/errors.hpp"
#include "more/seeding.hpp"

namespace more {

void SyntheticSpec::validate() const {
    if (k < 1) throw ArgumentError("SyntheticSpec: k must be at least 1");
    if (n < 1 || m < 1) throw ArgumentError("SyntheticSpec: dimensions must be positive");
    if (n_samples < 1) throw ArgumentError("SyntheticSpec: n_samples must be positive");
    if (!(noise_std >= 0.0)) throw ArgumentError("SyntheticSpec: noise_std must be >= 0");
    if (!std::isfinite(gating_scale))
        throw ArgumentError("SyntheticSpec: gating_scale must be finite");
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();

    // Separate parameter and sample streams: the true model is a function of
    // (seed, k, n, m) alone.
    std::mt19937_64 param_rng(derive_seed(spec.seed, 1));
    std::mt19937_64 sample_rng(derive_seed(spec.seed, 2));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double variance = std::max(spec.noise_std * spec.noise_std, kDefaultVarianceFloor);
    std::vector<Expert> experts;
    experts.reserve(static_cast<std::size_t>(spec.k));
    GatingNetwork gating;
    gating.params.resize(spec.k, spec.n);
    for (int j = 0; j < spec.k; ++j) {
        for (Eigen::Index c = 0; c < spec.n; ++c)
            gating.params(j, c) = spec.gating_scale * normal(param_rng);
        Expert e;
        e.weights.resize(spec.m, spec.n);
        for (Eigen::Index r = 0; r < spec.m; ++r)
            for (Eigen::Index c = 0; c < spec.n; ++c) e.weights(r, c) = normal(param_rng);
        e.variances = Vector::Constant(spec.m, variance);
        experts.push_back(std::move(e));
    }
    MixtureModel truth(std::move(experts), std::move(gating), kDefaultVarianceFloor);

    Dataset data;
    data.x.resize(spec.n_samples, spec.n);
    data.y.resize(spec.n_samples, spec.m);
    std::vector<int> labels(static_cast<std::size_t>(spec.n_samples), 0);

    for (Eigen::Index i = 0; i < spec.n_samples; ++i) {
        Vector x(spec.n);
        for (Eigen::Index c = 0; c < spec.n; ++c) x(c) = normal(sample_rng);
        data.x.row(i) = x.transpose();

        Vector gates = truth.gate_probabilities(x);
        const double u = unit(sample_rng);
        double cum = 0.0;
        int label = spec.k - 1;
        for (int j = 0; j < spec.k; ++j) {
            cum += gates(j);
            if (u < cum) {
                label = j;
                break;
            }
        }
        labels[static_cast<std::size_t>(i)] = label;

        Vector y = truth.experts()[static_cast<std::size_t>(label)].weights * x;
        for (Eigen::Index r = 0; r < spec.m; ++r) y(r) += spec.noise_std * normal(sample_rng);
        data.y.row(i) = y.transpose();
    }

    return SyntheticData{std::move(data), std::move(truth), std::move(labels)};
}

}  // namespace more
