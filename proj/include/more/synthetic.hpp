// synthetic.hpp -- seeded mixture-data generator used as the verification
// oracle: known experts, known gates, known labels.
#pragma once

#include <cstdint>
#include <vector>

#include "more/dataset.hpp"
#include "more/model.hpp"

namespace more {

struct SyntheticSpec {
    int k = 3;
    Eigen::Index n = 4;
    Eigen::Index m = 3;
    Eigen::Index n_samples = 2000;
    double gating_scale = 3.0;  // scales the true gating vectors; 0 = uniform gates
    double noise_std = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SyntheticData {
    Dataset data;
    MixtureModel truth;      // the generating model (variances floored)
    std::vector<int> labels;  // true expert per sample
};

/// Draws true gating vectors (entries ~ gating_scale * N(0,1)) and expert
/// weights (entries ~ N(0,1)), then per sample: x ~ N(0, I), expert label
/// from the softmax gates at x, y = W x + noise_std * N(0, I). The true
/// parameters depend only on (seed, k, n, m), not on n_samples.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace more
