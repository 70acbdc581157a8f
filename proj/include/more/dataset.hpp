// dataset.hpp -- paired input/target matrices and the output-dimension atlas.
#pragma once

#include <string>
#include <vector>

#include "more/numerics.hpp"

namespace more {

/// Paired stimulus embeddings (N x n) and target activations (N x m).
/// y may be empty (0 x 0) for prediction-only inputs. ids, when present,
/// label the rows.
struct Dataset {
    Matrix x;
    Matrix y;
    std::vector<std::string> ids;

    Eigen::Index size() const { return x.rows(); }
    Eigen::Index input_dim() const { return x.cols(); }
    Eigen::Index output_dim() const { return y.cols(); }
    bool has_targets() const { return y.size() > 0; }

    /// Validates row counts, id count, and finiteness.
    void validate() const;
};

/// Copies the given rows (in the given order) into a new Dataset, carrying
/// targets and ids along when present.
Dataset select_rows(const Dataset& data, const std::vector<Eigen::Index>& rows);

/// Maps every output dimension to exactly one labeled region.
struct AtlasMap {
    std::vector<std::string> region_labels;
    std::vector<int> dim_to_region;  // size m, values index region_labels

    std::size_t n_regions() const { return region_labels.size(); }
    Eigen::Index n_dims() const { return static_cast<Eigen::Index>(dim_to_region.size()); }

    /// Number of output dimensions mapped to each region.
    std::vector<Eigen::Index> region_sizes() const;

    void validate() const;
};

}  // namespace more
