// analysis.hpp -- post-training attribution: expert assignment tables,
// PCA-based region importance, and exploratory stimulus clustering.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "more/dataset.hpp"
#include "more/model.hpp"
#include "more/numerics.hpp"

namespace more {

enum class AssignMode { gate, responsibility };

struct ExpertAssignmentTable {
    std::vector<std::string> ids;  // sample labels (indices as strings if absent)
    std::vector<int> expert;       // argmax expert per sample, lowest index on ties
    Matrix probabilities;          // N x K, rows sum to 1
    std::vector<std::vector<Eigen::Index>> members;  // sample rows per expert
};

/// Gate mode scores samples by gate probabilities (works without targets);
/// responsibility mode uses posterior responsibilities and requires targets.
ExpertAssignmentTable assign_samples(const MixtureModel& model, const Dataset& data,
                                     AssignMode mode);

enum class RegionAggregation { mean, sum };

/// Words-by-regions activation matrix for one expert: each assigned sample's
/// ground-truth vector aggregated per atlas region. Requires >= 2 assigned
/// samples (downstream PCA needs two rows).
Matrix region_activation_matrix(const ExpertAssignmentTable& assignments, const Dataset& data,
                                const AtlasMap& atlas, int expert,
                                RegionAggregation aggregation = RegionAggregation::mean);

struct RegionImportanceEntry {
    std::string region;
    double score = 0.0;  // max positive importance across retained components
};

struct RegionImportance {
    int expert = 0;
    std::vector<RegionImportanceEntry> regions;  // descending score
    Eigen::Index retained_components = 0;
    double explained_variance = 0.0;
};

/// PCA the words-by-regions matrix down to the variance target, project to
/// component scores S, and rank regions by matrix^T * S. A region qualifies
/// when any component gives it a positive score above the threshold.
RegionImportance region_importance(const Eigen::Ref<const Matrix>& matrix,
                                   const std::vector<std::string>& region_labels,
                                   double variance_target = 0.85,
                                   double score_threshold = 0.2);

struct ClusterResult {
    std::vector<int> assignment;
    std::vector<std::vector<std::string>> members;  // ids per cluster
    double inertia = 0.0;
};

/// k-means wrapper that reports membership by sample id.
ClusterResult cluster_stimuli(const Eigen::Ref<const Matrix>& matrix, int k, Metric metric,
                              std::uint64_t seed, const std::vector<std::string>& ids = {});

}  // namespace more
