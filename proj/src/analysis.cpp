// analysis.cpp
#include "more/analysis.hpp"

#include <algorithm>
#include <string>

#include "more/errors.hpp"

namespace more {

ExpertAssignmentTable assign_samples(const MixtureModel& model, const Dataset& data,
                                     AssignMode mode) {
    data.validate();
    if (data.input_dim() != model.input_dim())
        throw ArgumentError("assign_samples: input dimension does not match model");
    if (mode == AssignMode::responsibility) {
        if (!data.has_targets())
            throw ArgumentError("assign_samples: responsibility mode requires targets");
        if (data.output_dim() != model.output_dim())
            throw ArgumentError("assign_samples: output dimension does not match model");
    }

    const auto num = data.size();
    const int k = model.k();
    ExpertAssignmentTable table;
    table.probabilities.resize(num, k);
    table.expert.resize(static_cast<std::size_t>(num));
    table.members.resize(static_cast<std::size_t>(k));
    table.ids.reserve(static_cast<std::size_t>(num));

    for (Eigen::Index i = 0; i < num; ++i) {
        Vector probs = (mode == AssignMode::gate)
                           ? model.gate_probabilities(data.x.row(i).transpose())
                           : model.responsibilities(data.x.row(i).transpose(),
                                                    data.y.row(i).transpose());
        table.probabilities.row(i) = probs.transpose();
        int best = 0;
        for (int j = 1; j < k; ++j)
            if (probs(j) > probs(best)) best = j;
        table.expert[static_cast<std::size_t>(i)] = best;
        table.members[static_cast<std::size_t>(best)].push_back(i);
        table.ids.push_back(i < static_cast<Eigen::Index>(data.ids.size())
                                ? data.ids[static_cast<std::size_t>(i)]
                                : std::to_string(i));
    }
    return table;
}

Matrix region_activation_matrix(const ExpertAssignmentTable& assignments, const Dataset& data,
                                const AtlasMap& atlas, int expert,
                                RegionAggregation aggregation) {
    atlas.validate();
    if (!data.has_targets())
        throw ArgumentError("region_activation_matrix: dataset has no targets");
    if (atlas.n_dims() != data.output_dim())
        throw ArgumentError("region_activation_matrix: atlas does not match output dimension");
    if (expert < 0 || static_cast<std::size_t>(expert) >= assignments.members.size())
        throw ArgumentError("region_activation_matrix: expert index out of range");

    const auto& rows = assignments.members[static_cast<std::size_t>(expert)];
    if (rows.size() < 2)
        throw DataError("region_activation_matrix: expert " + std::to_string(expert) +
                        " has fewer than 2 assigned samples");

    const auto n_regions = static_cast<Eigen::Index>(atlas.n_regions());
    const auto sizes = atlas.region_sizes();
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), n_regions);
    for (std::size_t w = 0; w < rows.size(); ++w) {
        const Eigen::Index sample = rows[w];
        for (Eigen::Index d = 0; d < atlas.n_dims(); ++d) {
            out(static_cast<Eigen::Index>(w), atlas.dim_to_region[static_cast<std::size_t>(d)]) +=
                data.y(sample, d);
        }
    }
    if (aggregation == RegionAggregation::mean) {
        for (Eigen::Index r = 0; r < n_regions; ++r) {
            if (sizes[static_cast<std::size_t>(r)] > 0)
                out.col(r) /= static_cast<double>(sizes[static_cast<std::size_t>(r)]);
        }
    }
    return out;
}

RegionImportance region_importance(const Eigen::Ref<const Matrix>& matrix,
                                   const std::vector<std::string>& region_labels,
                                   double variance_target, double score_threshold) {
    if (matrix.rows() < 2)
        throw ArgumentError("region_importance: need at least 2 word rows");
    if (matrix.cols() < 1) throw ArgumentError("region_importance: need at least 1 region");
    if (static_cast<Eigen::Index>(region_labels.size()) != matrix.cols())
        throw ArgumentError("region_importance: label count does not match region count");

    PcaResult p = pca(matrix, variance_target);
    Matrix centered = matrix;
    Eigen::RowVectorXd mean = matrix.colwise().mean();
    centered.rowwise() -= mean;
    Matrix scores = centered * p.components.transpose();       // words x components
    Matrix importance = matrix.transpose() * scores;           // regions x components

    RegionImportance result;
    result.retained_components = p.n_components;
    result.explained_variance = p.explained_variance_ratio.sum();
    for (Eigen::Index r = 0; r < importance.rows(); ++r) {
        double best = 0.0;
        bool qualified = false;
        for (Eigen::Index c = 0; c < importance.cols(); ++c) {
            const double s = importance(r, c);
            if (s > 0.0 && s > score_threshold && (!qualified || s > best)) {
                qualified = true;
                best = s;
            }
        }
        if (qualified)
            result.regions.push_back({region_labels[static_cast<std::size_t>(r)], best});
    }
    std::stable_sort(result.regions.begin(), result.regions.end(),
                     [](const auto& a, const auto& b) { return a.score > b.score; });
    return result;
}

ClusterResult cluster_stimuli(const Eigen::Ref<const Matrix>& matrix, int k, Metric metric,
                              std::uint64_t seed, const std::vector<std::string>& ids) {
    if (!ids.empty() && static_cast<Eigen::Index>(ids.size()) != matrix.rows())
        throw ArgumentError("cluster_stimuli: id count does not match row count");
    KMeansResult km = kmeans(matrix, k, metric, seed);

    ClusterResult out;
    out.assignment = km.assignments;
    out.inertia = km.inertia;
    out.members.resize(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        const auto cluster = static_cast<std::size_t>(km.assignments[static_cast<std::size_t>(i)]);
        out.members[cluster].push_back(ids.empty() ? std::to_string(i)
                                                   : ids[static_cast<std::size_t>(i)]);
    }
    return out;
}

}  // namespace more
