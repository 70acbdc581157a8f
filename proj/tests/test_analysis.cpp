// Post-training analysis: expert assignment, region aggregation, PCA-based
// region importance, stimulus clustering.
#include <random>
#include <set>
#include <vector>

#include <doctest.h>

#include "helpers.hpp"
#include "more/analysis.hpp"
#include "more/errors.hpp"
#include "more/trainer.hpp"

using namespace more;
using namespace testutil;

namespace {

AtlasMap toy_atlas() {
    AtlasMap atlas;
    atlas.region_labels = {"a", "b"};
    atlas.dim_to_region = {0, 1, 0};  // dims 0 and 2 belong to region a
    return atlas;
}

}  // namespace

TEST_CASE("assign_samples picks the argmax expert under both modes") {
    std::mt19937_64 rng(60);
    MixtureModel model = random_model(rng, 3, 3, 2);
    Dataset data = random_dataset(rng, 30, 3, 2);

    for (AssignMode mode : {AssignMode::gate, AssignMode::responsibility}) {
        ExpertAssignmentTable table = assign_samples(model, data, mode);
        REQUIRE(table.expert.size() == 30);
        REQUIRE(table.probabilities.rows() == 30);
        REQUIRE(table.members.size() == 3);
        CHECK(table.ids[0] == "0");
        CHECK(table.ids[29] == "29");

        std::size_t member_total = 0;
        for (const auto& members : table.members) member_total += members.size();
        CHECK(member_total == 30);

        for (Eigen::Index i = 0; i < 30; ++i) {
            CHECK(near(table.probabilities.row(i).sum(), 1.0, 1e-12));
            Vector expected =
                mode == AssignMode::gate
                    ? model.gate_probabilities(data.x.row(i).transpose())
                    : model.responsibilities(data.x.row(i).transpose(),
                                             data.y.row(i).transpose());
            CHECK(max_abs_diff(Vector(table.probabilities.row(i).transpose()), expected) <
                  1e-12);
            Eigen::Index arg = 0;
            expected.maxCoeff(&arg);
            CHECK(table.expert[static_cast<std::size_t>(i)] == static_cast<int>(arg));
        }
    }

    Dataset no_targets;
    no_targets.x = data.x;
    CHECK_NOTHROW(assign_samples(model, no_targets, AssignMode::gate));
    CHECK_THROWS_AS(assign_samples(model, no_targets, AssignMode::responsibility),
                    ArgumentError);
}

TEST_CASE("assign_samples keeps provided ids and breaks ties low") {
    std::mt19937_64 rng(61);
    // Identical experts and zero gating: every probability row is uniform.
    Expert e;
    e.weights = normal_matrix(rng, 2, 2);
    e.variances = Vector::Ones(2);
    MixtureModel model({e, e}, GatingNetwork{Matrix::Zero(2, 2)});
    Dataset data = random_dataset(rng, 4, 2, 2);
    data.ids = {"w1", "w2", "w3", "w4"};
    ExpertAssignmentTable table = assign_samples(model, data, AssignMode::gate);
    CHECK(table.ids == data.ids);
    for (int label : table.expert) CHECK(label == 0);
    CHECK(table.members[0].size() == 4);
    CHECK(table.members[1].empty());
}

TEST_CASE("region_activation_matrix aggregates ground truth per region") {
    std::mt19937_64 rng(62);
    MixtureModel model = random_model(rng, 2, 2, 3);
    Dataset data;
    data.x = normal_matrix(rng, 3, 2);
    data.y = Matrix(3, 3);
    data.y << 1.0, 2.0, 3.0,  //
        4.0, 5.0, 6.0,        //
        7.0, 8.0, 9.0;

    ExpertAssignmentTable table = assign_samples(model, data, AssignMode::gate);
    // Force a known assignment: samples 0 and 2 on expert 0.
    table.expert = {0, 1, 0};
    table.members = {{0, 2}, {1}};

    Matrix mean_agg = region_activation_matrix(table, data, toy_atlas(), 0,
                                               RegionAggregation::mean);
    REQUIRE(mean_agg.rows() == 2);
    REQUIRE(mean_agg.cols() == 2);
    CHECK(near(mean_agg(0, 0), (1.0 + 3.0) / 2.0, 1e-15));  // sample 0, region a
    CHECK(near(mean_agg(0, 1), 2.0, 1e-15));                // sample 0, region b
    CHECK(near(mean_agg(1, 0), (7.0 + 9.0) / 2.0, 1e-15));  // sample 2, region a
    CHECK(near(mean_agg(1, 1), 8.0, 1e-15));

    Matrix sum_agg = region_activation_matrix(table, data, toy_atlas(), 0,
                                              RegionAggregation::sum);
    CHECK(near(sum_agg(0, 0), 4.0, 1e-15));
    CHECK(near(sum_agg(1, 1), 8.0, 1e-15));

    // Expert 1 holds a single sample: not enough rows for PCA downstream.
    CHECK_THROWS_AS(
        region_activation_matrix(table, data, toy_atlas(), 1, RegionAggregation::mean),
        DataError);
    CHECK_THROWS_AS(
        region_activation_matrix(table, data, toy_atlas(), 5, RegionAggregation::mean),
        ArgumentError);
}

TEST_CASE("region_importance ranks a planted dominant region first") {
    std::mt19937_64 rng(63);
    const Eigen::Index words = 10, regions = 5;
    Matrix m(words, regions);
    for (Eigen::Index i = 0; i < words; ++i)
        for (Eigen::Index j = 0; j < regions; ++j)
            m(i, j) = 0.4 + 0.05 * normal_vector(rng, 1)(0);
    for (Eigen::Index i = 0; i < words; ++i)
        m(i, 2) = (i % 2 == 0 ? 6.0 : -5.0) + normal_vector(rng, 1)(0);

    std::vector<std::string> labels{"r0", "r1", "planted", "r3", "r4"};
    RegionImportance result = region_importance(m, labels, 0.85, 0.2);
    REQUIRE_FALSE(result.regions.empty());
    CHECK(result.regions[0].region == "planted");
    CHECK(result.regions[0].score > 0.2);
    CHECK(result.retained_components >= 1);
    CHECK(result.explained_variance >= 0.85 - 1e-9);
    for (std::size_t i = 1; i < result.regions.size(); ++i)
        CHECK(result.regions[i].score <= result.regions[i - 1].score);
}

TEST_CASE("region_importance applies the positive-score threshold") {
    // One strong axis along region 0; region 1 anti-correlates, so its only
    // importance entry is negative and it must not qualify.
    Matrix m(4, 2);
    m << 5.0, -5.0,  //
        -5.0, 5.0,   //
        4.0, -4.0,   //
        -4.0, 4.0;
    std::vector<std::string> labels{"pos", "neg"};
    RegionImportance result = region_importance(m, labels, 0.85, 0.2);
    REQUIRE(result.regions.size() == 1);
    CHECK(result.regions[0].region == "pos");

    CHECK_THROWS_AS(region_importance(m, {"one"}, 0.85, 0.2), ArgumentError);
    CHECK_THROWS_AS(region_importance(Matrix::Ones(1, 2), labels, 0.85, 0.2),
                    ArgumentError);
}

TEST_CASE("cluster_stimuli groups rows and carries ids") {
    std::mt19937_64 rng(64);
    Matrix centers(3, 2);
    centers << 0, 0, 8, 0, 0, 8;
    Matrix data(9, 2);
    std::vector<std::string> ids;
    for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 3; ++i) {
            data.row(b * 3 + i) = centers.row(b) + 0.1 * normal_vector(rng, 2).transpose();
            ids.push_back("s" + std::to_string(b * 3 + i));
        }

    ClusterResult result = cluster_stimuli(data, 3, Metric::euclidean, 7, ids);
    REQUIRE(result.assignment.size() == 9);
    REQUIRE(result.members.size() == 3);
    std::size_t total = 0;
    for (const auto& members : result.members) {
        CHECK(members.size() == 3);
        total += members.size();
    }
    CHECK(total == 9);
    // Members carry the supplied ids and match the assignment vector.
    for (std::size_t i = 0; i < 9; ++i) {
        const auto& bucket =
            result.members[static_cast<std::size_t>(result.assignment[i])];
        CHECK(std::find(bucket.begin(), bucket.end(), ids[i]) != bucket.end());
    }
    CHECK(result.inertia >= 0.0);

    // Index-string ids when none are supplied.
    ClusterResult unnamed = cluster_stimuli(data, 3, Metric::euclidean, 7);
    bool found = false;
    for (const auto& members : unnamed.members)
        for (const auto& id : members) found = found || id == "0";
    CHECK(found);

    CHECK_THROWS_AS(cluster_stimuli(data, 3, Metric::euclidean, 7, {"too", "few"}),
                    ArgumentError);
}
