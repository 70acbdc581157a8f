// selection.cpp
#include "more/selection.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "more/errors.hpp"
#include "more/format.hpp"
#include "more/metrics.hpp"
#include "more/seeding.hpp"

namespace more {

namespace {

std::string sanitize_csv_field(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
    }
    return s;
}

}  // namespace

std::uint64_t n_params(std::uint64_t k, std::uint64_t n, std::uint64_t m) {
    if (k == 0 || n == 0 || m == 0) throw ArgumentError("n_params: k, n, m must be positive");
    std::uint64_t mn = 0, sum = 0, d = 0;
    if (__builtin_mul_overflow(m, n, &mn) || __builtin_add_overflow(mn, m, &sum) ||
        __builtin_add_overflow(sum, n, &sum) || __builtin_mul_overflow(k, sum, &d))
        throw DomainError("n_params: parameter count overflows 64 bits");
    return d;
}

double bic(std::uint64_t d, std::uint64_t n_samples, double log_likelihood) {
    if (n_samples < 1) throw ArgumentError("bic: n_samples must be >= 1");
    return static_cast<double>(d) * std::log(static_cast<double>(n_samples)) -
           2.0 * log_likelihood;
}

BicReport select_k(const Dataset& data, int k_min, int k_max,
                   const TrainingConfig& base_config, int restarts) {
    data.validate();
    if (!data.has_targets()) throw ArgumentError("select_k: dataset has no targets");
    if (k_min < 1 || k_max < k_min)
        throw ArgumentError("select_k: need 1 <= k_min <= k_max");
    if (restarts < 1) throw ArgumentError("select_k: restarts must be >= 1");
    // k values beyond the sample count are not rejected here: each one fails
    // during initialization and is recorded as a failed entry.

    BicReport report;
    for (int k = k_min; k <= k_max; ++k) {
        BicEntry entry;
        entry.k = k;
        entry.d = n_params(static_cast<std::uint64_t>(k),
                           static_cast<std::uint64_t>(data.input_dim()),
                           static_cast<std::uint64_t>(data.output_dim()));
        entry.n_samples = data.size();

        bool found = false;
        double best_ll = -std::numeric_limits<double>::infinity();
        std::string last_error;
        for (int r = 0; r < restarts; ++r) {
            TrainingConfig config = base_config;
            config.k = k;
            config.seed = derive_seed(base_config.seed, static_cast<std::uint64_t>(k),
                                      static_cast<std::uint64_t>(r));
            try {
                FitResult res = fit(data, config);
                const double ll = res.trace.final_log_likelihood();
                if (!found || ll > best_ll) {
                    found = true;
                    best_ll = ll;
                    entry.seed_of_best = config.seed;
                }
            } catch (const std::exception& ex) {
                last_error = ex.what();
            }
        }

        if (!found) {
            entry.failed = true;
            entry.error = last_error;
        } else {
            entry.log_likelihood = best_ll;
            entry.bic = bic(entry.d, static_cast<std::uint64_t>(data.size()), best_ll);
            entry.log10_bic = entry.bic > 0.0 ? std::log10(entry.bic)
                                              : std::numeric_limits<double>::quiet_NaN();
        }
        report.entries.push_back(std::move(entry));
    }

    bool have_best = false;
    double best_bic = 0.0;
    for (const auto& entry : report.entries) {
        if (entry.failed) continue;
        if (!have_best || entry.bic < best_bic) {
            have_best = true;
            best_bic = entry.bic;
            report.best_k = entry.k;
        }
    }
    if (!have_best) throw Error("select_k: training failed for every k in the range");
    return report;
}

std::string bic_report_csv(const BicReport& report) {
    std::ostringstream out;
    out << "k,d,n_samples,log_likelihood,bic,log10_bic,seed_of_best,status\n";
    for (const auto& e : report.entries) {
        out << e.k << ',' << e.d << ',' << e.n_samples << ',';
        if (e.failed) {
            out << ",,,," << "failed(" << sanitize_csv_field(e.error) << ")\n";
        } else {
            out << format_double(e.log_likelihood) << ',' << format_double(e.bic) << ','
                << format_double(e.log10_bic) << ',' << e.seed_of_best << ",ok\n";
        }
    }
    return out.str();
}

FoldPlan FoldPlan::make(Eigen::Index n_samples, int n_folds, std::uint64_t seed) {
    if (n_folds < 2) throw ArgumentError("FoldPlan: need at least 2 folds");
    if (static_cast<Eigen::Index>(n_folds) > n_samples)
        throw ArgumentError("FoldPlan: more folds than samples");

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n_samples));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    // Fisher-Yates with raw mt19937_64 draws; std::shuffle's draw pattern is
    // implementation-defined, this is not.
    std::mt19937_64 rng(derive_seed(seed, 0x666f6c64));
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(perm[i], perm[j]);
    }

    FoldPlan plan;
    plan.n_folds = n_folds;
    plan.seed = seed;
    plan.assignment.assign(static_cast<std::size_t>(n_samples), 0);
    const auto base = n_samples / n_folds;
    const auto extra = n_samples % n_folds;
    std::size_t pos = 0;
    for (int f = 0; f < n_folds; ++f) {
        const auto size = base + (static_cast<Eigen::Index>(f) < extra ? 1 : 0);
        for (Eigen::Index s = 0; s < size; ++s)
            plan.assignment[static_cast<std::size_t>(perm[pos++])] = f;
    }
    return plan;
}

std::vector<Eigen::Index> FoldPlan::fold_indices(int fold) const {
    std::vector<Eigen::Index> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] == fold) out.push_back(static_cast<Eigen::Index>(i));
    return out;
}

std::vector<Eigen::Index> FoldPlan::complement_indices(int fold) const {
    std::vector<Eigen::Index> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] != fold) out.push_back(static_cast<Eigen::Index>(i));
    return out;
}

KFoldResult kfold_evaluate(const Dataset& data, const TrainingConfig& config,
                           const FoldPlan& plan) {
    data.validate();
    if (!data.has_targets()) throw ArgumentError("kfold_evaluate: dataset has no targets");
    if (static_cast<Eigen::Index>(plan.assignment.size()) != data.size())
        throw ArgumentError("kfold_evaluate: fold plan does not match the dataset");
    if (plan.n_folds < 2) throw ArgumentError("kfold_evaluate: need at least 2 folds");

    KFoldResult result;
    for (int f = 0; f < plan.n_folds; ++f) {
        const auto test_rows = plan.fold_indices(f);
        if (test_rows.size() < 2)
            throw ArgumentError("kfold_evaluate: fold " + std::to_string(f) +
                                " has fewer than 2 samples");
        Dataset train = select_rows(data, plan.complement_indices(f));
        Dataset test = select_rows(data, test_rows);

        TrainingConfig fold_config = config;
        fold_config.seed = derive_seed(config.seed, 0x6b666f6c64, static_cast<std::uint64_t>(f));
        FitResult res = fit(train, fold_config);
        Matrix pred = res.model.predict_mean_batch(test.x);
        result.folds.push_back({mae(test.y, pred), r2_score(test.y, pred)});
    }

    for (const auto& fold : result.folds) {
        result.mean_mae += fold.mae;
        result.mean_r2 += fold.r2;
    }
    result.mean_mae /= static_cast<double>(result.folds.size());
    result.mean_r2 /= static_cast<double>(result.folds.size());
    return result;
}

}  // namespace more
