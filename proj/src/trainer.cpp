// trainer.cpp -- EM loop and its pieces.
#include "more/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <utility>

#include "more/errors.hpp"
#include "more/numerics.hpp"
#include "more/parallel.hpp"
#include "more/seeding.hpp"

namespace more {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;
constexpr double kEmptyExpertMass = 1e-12;

// Least-squares fit of Y on X over the given rows, with jitter escalation
// so near-collinear subsets still produce a usable expert. Variances are the
// per-output mean squared residuals over the subset, floored.
Expert fit_expert_on_rows(const Dataset& data, const std::vector<Eigen::Index>& rows,
                          double variance_floor) {
    const auto n = data.input_dim();
    const auto m = data.output_dim();
    const auto cnt = static_cast<Eigen::Index>(rows.size());
    Matrix xs(cnt, n);
    Matrix ys(cnt, m);
    for (Eigen::Index r = 0; r < cnt; ++r) {
        xs.row(r) = data.x.row(rows[static_cast<std::size_t>(r)]);
        ys.row(r) = data.y.row(rows[static_cast<std::size_t>(r)]);
    }
    Matrix gram = xs.transpose() * xs;
    SpdFactorization fact(gram);
    Eigen::MatrixXd wt = fact.solve_all(xs.transpose() * ys);  // n x m
    Matrix resid = ys - xs * wt;
    Expert expert;
    expert.weights = wt.transpose();
    expert.variances =
        (resid.array().square().colwise().sum() / static_cast<double>(cnt))
            .transpose()
            .matrix()
            .cwiseMax(variance_floor);
    return expert;
}

// Row-wise log-softmax of x * params^T: log gating probabilities for
// arbitrary gating parameters.
Matrix log_gates_for(const Eigen::Ref<const Matrix>& x, const Matrix& params) {
    Matrix scores = x * params.transpose();
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        scores.row(i).array() -= log_sum_exp(Vector(scores.row(i).transpose()));
    }
    return scores;
}

}  // namespace

void TrainingConfig::validate() const {
    if (k < 1) throw ArgumentError("TrainingConfig: k must be at least 1");
    if (max_iters < 1) throw ArgumentError("TrainingConfig: max_iters must be at least 1");
    if (!(tol > 0.0)) throw ArgumentError("TrainingConfig: tol must be positive");
    if (!(eta > 0.0)) throw ArgumentError("TrainingConfig: eta must be positive");
    if (gating_steps < 1) throw ArgumentError("TrainingConfig: gating_steps must be at least 1");
    if (!(variance_floor > 0.0))
        throw ArgumentError("TrainingConfig: variance_floor must be positive");
    if (threads < 1) throw ArgumentError("TrainingConfig: threads must be at least 1");
}

MixtureModel initialize(const Dataset& data, const TrainingConfig& config) {
    config.validate();
    data.validate();
    if (!data.has_targets()) throw ArgumentError("initialize: dataset has no targets");
    const auto num = data.size();
    const auto n = data.input_dim();
    const auto m = data.output_dim();
    if (num < config.k)
        throw ArgumentError("initialize: need at least k samples, got " + std::to_string(num));

    const int k = config.k;
    std::vector<Expert> experts;
    experts.reserve(static_cast<std::size_t>(k));

    if (config.init == InitMethod::kmeans_partition) {
        auto km = kmeans(data.x, k, Metric::euclidean, derive_seed(config.seed, 0x6b6d), 100);
        std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(k));
        for (Eigen::Index i = 0; i < num; ++i) {
            members[static_cast<std::size_t>(km.assignments[static_cast<std::size_t>(i)])]
                .push_back(i);
        }
        for (int j = 0; j < k; ++j) {
            const auto& rows = members[static_cast<std::size_t>(j)];
            if (rows.empty()) {
                // kmeans reseeds empty clusters, so this only happens with
                // duplicated data; fall back to a global fit.
                std::vector<Eigen::Index> all(static_cast<std::size_t>(num));
                std::iota(all.begin(), all.end(), Eigen::Index{0});
                experts.push_back(fit_expert_on_rows(data, all, config.variance_floor));
            } else {
                experts.push_back(fit_expert_on_rows(data, rows, config.variance_floor));
            }
        }
    } else {
        std::mt19937_64 rng(derive_seed(config.seed, 0x726e));
        std::uniform_real_distribution<double> small(-0.1, 0.1);
        Vector col_var(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double mean = data.y.col(i).mean();
            col_var(i) = (data.y.col(i).array() - mean).square().sum() / static_cast<double>(num);
        }
        col_var = col_var.cwiseMax(config.variance_floor);
        for (int j = 0; j < k; ++j) {
            Expert expert;
            expert.weights.resize(m, n);
            for (Eigen::Index r = 0; r < m; ++r)
                for (Eigen::Index c = 0; c < n; ++c) expert.weights(r, c) = small(rng);
            expert.variances = col_var;
            experts.push_back(std::move(expert));
        }
    }

    GatingNetwork gating;
    gating.params = Matrix::Zero(k, n);
    return MixtureModel(std::move(experts), std::move(gating), config.variance_floor);
}

EStepResult e_step(const MixtureModel& model, const Dataset& data, int threads) {
    data.validate();
    if (!data.has_targets()) throw ArgumentError("e_step: dataset has no targets");
    if (data.input_dim() != model.input_dim() || data.output_dim() != model.output_dim())
        throw ArgumentError("e_step: dataset dimensions do not match model");

    const auto num = data.size();
    const int k = model.k();
    const auto m = data.output_dim();

    Vector consts(k);       // per-expert additive constant of the log density
    Matrix half_inv(m, k);  // 0.5 / variance, one column per expert
    for (int j = 0; j < k; ++j) {
        const auto& ex = model.experts()[static_cast<std::size_t>(j)];
        consts(j) = -0.5 * static_cast<double>(m) * kLogTwoPi -
                    0.5 * ex.variances.array().log().sum();
        half_inv.col(j) = (0.5 / ex.variances.array()).matrix();
    }
    const Matrix& gate_params = model.gating().params;

    EStepResult out;
    out.responsibilities.resize(num, k);
    std::vector<double> chunk_ll(static_cast<std::size_t>(chunk_count(num)), 0.0);

    parallel_chunks(num, threads, [&](std::size_t chunk, Eigen::Index begin, Eigen::Index end) {
        const auto len = end - begin;
        auto xc = data.x.middleRows(begin, len);
        auto yc = data.y.middleRows(begin, len);
        Matrix joint = xc * gate_params.transpose();  // gating scores first
        for (Eigen::Index i = 0; i < len; ++i) {
            joint.row(i).array() -= log_sum_exp(Vector(joint.row(i).transpose()));
        }
        for (int j = 0; j < k; ++j) {
            const auto& ex = model.experts()[static_cast<std::size_t>(j)];
            Matrix resid = yc - xc * ex.weights.transpose();
            joint.col(j).array() +=
                consts(j) - (resid.array().square().matrix() * half_inv.col(j)).array();
        }
        double ll = 0.0;
        for (Eigen::Index i = 0; i < len; ++i) {
            const double lse = log_sum_exp(Vector(joint.row(i).transpose()));
            out.responsibilities.row(begin + i) = (joint.row(i).array() - lse).exp().matrix();
            ll += lse;
        }
        chunk_ll[chunk] = ll;
    });

    out.log_likelihood = std::accumulate(chunk_ll.begin(), chunk_ll.end(), 0.0);
    return out;
}

ExpertUpdate m_step_experts(const MixtureModel& current, const Dataset& data,
                            const Matrix& responsibilities, const TrainingConfig& config) {
    const auto num = data.size();
    const auto n = data.input_dim();
    const int k = current.k();
    if (responsibilities.rows() != num || responsibilities.cols() != k)
        throw ArgumentError("m_step_experts: responsibility matrix has wrong shape");

    ExpertUpdate out;
    out.experts.resize(static_cast<std::size_t>(k));
    std::vector<char> empty(static_cast<std::size_t>(k), 0);

    // Expert updates are independent; parallelize across experts, each one
    // computed serially so results do not depend on the thread count.
    parallel_indices(static_cast<Eigen::Index>(k), config.threads, [&](Eigen::Index jj) {
        const int j = static_cast<int>(jj);
        Vector h = responsibilities.col(j);
        const double mass = h.sum();
        if (mass <= kEmptyExpertMass) {
            empty[static_cast<std::size_t>(j)] = 1;
            return;
        }
        Matrix xw = data.x.array().colwise() * h.array();
        Matrix gram = data.x.transpose() * xw;
        SpdFactorization fact(gram);
        Eigen::MatrixXd wt = fact.solve_all(xw.transpose() * data.y);  // n x m
        Matrix resid = data.y - data.x * wt;
        Expert expert;
        expert.weights = wt.transpose();
        expert.variances =
            ((resid.array().square().colwise() * h.array()).colwise().sum() / mass)
                .transpose()
                .matrix()
                .cwiseMax(config.variance_floor);
        out.experts[static_cast<std::size_t>(j)] = std::move(expert);
    });

    // Rebuild any starved expert from the samples the current model explains
    // worst, instead of letting its statistics collapse.
    bool errors_ready = false;
    std::vector<std::pair<double, Eigen::Index>> errs;
    for (int j = 0; j < k; ++j) {
        if (!empty[static_cast<std::size_t>(j)]) continue;
        if (!errors_ready) {
            Vector best = Vector::Constant(num, std::numeric_limits<double>::infinity());
            for (const auto& ex : current.experts()) {
                Matrix resid = data.y - data.x * ex.weights.transpose();
                best = best.cwiseMin(resid.rowwise().squaredNorm());
            }
            errs.resize(static_cast<std::size_t>(num));
            for (Eigen::Index i = 0; i < num; ++i)
                errs[static_cast<std::size_t>(i)] = {best(i), i};
            std::sort(errs.begin(), errs.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            errors_ready = true;
        }
        Eigen::Index budget = std::max<Eigen::Index>(
            n, num / static_cast<Eigen::Index>(10 * k));
        budget = std::min(std::max<Eigen::Index>(budget, 1), num);
        std::vector<Eigen::Index> rows;
        rows.reserve(static_cast<std::size_t>(budget));
        for (Eigen::Index i = 0; i < budget; ++i)
            rows.push_back(errs[static_cast<std::size_t>(i)].second);
        out.experts[static_cast<std::size_t>(j)] =
            fit_expert_on_rows(data, rows, config.variance_floor);
        out.reinitialized.push_back(j);
    }
    return out;
}

double gating_q(const Eigen::Ref<const Matrix>& x, const Matrix& responsibilities,
                const Matrix& gating_params) {
    Matrix lg = log_gates_for(x, gating_params);
    return (responsibilities.array() * lg.array()).sum();
}

Matrix gating_q_gradient(const Eigen::Ref<const Matrix>& x, const Matrix& responsibilities,
                         const Matrix& gating_params) {
    Matrix gates = log_gates_for(x, gating_params).array().exp().matrix();
    return (responsibilities - gates).transpose() * x;  // k x n
}

GatingNetwork m_step_gating(const MixtureModel& model, const Dataset& data,
                            const Matrix& responsibilities, const TrainingConfig& config) {
    const auto num = data.size();
    const int k = model.k();
    if (responsibilities.rows() != num || responsibilities.cols() != k)
        throw ArgumentError("m_step_gating: responsibility matrix has wrong shape");

    Matrix params = model.gating().params;
    double q = gating_q(data.x, responsibilities, params);
    for (int step = 0; step < config.gating_steps; ++step) {
        Matrix grad = gating_q_gradient(data.x, responsibilities, params);
        if (grad.cwiseAbs().maxCoeff() == 0.0) break;
        double scale = config.eta;
        bool accepted = false;
        for (int attempt = 0; attempt <= 10; ++attempt) {
            Matrix candidate = params + scale * grad;
            const double q_new = gating_q(data.x, responsibilities, candidate);
            if (q_new >= q) {
                params = std::move(candidate);
                q = q_new;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) break;
    }
    GatingNetwork gating;
    gating.params = std::move(params);
    return gating;
}

double evaluate_q(const MixtureModel& updated, const Dataset& data,
                  const Matrix& responsibilities) {
    const auto num = data.size();
    if (responsibilities.rows() != num || responsibilities.cols() != updated.k())
        throw ArgumentError("evaluate_q: responsibility matrix has wrong shape");
    double q = 0.0;
    for (Eigen::Index i = 0; i < num; ++i) {
        Vector terms = updated.joint_log_terms(data.x.row(i).transpose(),
                                               data.y.row(i).transpose());
        q += responsibilities.row(i).dot(terms.transpose());
    }
    return q;
}

FitResult fit(const Dataset& data, const TrainingConfig& config) {
    MixtureModel model = initialize(data, config);
    TrainingTrace trace;

    EStepResult es = e_step(model, data, config.threads);
    trace.log_likelihoods.push_back(es.log_likelihood);
    double previous = es.log_likelihood;

    for (int iter = 0; iter < config.max_iters; ++iter) {
        ExpertUpdate update = m_step_experts(model, data, es.responsibilities, config);
        for (int j : update.reinitialized) trace.empty_expert_events.push_back({iter, j});
        GatingNetwork gating = m_step_gating(model, data, es.responsibilities, config);
        model = MixtureModel(std::move(update.experts), std::move(gating),
                             config.variance_floor);

        es = e_step(model, data, config.threads);
        trace.log_likelihoods.push_back(es.log_likelihood);
        trace.iterations_run = iter + 1;

        if (std::abs(es.log_likelihood - previous) /
                (1.0 + std::abs(es.log_likelihood)) < config.tol) {
            trace.converged = true;
            break;
        }
        previous = es.log_likelihood;
    }
    return FitResult{std::move(model), std::move(trace)};
}

}  // namespace more
