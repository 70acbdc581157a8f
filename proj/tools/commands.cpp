// commands.cpp -- subcommand implementations.
#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "cli_common.hpp"
#include "more/analysis.hpp"
#include "more/baseline.hpp"
#include "more/errors.hpp"
#include "more/format.hpp"
#include "more/io.hpp"
#include "more/metrics.hpp"
#include "more/model.hpp"
#include "more/selection.hpp"
#include "more/synthetic.hpp"
#include "more/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace morecli {

namespace {

fs::path sibling(const fs::path& base, const std::string& suffix) {
    return base.parent_path() / (base.stem().string() + suffix);
}

more::InitMethod parse_init(const std::string& name) {
    if (name == "kmeans" || name == "kmeans_partition") return more::InitMethod::kmeans_partition;
    if (name == "random") return more::InitMethod::random;
    throw more::ArgumentError("--init must be 'kmeans' or 'random', got '" + name + "'");
}

more::Metric parse_metric(const std::string& name) {
    if (name == "euclidean") return more::Metric::euclidean;
    if (name == "cosine") return more::Metric::cosine;
    throw more::ArgumentError("--metric must be 'euclidean' or 'cosine', got '" + name + "'");
}

more::AssignMode parse_mode(const std::string& name) {
    if (name == "gate") return more::AssignMode::gate;
    if (name == "responsibility") return more::AssignMode::responsibility;
    throw more::ArgumentError("--mode must be 'gate' or 'responsibility', got '" + name + "'");
}

void require_out_dir(const std::string& dir) {
    if (dir.empty()) throw more::ArgumentError("--out is required");
}

json config_or_empty(const std::string& path) {
    return path.empty() ? json::object() : load_config_file(path);
}

std::string trace_csv(const more::TrainingTrace& trace) {
    std::ostringstream out;
    out << "iteration,log_likelihood\n";
    for (std::size_t i = 0; i < trace.log_likelihoods.size(); ++i)
        out << i << ',' << more::format_double(trace.log_likelihoods[i]) << '\n';
    return out.str();
}

}  // namespace

int cmd_synth(SynthOptions& opt, const CLI::App* cmd) {
    const json config = config_or_empty(opt.config);
    config_override(config, cmd, "--experts", opt.experts);
    config_override(config, cmd, "--in-dim", opt.in_dim);
    config_override(config, cmd, "--out-dim", opt.out_dim);
    config_override(config, cmd, "--samples", opt.samples);
    config_override(config, cmd, "--gating-scale", opt.gating_scale);
    config_override(config, cmd, "--noise-std", opt.noise_std);
    config_override(config, cmd, "--seed", opt.seed);
    config_override(config, cmd, "--out", opt.out_dir);
    require_out_dir(opt.out_dir);

    more::SyntheticSpec spec;
    spec.k = opt.experts;
    spec.n = opt.in_dim;
    spec.m = opt.out_dim;
    spec.n_samples = opt.samples;
    spec.gating_scale = opt.gating_scale;
    spec.noise_std = opt.noise_std;
    spec.seed = opt.seed;
    spec.validate();

    auto gen = more::generate_synthetic(spec);

    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    more::save_matrix_bin(dir / "x.bin", gen.data.x);
    more::save_matrix_bin(dir / "y.bin", gen.data.y);
    more::save_model(dir / "truth.json", gen.truth);
    std::ostringstream labels;
    for (std::size_t i = 0; i < gen.labels.size(); ++i) labels << i << ',' << gen.labels[i] << '\n';
    write_text_file(dir / "labels.csv", labels.str());

    ManifestBuilder manifest("synth");
    manifest.set_config(json{{"experts", spec.k},
                             {"in-dim", spec.n},
                             {"out-dim", spec.m},
                             {"samples", spec.n_samples},
                             {"gating-scale", spec.gating_scale},
                             {"noise-std", spec.noise_std},
                             {"seed", spec.seed}});
    for (const char* name : {"x.bin", "y.bin", "truth.json", "truth.weights.bin",
                             "truth.variances.bin", "truth.gating.bin", "labels.csv"})
        manifest.add_output(name, dir / name);
    manifest.write(dir / "manifest.json");

    std::printf("wrote %s: %ld samples, %d experts, x %ldx%ld, y %ldx%ld\n",
                dir.string().c_str(), static_cast<long>(spec.n_samples), spec.k,
                static_cast<long>(spec.n_samples), static_cast<long>(spec.n),
                static_cast<long>(spec.n_samples), static_cast<long>(spec.m));
    return 0;
}

int cmd_fit(FitOptions& opt, const CLI::App* cmd) {
    const json config = config_or_empty(opt.config);
    config_override(config, cmd, "--x", opt.x_path);
    config_override(config, cmd, "--y", opt.y_path);
    config_override(config, cmd, "--model", opt.model_path);
    config_override(config, cmd, "--experts", opt.experts);
    config_override(config, cmd, "--max-iters", opt.max_iters);
    config_override(config, cmd, "--tol", opt.tol);
    config_override(config, cmd, "--eta", opt.eta);
    config_override(config, cmd, "--gating-steps", opt.gating_steps);
    config_override(config, cmd, "--variance-floor", opt.variance_floor);
    config_override(config, cmd, "--init", opt.init);
    config_override(config, cmd, "--seed", opt.seed);
    config_override(config, cmd, "--threads", opt.threads);
    if (opt.x_path.empty() || opt.y_path.empty())
        throw more::ArgumentError("--x and --y are required");
    if (opt.model_path.empty()) throw more::ArgumentError("--model is required");

    more::TrainingConfig train;
    train.k = opt.experts;
    train.max_iters = opt.max_iters;
    train.tol = opt.tol;
    train.eta = opt.eta;
    train.gating_steps = opt.gating_steps;
    train.variance_floor = opt.variance_floor;
    train.init = parse_init(opt.init);
    train.seed = opt.seed;
    train.threads = opt.threads;
    train.validate();

    const auto data = load_dataset(opt.x_path, opt.y_path, opt.header);
    auto result = more::fit(data, train);

    const fs::path model_path(opt.model_path);
    if (!model_path.parent_path().empty()) fs::create_directories(model_path.parent_path());
    more::save_model(model_path, result.model);
    const auto trace_path = sibling(model_path, ".trace.csv");
    write_text_file(trace_path, trace_csv(result.trace));

    ManifestBuilder manifest("fit");
    manifest.set_config(json{{"experts", train.k},
                             {"max-iters", train.max_iters},
                             {"tol", train.tol},
                             {"eta", train.eta},
                             {"gating-steps", train.gating_steps},
                             {"variance-floor", train.variance_floor},
                             {"init", opt.init},
                             {"seed", train.seed},
                             {"threads", train.threads},
                             {"csv-header", opt.header}});
    manifest.add_input("x", opt.x_path);
    manifest.add_input("y", opt.y_path);
    manifest.add_output("model", model_path);
    for (const char* suffix : {".weights.bin", ".variances.bin", ".gating.bin"})
        manifest.add_output(std::string("model") + suffix, sibling(model_path, suffix));
    manifest.add_output("trace", trace_path);
    manifest.add_note("result", json{{"iterations", result.trace.iterations_run},
                                     {"converged", result.trace.converged},
                                     {"log_likelihood", result.trace.final_log_likelihood()},
                                     {"empty_expert_events",
                                      result.trace.empty_expert_events.size()}});
    manifest.write(sibling(model_path, ".manifest.json"));

    std::printf("fit: k=%d converged=%s iterations=%d log_likelihood=%.6f\n", train.k,
                result.trace.converged ? "true" : "false", result.trace.iterations_run,
                result.trace.final_log_likelihood());
    return 0;
}

int cmd_predict(PredictOptions& opt, const CLI::App* cmd) {
    const json config = config_or_empty(opt.config);
    config_override(config, cmd, "--model", opt.model_path);
    config_override(config, cmd, "--x", opt.x_path);
    config_override(config, cmd, "--out", opt.out_path);
    if (opt.model_path.empty() || opt.x_path.empty() || opt.out_path.empty())
        throw more::ArgumentError("--model, --x and --out are required");

    auto loaded = more::load_matrix(opt.x_path, more::matrix_format_for(opt.x_path), opt.header);
    auto model = more::load_model(opt.model_path);

    more::Matrix pred;
    if (const auto* mixture = std::get_if<more::MixtureModel>(&model)) {
        pred = mixture->predict_mean_batch(loaded.values);
    } else {
        pred = more::ridge_predict_batch(std::get<more::RidgeModel>(model), loaded.values);
    }

    const fs::path out_path(opt.out_path);
    if (!out_path.parent_path().empty()) fs::create_directories(out_path.parent_path());
    if (more::matrix_format_for(out_path) == more::MatrixFormat::bin)
        more::save_matrix_bin(out_path, pred);
    else
        more::save_matrix_csv(out_path, pred, loaded.ids);

    ManifestBuilder manifest("predict");
    manifest.set_config(json{{"csv-header", opt.header}});
    manifest.add_input("model", opt.model_path);
    manifest.add_input("x", opt.x_path);
    manifest.add_output("predictions", out_path);
    manifest.write(sibling(out_path, ".manifest.json"));

    std::printf("predict: wrote %ldx%ld predictions to %s\n", static_cast<long>(pred.rows()),
                static_cast<long>(pred.cols()), out_path.string().c_str());
    return 0;
}

int cmd_evaluate(EvaluateOptions& opt, const CLI::App* cmd) {
    const json config = config_or_empty(opt.config);
    config_override(config, cmd, "--y", opt.y_path);
    config_override(config, cmd, "--pred", opt.preds);
    config_override(config, cmd, "--out", opt.out_dir);
    if (opt.y_path.empty()) throw more::ArgumentError("--y is required");
    if (opt.preds.empty()) throw more::ArgumentError("at least one --pred is required");
    require_out_dir(opt.out_dir);

    std::vector<std::pair<std::string, std::string>> named_paths;
    for (const auto& entry : opt.preds) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            named_paths.emplace_back(fs::path(entry).stem().string(), entry);
        } else if (eq == 0 || eq + 1 == entry.size()) {
            throw more::ArgumentError("--pred expects NAME=PATH, got '" + entry + "'");
        } else {
            named_paths.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
        }
    }

    const auto truth =
        more::load_matrix(opt.y_path, more::matrix_format_for(opt.y_path), opt.header);
    std::vector<std::pair<std::string, more::Matrix>> predictions;
    for (const auto& [name, path] : named_paths) {
        auto loaded = more::load_matrix(path, more::matrix_format_for(path), opt.header);
        predictions.emplace_back(name, std::move(loaded.values));
    }

    const auto table = more::evaluate_methods(truth.values, predictions);

    // Per-sample MAE groups feed the cross-method ANOVA.
    json anova_json;
    if (predictions.size() >= 2) {
        std::vector<std::vector<double>> groups;
        for (const auto& [name, pred] : predictions) {
            std::vector<double> errs;
            errs.reserve(static_cast<std::size_t>(truth.values.rows()));
            for (Eigen::Index i = 0; i < truth.values.rows(); ++i)
                errs.push_back((truth.values.row(i) - pred.row(i)).cwiseAbs().mean());
            groups.push_back(std::move(errs));
        }
        const auto anova = more::anova_oneway(groups);
        anova_json = json{{"f_statistic", anova.f_statistic},
                          {"df_between", anova.df_between},
                          {"df_within", anova.df_within},
                          {"p_value", anova.p_value}};
    }

    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);

    std::ostringstream metrics_csv;
    metrics_csv << "method,mae,r2\n";
    for (const auto& method : table)
        metrics_csv << method.method << ',' << more::format_double(method.mae) << ','
                    << more::format_double(method.r2) << '\n';
    write_text_file(dir / "metrics.csv", metrics_csv.str());

    std::ostringstream cls_csv;
    cls_csv << "method,k,class1_precision,class1_recall,class1_f1,"
               "macro_precision,macro_recall,macro_f1,"
               "micro_precision,micro_recall,micro_f1\n";
    for (const auto& method : table) {
        for (const auto& shift : method.by_shift) {
            cls_csv << method.method << ',' << shift.threshold_shift;
            for (const auto* scores : {&shift.class1, &shift.macro_avg, &shift.micro_avg})
                cls_csv << ',' << more::format_double(scores->precision) << ','
                        << more::format_double(scores->recall) << ','
                        << more::format_double(scores->f1);
            cls_csv << '\n';
        }
    }
    write_text_file(dir / "classification.csv", cls_csv.str());

    json report;
    report["methods"] = json::array();
    for (const auto& method : table) {
        json m{{"method", method.method}, {"mae", method.mae}, {"r2", method.r2}};
        m["by_shift"] = json::array();
        for (const auto& shift : method.by_shift) {
            auto scores_json = [](const more::ClassScores& s) {
                return json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
            };
            m["by_shift"].push_back(json{{"k", shift.threshold_shift},
                                         {"class1", scores_json(shift.class1)},
                                         {"class0", scores_json(shift.class0)},
                                         {"macro", scores_json(shift.macro_avg)},
                                         {"micro", scores_json(shift.micro_avg)}});
        }
        report["methods"].push_back(std::move(m));
    }
    if (!anova_json.is_null()) report["anova_per_sample_mae"] = anova_json;
    write_text_file(dir / "evaluation.json", report.dump(2) + "\n");

    ManifestBuilder manifest("evaluate");
    manifest.set_config(json{{"csv-header", opt.header}});
    manifest.add_input("y", opt.y_path);
    for (const auto& [name, path] : named_paths) manifest.add_input("pred:" + name, path);
    manifest.add_output("metrics.csv", dir / "metrics.csv");
    manifest.add_output("classification.csv", dir / "classification.csv");
    manifest.add_output("evaluation.json", dir / "evaluation.json");
    manifest.write(dir / "manifest.json");

    for (const auto& method : table)
        std::printf("evaluate: %s mae=%.6f r2=%.6f\n", method.method.c_str(), method.mae,
                    method.r2);
    return 0;
}

int cmd_select_k(SelectKOptions& opt, const CLI::App* cmd) {
    const json config = config_or_empty(opt.config);
    config_override(config, cmd, "--x", opt.x_path);
    config_override(config, cmd, "--y", opt.y_path);
    config_override(config, cmd, "--out", opt.out_dir);
    config_override(config, cmd, "--k-min", opt.k_min);
    config_override(config, cmd, "--k-max", opt.k_max);
    config_override(config, cmd, "--restarts", opt.restarts);
    config_override(config, cmd, "--max-iters", opt.max_iters);
    config_override(config, cmd, "--tol", opt.tol);
    config_override(config, cmd, "--eta", opt.eta);
    config_override(config, cmd, "--gating-steps", opt.gating_steps);
    config_override(config, cmd, "--variance-floor", opt.variance_floor);
    config_override(config, cmd, "--init", opt.init);
    config_override(config, cmd, "--seed", opt.seed);
    config_override(config, cmd, "--threads", opt.threads);
    if (opt.x_path.empty() || opt.y_path.empty())
        throw more::ArgumentError("--x and --y are required");
    require_out_dir(opt.out_dir);

    more::TrainingConfig base;
    base.max_iters = opt.max_iters;
    base.tol = opt.tol;
    base.eta = opt.eta;
    base.gating_steps = opt.gating_steps;
    base.variance_floor = opt.variance_floor;
    base.init = parse_init(opt.init);
    base.seed = opt.seed;
    base.threads = opt.threads;
    base.validate();
    if (opt.k_min < 1 || opt.k_max < opt.k_min)
        throw more::ArgumentError("need 1 <= --k-min <= --k-max");
    if (opt.restarts < 1) throw more::ArgumentError("--restarts must be >= 1");

    const auto data = load_dataset(opt.x_path, opt.y_path, opt.header);
    const auto report = more::select_k(data, opt.k_min, opt.k_max, base, opt.restarts);

    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    write_text_file(dir / "bic.csv", more::bic_report_csv(report));

    ManifestBuilder manifest("select-k");
    manifest.set_config(json{{"k-min", opt.k_min},
                             {"k-max", opt.k_max},
                             {"restarts", opt.restarts},
                             {"max-iters", base.max_iters},
                             {"tol", base.tol},
                             {"eta", base.eta},
                             {"gating-steps", base.gating_steps},
                             {"variance-floor", base.variance_floor},
                             {"init", opt.init},
                             {"seed", base.seed},
                             {"threads", base.threads},
                             {"csv-header", opt.header}});
    manifest.add_input("x", opt.x_path);
    manifest.add_input("y", opt.y_path);
    manifest.add_output("bic.csv", dir / "bic.csv");
    manifest.add_note("best_k", report.best_k);
    manifest.write(dir / "manifest.json");

    std::printf("select-k: best_k=%d (see %s)\n", report.best_k,
                (dir / "bic.csv").string().c_str());
    return 0;
}

int cmd_baseline_ridge(RidgeOptions& opt, const CLI::App* cmd) {
    const json config = config_or_empty(opt.config);
    config_override(config, cmd, "--x", opt.x_path);
    config_override(config, cmd, "--y", opt.y_path);
    config_override(config, cmd, "--model", opt.model_path);
    config_override(config, cmd, "--lambda", opt.lambda);
    config_override(config, cmd, "--grid", opt.grid);
    config_override(config, cmd, "--holdout", opt.holdout);
    config_override(config, cmd, "--seed", opt.seed);
    if (opt.x_path.empty() || opt.y_path.empty())
        throw more::ArgumentError("--x and --y are required");
    if (opt.model_path.empty()) throw more::ArgumentError("--model is required");
    if (!(opt.lambda >= 0.0)) throw more::ArgumentError("--lambda must be >= 0");

    std::vector<double> grid;
    if (!opt.grid.empty()) {
        std::stringstream ss(opt.grid);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                grid.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw more::ArgumentError("--grid: cannot parse lambda '" + item + "'");
            }
            if (!(grid.back() >= 0.0))
                throw more::ArgumentError("--grid: lambdas must be >= 0");
        }
        if (grid.empty()) throw more::ArgumentError("--grid is empty");
    }

    const auto data = load_dataset(opt.x_path, opt.y_path, opt.header);

    double chosen_lambda = opt.lambda;
    std::string grid_csv;
    if (!grid.empty()) {
        std::vector<Eigen::Index> train_rows, test_rows;
        holdout_split(data.size(), opt.holdout, opt.seed, train_rows, test_rows);
        const auto train = more::select_rows(data, train_rows);
        const auto validation = more::select_rows(data, test_rows);
        const auto search = more::ridge_grid_search(train, validation, grid);
        chosen_lambda = search.best.lambda;
        std::ostringstream gcsv;
        gcsv << "lambda,validation_mae\n";
        for (const auto& entry : search.entries)
            gcsv << more::format_double(entry.lambda) << ','
                 << more::format_double(entry.validation_mae) << '\n';
        grid_csv = gcsv.str();
    }

    const auto model = more::ridge_fit(data, chosen_lambda);

    const fs::path model_path(opt.model_path);
    if (!model_path.parent_path().empty()) fs::create_directories(model_path.parent_path());
    more::save_model(model_path, model);
    if (!grid_csv.empty()) write_text_file(sibling(model_path, ".grid.csv"), grid_csv);

    ManifestBuilder manifest("baseline-ridge");
    manifest.set_config(json{{"lambda", chosen_lambda},
                             {"grid", opt.grid},
                             {"holdout", opt.holdout},
                             {"seed", opt.seed},
                             {"csv-header", opt.header}});
    manifest.add_input("x", opt.x_path);
    manifest.add_input("y", opt.y_path);
    manifest.add_output("model", model_path);
    manifest.add_output("model.weights.bin", sibling(model_path, ".weights.bin"));
    if (!grid_csv.empty()) manifest.add_output("grid", sibling(model_path, ".grid.csv"));
    manifest.write(sibling(model_path, ".manifest.json"));

    std::printf("baseline-ridge: lambda=%s model=%s\n",
                more::format_double(chosen_lambda).c_str(), model_path.string().c_str());
    return 0;
}

int cmd_analyze(AnalyzeOptions& opt, const CLI::App* cmd) {
    const json config = config_or_empty(opt.config);
    config_override(config, cmd, "--model", opt.model_path);
    config_override(config, cmd, "--x", opt.x_path);
    config_override(config, cmd, "--y", opt.y_path);
    config_override(config, cmd, "--atlas", opt.atlas_path);
    config_override(config, cmd, "--out", opt.out_dir);
    config_override(config, cmd, "--mode", opt.mode);
    config_override(config, cmd, "--aggregation", opt.aggregation);
    config_override(config, cmd, "--variance-target", opt.variance_target);
    config_override(config, cmd, "--score-threshold", opt.score_threshold);
    if (opt.model_path.empty() || opt.x_path.empty() || opt.y_path.empty() ||
        opt.atlas_path.empty())
        throw more::ArgumentError("--model, --x, --y and --atlas are required");
    require_out_dir(opt.out_dir);
    const auto mode = parse_mode(opt.mode);
    more::RegionAggregation aggregation;
    if (opt.aggregation == "mean") aggregation = more::RegionAggregation::mean;
    else if (opt.aggregation == "sum") aggregation = more::RegionAggregation::sum;
    else throw more::ArgumentError("--aggregation must be 'mean' or 'sum'");
    if (!(opt.variance_target > 0.0 && opt.variance_target <= 1.0))
        throw more::ArgumentError("--variance-target must be in (0, 1]");

    auto loaded_model = more::load_model(opt.model_path);
    const auto* mixture = std::get_if<more::MixtureModel>(&loaded_model);
    if (mixture == nullptr)
        throw more::ArgumentError("analyze requires a mixture model, got a ridge model");

    const auto data = load_dataset(opt.x_path, opt.y_path, opt.header);
    const auto atlas = more::load_atlas(opt.atlas_path);
    const auto assignments = more::assign_samples(*mixture, data, mode);

    json experts_json = json::array();
    std::vector<std::vector<std::string>> qualified(
        static_cast<std::size_t>(mixture->k()));
    std::vector<bool> analyzed(static_cast<std::size_t>(mixture->k()), false);
    std::vector<more::RegionImportance> importances;
    for (int j = 0; j < mixture->k(); ++j) {
        json entry{{"expert", j},
                   {"n_samples", assignments.members[static_cast<std::size_t>(j)].size()}};
        try {
            const auto activation =
                more::region_activation_matrix(assignments, data, atlas, j, aggregation);
            auto importance = more::region_importance(activation, atlas.region_labels,
                                                      opt.variance_target, opt.score_threshold);
            importance.expert = j;
            entry["retained_components"] = importance.retained_components;
            entry["explained_variance"] = importance.explained_variance;
            entry["regions"] = json::array();
            for (const auto& region : importance.regions) {
                entry["regions"].push_back(json{{"region", region.region},
                                                {"score", region.score}});
                qualified[static_cast<std::size_t>(j)].push_back(region.region);
            }
            analyzed[static_cast<std::size_t>(j)] = true;
            importances.push_back(std::move(importance));
        } catch (const more::DataError& ex) {
            entry["skipped"] = ex.what();
        } catch (const more::DomainError& ex) {
            entry["skipped"] = ex.what();
        }
        experts_json.push_back(std::move(entry));
    }

    // Regions qualified for every analyzed expert.
    std::vector<std::string> common;
    bool first_set = true;
    for (int j = 0; j < mixture->k(); ++j) {
        if (!analyzed[static_cast<std::size_t>(j)]) continue;
        std::set<std::string> current(qualified[static_cast<std::size_t>(j)].begin(),
                                      qualified[static_cast<std::size_t>(j)].end());
        if (first_set) {
            common.assign(current.begin(), current.end());
            first_set = false;
        } else {
            std::vector<std::string> kept;
            for (const auto& label : common)
                if (current.count(label)) kept.push_back(label);
            common = std::move(kept);
        }
    }
    if (first_set) common.clear();

    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);

    std::ostringstream assign_csv;
    assign_csv << "id,expert";
    for (int j = 0; j < mixture->k(); ++j) assign_csv << ",p" << j;
    assign_csv << '\n';
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        assign_csv << assignments.ids[static_cast<std::size_t>(i)] << ','
                   << assignments.expert[static_cast<std::size_t>(i)];
        for (int j = 0; j < mixture->k(); ++j)
            assign_csv << ',' << more::format_double(assignments.probabilities(i, j));
        assign_csv << '\n';
    }
    write_text_file(dir / "assignments.csv", assign_csv.str());

    std::ostringstream regions_csv;
    regions_csv << "expert,region,score\n";
    for (const auto& importance : importances)
        for (const auto& region : importance.regions)
            regions_csv << importance.expert << ',' << region.region << ','
                        << more::format_double(region.score) << '\n';
    for (const auto& label : common) regions_csv << "common," << label << ",\n";
    write_text_file(dir / "regions.csv", regions_csv.str());

    json report{{"mode", opt.mode},
                {"aggregation", opt.aggregation},
                {"variance_target", opt.variance_target},
                {"score_threshold", opt.score_threshold},
                {"experts", experts_json},
                {"common_regions", common}};
    write_text_file(dir / "analysis.json", report.dump(2) + "\n");

    ManifestBuilder manifest("analyze");
    manifest.set_config(json{{"mode", opt.mode},
                             {"aggregation", opt.aggregation},
                             {"variance-target", opt.variance_target},
                             {"score-threshold", opt.score_threshold},
                             {"csv-header", opt.header}});
    manifest.add_input("model", opt.model_path);
    manifest.add_input("x", opt.x_path);
    manifest.add_input("y", opt.y_path);
    manifest.add_input("atlas", opt.atlas_path);
    manifest.add_output("assignments.csv", dir / "assignments.csv");
    manifest.add_output("regions.csv", dir / "regions.csv");
    manifest.add_output("analysis.json", dir / "analysis.json");
    manifest.write(dir / "manifest.json");

    std::printf("analyze: %d experts, %zu common regions, outputs in %s\n", mixture->k(),
                common.size(), dir.string().c_str());
    return 0;
}

int cmd_cluster(ClusterOptions& opt, const CLI::App* cmd) {
    const json config = config_or_empty(opt.config);
    config_override(config, cmd, "--input", opt.input_path);
    config_override(config, cmd, "--out", opt.out_dir);
    config_override(config, cmd, "--k", opt.k);
    config_override(config, cmd, "--metric", opt.metric);
    config_override(config, cmd, "--seed", opt.seed);
    if (opt.input_path.empty()) throw more::ArgumentError("--input is required");
    require_out_dir(opt.out_dir);
    if (opt.k < 1) throw more::ArgumentError("--k must be >= 1");
    const auto metric = parse_metric(opt.metric);

    auto loaded =
        more::load_matrix(opt.input_path, more::matrix_format_for(opt.input_path), opt.header);
    const auto clusters =
        more::cluster_stimuli(loaded.values, opt.k, metric, opt.seed, loaded.ids);

    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);

    std::ostringstream csv;
    csv << "id,cluster\n";
    for (Eigen::Index i = 0; i < loaded.values.rows(); ++i) {
        const auto& id = loaded.ids.empty() ? std::to_string(i)
                                            : loaded.ids[static_cast<std::size_t>(i)];
        csv << id << ',' << clusters.assignment[static_cast<std::size_t>(i)] << '\n';
    }
    write_text_file(dir / "clusters.csv", csv.str());

    json report{{"k", opt.k},
                {"metric", opt.metric},
                {"inertia", clusters.inertia},
                {"members", clusters.members}};
    write_text_file(dir / "clusters.json", report.dump(2) + "\n");

    ManifestBuilder manifest("cluster");
    manifest.set_config(json{{"k", opt.k},
                             {"metric", opt.metric},
                             {"seed", opt.seed},
                             {"csv-header", opt.header}});
    manifest.add_input("input", opt.input_path);
    manifest.add_output("clusters.csv", dir / "clusters.csv");
    manifest.add_output("clusters.json", dir / "clusters.json");
    manifest.write(dir / "manifest.json");

    std::printf("cluster: %d clusters over %ld rows, outputs in %s\n", opt.k,
                static_cast<long>(loaded.values.rows()), dir.string().c_str());
    return 0;
}

}  // namespace morecli
