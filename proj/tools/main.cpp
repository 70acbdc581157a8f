// main.cpp -- moretk command-line entry point.
#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "commands.hpp"
#include "more/errors.hpp"
#include "more/version.hpp"

namespace {

void add_config_flag(CLI::App* cmd, std::string& path) {
    cmd->add_option("--config", path, "JSON config file; command-line flags win");
}

void add_header_flag(CLI::App* cmd, bool& header) {
    cmd->add_flag("--csv-header", header, "Skip the first line of csv inputs");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixture-of-regression-experts toolkit"};
    app.set_version_flag("--version", more::kVersion);
    app.require_subcommand(1);

    int rc = 0;

    morecli::SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic mixture dataset");
    synth_cmd->add_option("--experts", synth.experts, "Number of experts")
        ->capture_default_str();
    synth_cmd->add_option("--in-dim", synth.in_dim, "Input dimension")->capture_default_str();
    synth_cmd->add_option("--out-dim", synth.out_dim, "Output dimension")
        ->capture_default_str();
    synth_cmd->add_option("--samples", synth.samples, "Number of samples")
        ->capture_default_str();
    synth_cmd->add_option("--gating-scale", synth.gating_scale, "Gating weight scale")
        ->capture_default_str();
    synth_cmd->add_option("--noise-std", synth.noise_std, "Output noise std deviation")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    synth_cmd->add_option("--out", synth.out_dir, "Output directory");
    add_config_flag(synth_cmd, synth.config);
    synth_cmd->callback([&] { rc = morecli::cmd_synth(synth, synth_cmd); });

    morecli::FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "Train a mixture of regression experts");
    fit_cmd->add_option("--x", fit.x_path, "Input matrix (csv or bin)");
    fit_cmd->add_option("--y", fit.y_path, "Target matrix (csv or bin)");
    fit_cmd->add_option("--model", fit.model_path, "Output model json path");
    fit_cmd->add_option("--experts", fit.experts, "Number of experts")->capture_default_str();
    fit_cmd->add_option("--max-iters", fit.max_iters, "EM iteration cap")
        ->capture_default_str();
    fit_cmd->add_option("--tol", fit.tol, "Relative log-likelihood tolerance")
        ->capture_default_str();
    fit_cmd->add_option("--eta", fit.eta, "Gating gradient step size")->capture_default_str();
    fit_cmd->add_option("--gating-steps", fit.gating_steps, "Gating ascent steps per M-step")
        ->capture_default_str();
    fit_cmd->add_option("--variance-floor", fit.variance_floor, "Minimum expert variance")
        ->capture_default_str();
    fit_cmd->add_option("--init", fit.init, "Initialization: kmeans or random")
        ->capture_default_str();
    fit_cmd->add_option("--seed", fit.seed, "Random seed")->capture_default_str();
    fit_cmd->add_option("--threads", fit.threads, "Worker threads")->capture_default_str();
    add_header_flag(fit_cmd, fit.header);
    add_config_flag(fit_cmd, fit.config);
    fit_cmd->callback([&] { rc = morecli::cmd_fit(fit, fit_cmd); });

    morecli::PredictOptions predict;
    auto* predict_cmd = app.add_subcommand("predict", "Predict targets with a saved model");
    predict_cmd->add_option("--model", predict.model_path, "Model json path");
    predict_cmd->add_option("--x", predict.x_path, "Input matrix (csv or bin)");
    predict_cmd->add_option("--out", predict.out_path, "Output predictions (csv or bin)");
    add_header_flag(predict_cmd, predict.header);
    add_config_flag(predict_cmd, predict.config);
    predict_cmd->callback([&] { rc = morecli::cmd_predict(predict, predict_cmd); });

    morecli::EvaluateOptions evaluate;
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "Score prediction files against ground truth");
    evaluate_cmd->add_option("--y", evaluate.y_path, "Ground-truth matrix (csv or bin)");
    evaluate_cmd->add_option("--pred", evaluate.preds,
                             "Prediction file as NAME=PATH (repeatable)");
    evaluate_cmd->add_option("--out", evaluate.out_dir, "Output directory");
    add_header_flag(evaluate_cmd, evaluate.header);
    add_config_flag(evaluate_cmd, evaluate.config);
    evaluate_cmd->callback([&] { rc = morecli::cmd_evaluate(evaluate, evaluate_cmd); });

    morecli::SelectKOptions select;
    auto* select_cmd =
        app.add_subcommand("select-k", "Sweep expert counts and rank them by BIC");
    select_cmd->add_option("--x", select.x_path, "Input matrix (csv or bin)");
    select_cmd->add_option("--y", select.y_path, "Target matrix (csv or bin)");
    select_cmd->add_option("--out", select.out_dir, "Output directory");
    select_cmd->add_option("--k-min", select.k_min, "Smallest expert count")
        ->capture_default_str();
    select_cmd->add_option("--k-max", select.k_max, "Largest expert count")
        ->capture_default_str();
    select_cmd->add_option("--restarts", select.restarts, "Random restarts per k")
        ->capture_default_str();
    select_cmd->add_option("--max-iters", select.max_iters, "EM iteration cap")
        ->capture_default_str();
    select_cmd->add_option("--tol", select.tol, "Relative log-likelihood tolerance")
        ->capture_default_str();
    select_cmd->add_option("--eta", select.eta, "Gating gradient step size")
        ->capture_default_str();
    select_cmd
        ->add_option("--gating-steps", select.gating_steps, "Gating ascent steps per M-step")
        ->capture_default_str();
    select_cmd->add_option("--variance-floor", select.variance_floor, "Minimum expert variance")
        ->capture_default_str();
    select_cmd->add_option("--init", select.init, "Initialization: kmeans or random")
        ->capture_default_str();
    select_cmd->add_option("--seed", select.seed, "Random seed")->capture_default_str();
    select_cmd->add_option("--threads", select.threads, "Worker threads")
        ->capture_default_str();
    add_header_flag(select_cmd, select.header);
    add_config_flag(select_cmd, select.config);
    select_cmd->callback([&] { rc = morecli::cmd_select_k(select, select_cmd); });

    morecli::RidgeOptions ridge;
    auto* ridge_cmd =
        app.add_subcommand("baseline-ridge", "Fit the ridge regression baseline");
    ridge_cmd->add_option("--x", ridge.x_path, "Input matrix (csv or bin)");
    ridge_cmd->add_option("--y", ridge.y_path, "Target matrix (csv or bin)");
    ridge_cmd->add_option("--model", ridge.model_path, "Output model json path");
    ridge_cmd->add_option("--lambda", ridge.lambda, "Ridge penalty")->capture_default_str();
    ridge_cmd->add_option("--grid", ridge.grid,
                          "Comma-separated lambdas; picks the best on a holdout split");
    ridge_cmd->add_option("--holdout", ridge.holdout, "Holdout fraction for --grid")
        ->capture_default_str();
    ridge_cmd->add_option("--seed", ridge.seed, "Random seed for the holdout split")
        ->capture_default_str();
    add_header_flag(ridge_cmd, ridge.header);
    add_config_flag(ridge_cmd, ridge.config);
    ridge_cmd->callback([&] { rc = morecli::cmd_baseline_ridge(ridge, ridge_cmd); });

    morecli::AnalyzeOptions analyze;
    auto* analyze_cmd =
        app.add_subcommand("analyze", "Assign samples to experts and rank atlas regions");
    analyze_cmd->add_option("--model", analyze.model_path, "Mixture model json path");
    analyze_cmd->add_option("--x", analyze.x_path, "Input matrix (csv or bin)");
    analyze_cmd->add_option("--y", analyze.y_path, "Target matrix (csv or bin)");
    analyze_cmd->add_option("--atlas", analyze.atlas_path, "Atlas csv (dim_index,region)");
    analyze_cmd->add_option("--out", analyze.out_dir, "Output directory");
    analyze_cmd->add_option("--mode", analyze.mode, "Assignment mode: gate or responsibility")
        ->capture_default_str();
    analyze_cmd
        ->add_option("--aggregation", analyze.aggregation, "Region aggregation: mean or sum")
        ->capture_default_str();
    analyze_cmd
        ->add_option("--variance-target", analyze.variance_target,
                     "PCA explained-variance target")
        ->capture_default_str();
    analyze_cmd
        ->add_option("--score-threshold", analyze.score_threshold,
                     "Minimum region importance score")
        ->capture_default_str();
    add_header_flag(analyze_cmd, analyze.header);
    add_config_flag(analyze_cmd, analyze.config);
    analyze_cmd->callback([&] { rc = morecli::cmd_analyze(analyze, analyze_cmd); });

    morecli::ClusterOptions cluster;
    auto* cluster_cmd = app.add_subcommand("cluster", "K-means cluster rows of a matrix");
    cluster_cmd->add_option("--input", cluster.input_path, "Matrix to cluster (csv or bin)");
    cluster_cmd->add_option("--out", cluster.out_dir, "Output directory");
    cluster_cmd->add_option("--k", cluster.k, "Number of clusters")->capture_default_str();
    cluster_cmd->add_option("--metric", cluster.metric, "Distance: euclidean or cosine")
        ->capture_default_str();
    cluster_cmd->add_option("--seed", cluster.seed, "Random seed")->capture_default_str();
    add_header_flag(cluster_cmd, cluster.header);
    add_config_flag(cluster_cmd, cluster.config);
    cluster_cmd->callback([&] { rc = morecli::cmd_cluster(cluster, cluster_cmd); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const more::ArgumentError& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 2;
    } catch (const more::Error& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return rc;
}
