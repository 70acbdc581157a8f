// commands.hpp -- one options struct and entry point per subcommand.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace morecli {

struct SynthOptions {
    int experts = 3;
    long in_dim = 4;
    long out_dim = 3;
    long samples = 2000;
    double gating_scale = 3.0;
    double noise_std = 0.1;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string config;
};

struct FitOptions {
    std::string x_path, y_path, model_path;
    int experts = 1;
    int max_iters = 200;
    double tol = 1e-10;
    double eta = 0.1;
    int gating_steps = 5;
    double variance_floor = 1e-6;
    std::string init = "kmeans";
    std::uint64_t seed = 0;
    int threads = 1;
    bool header = false;
    std::string config;
};

struct PredictOptions {
    std::string model_path, x_path, out_path;
    bool header = false;
    std::string config;
};

struct EvaluateOptions {
    std::string y_path;
    std::vector<std::string> preds;  // NAME=PATH
    std::string out_dir;
    bool header = false;
    std::string config;
};

struct SelectKOptions {
    std::string x_path, y_path, out_dir;
    int k_min = 1;
    int k_max = 5;
    int restarts = 3;
    int max_iters = 200;
    double tol = 1e-10;
    double eta = 0.1;
    int gating_steps = 5;
    double variance_floor = 1e-6;
    std::string init = "kmeans";
    std::uint64_t seed = 0;
    int threads = 1;
    bool header = false;
    std::string config;
};

struct RidgeOptions {
    std::string x_path, y_path, model_path;
    double lambda = 1.0;
    std::string grid;  // comma-separated lambdas; empty = no search
    double holdout = 0.2;
    std::uint64_t seed = 0;
    bool header = false;
    std::string config;
};

struct AnalyzeOptions {
    std::string model_path, x_path, y_path, atlas_path, out_dir;
    std::string mode = "gate";
    std::string aggregation = "mean";
    double variance_target = 0.85;
    double score_threshold = 0.2;
    bool header = false;
    std::string config;
};

struct ClusterOptions {
    std::string input_path, out_dir;
    int k = 5;
    std::string metric = "cosine";
    std::uint64_t seed = 0;
    bool header = false;
    std::string config;
};

int cmd_synth(SynthOptions& opt, const CLI::App* cmd);
int cmd_fit(FitOptions& opt, const CLI::App* cmd);
int cmd_predict(PredictOptions& opt, const CLI::App* cmd);
int cmd_evaluate(EvaluateOptions& opt, const CLI::App* cmd);
int cmd_select_k(SelectKOptions& opt, const CLI::App* cmd);
int cmd_baseline_ridge(RidgeOptions& opt, const CLI::App* cmd);
int cmd_analyze(AnalyzeOptions& opt, const CLI::App* cmd);
int cmd_cluster(ClusterOptions& opt, const CLI::App* cmd);

}  // namespace morecli
