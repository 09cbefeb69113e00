#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sdetv {

enum class ExperimentKind {
    weights,
    counterexample,
    tv_curve,
    w1_curve,
    smoothing_order,
    fokker_planck,
    envelope,
};

const char* experiment_name(ExperimentKind kind);

/// Effective settings of one run after config-file and flag merging.
/// Defaults here are the documented experiment defaults.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::counterexample;

    // model / pair
    std::string model;                  // catalog name
    std::vector<double> params;
    std::string model2;                 // empty: one-step Euler proxy of `model`
    std::vector<double> params2;
    double x = 1.0;
    double horizon = 1.0;

    // grids
    int k_min = 8;                      // t = 2^{-k}, k = k_min..k_max
    int k_max = 20;
    std::vector<double> t_list;         // explicit t grid override
    int j_min = 3;                      // eps = 2^{-j} for smoothing-order
    int j_max = 10;
    double t = 0.05;                    // single-t experiments

    // smoothing-order / weights
    int order = 3;
    double indicator_a = 0.3;
    double law_mean = 0.0;
    double law_var = 1.0;

    // counterexample
    double sigma = 1.0;

    // budgets
    long n_paths = 100'000;
    int n_steps = 64;
    long gate_paths = 4'000'000;
    int gate_steps = 64;
    double gate_threshold = 0.01;
    bool gate_enabled = true;
    int grid_points = 4001;
    int time_steps = 200;
    std::optional<double> grid_lo;
    std::optional<double> grid_hi;
    double quad_tol = 1e-10;
    std::string method = "closed-form";  // tv-curve: closed-form | fokker-planck
    int skip_largest = 2;

    // global
    std::uint64_t seed = 1;
    std::string out;                    // CSV path; empty -> "<experiment>.csv"
    int threads = 1;

    std::string out_path() const;
    void validate() const;  // throws ConfigError on bad values
};

struct ExperimentResult {
    double headline = 0.0;       // slope or residual
    std::string headline_line;   // what the CLI prints
};

// Runs the experiment, writes the CSV and the "<out>.manifest" echo next to
// it, and returns the headline number.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace sdetv
