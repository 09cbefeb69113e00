#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sdetv/model.hpp"
#include "sdetv/rng.hpp"

namespace sdetv {

/// Brownian increments on a uniform grid, pre-scaled by sqrt(dt).
/// Deterministic given (seed, stream, n_steps, dt, dim).
struct NoisePath {
    int dim = 1;
    double dt = 0.0;
    std::vector<double> increments;  // n_steps * dim, step-major

    int n_steps() const { return dim == 0 ? 0 : static_cast<int>(increments.size()) / dim; }
    double increment(int step, int component = 0) const {
        return increments[static_cast<std::size_t>(step) * dim + component];
    }
    // W_t of one component: sum of its increments.
    double total(int component = 0) const;
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
};

NoisePath brownian_increments(int n_steps, double dt, int dim, std::uint64_t seed,
                              std::uint64_t stream = 0);

// Euler-Maruyama recursion x_{k+1} = x_k + b(t_k,x_k)dt + sigma(t_k,x_k)dW_k
// over the grid carried by `noise`; returns the terminal state. The noise
// must cover n_steps of size t/n_steps.
double euler_path(const SdeModel& model, double x, double t, int n_steps, const NoisePath& noise);

// Exact geometric Brownian motion terminal x*exp(sigma*W_t).
double gbm_exact(double x, double sigma, double t, const NoisePath& noise);

struct CouplingOptions {
    int n_steps = 64;          // fine grid for the true law (also carries the proxy)
    std::uint64_t seed = 1;
};

// Synchronous coupling: both models consume the same Brownian path. GBM is
// sampled exactly from W_t; everything else runs the fine Euler grid.
std::vector<std::pair<double, double>> coupled_terminals(const ModelPair& pair, double x, double t,
                                                         int n_steps, long n_paths,
                                                         std::uint64_t seed);

// (E|X - Y|^p)^{1/p} with delta-method standard error.
McEstimate mc_lp_distance(const std::vector<std::pair<double, double>>& pairs, double p);

}  // namespace sdetv
