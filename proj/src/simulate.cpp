#include "sdetv/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "sdetv/errors.hpp"

namespace sdetv {

double NoisePath::total(int component) const {
    double sum = 0.0;
    const int n = n_steps();
    for (int k = 0; k < n; ++k) sum += increment(k, component);
    return sum;
}

NoisePath brownian_increments(int n_steps, double dt, int dim, std::uint64_t seed,
                              std::uint64_t stream) {
    if (n_steps < 1) throw PreconditionError("brownian_increments requires n_steps >= 1");
    if (!(dt > 0.0)) throw PreconditionError("brownian_increments requires dt > 0");
    if (dim < 1) throw PreconditionError("brownian_increments requires dim >= 1");
    NoisePath path;
    path.dim = dim;
    path.dt = dt;
    path.increments.resize(static_cast<std::size_t>(n_steps) * dim);
    const CounterRng rng(seed, stream);
    const double scale = std::sqrt(dt);
    for (std::size_t i = 0; i < path.increments.size(); ++i)
        path.increments[i] = scale * rng.normal(i);
    return path;
}

namespace {

void check_grid(double t, int n_steps, const NoisePath& noise, const char* who) {
    if (noise.dim != 1) throw PreconditionError(std::string(who) + ": noise must be 1D");
    if (noise.n_steps() != n_steps)
        throw PreconditionError(std::string(who) + ": noise does not cover n_steps increments");
    const double expected_dt = t / n_steps;
    if (std::abs(noise.dt - expected_dt) > 1e-12 * std::max(1.0, expected_dt))
        throw PreconditionError(std::string(who) + ": noise step size does not match t/n_steps");
}

}  // namespace

double euler_path(const SdeModel& model, double x, double t, int n_steps, const NoisePath& noise) {
    if (model.dimension != 1) throw PreconditionError("euler_path requires a 1D model");
    if (n_steps < 1) throw PreconditionError("euler_path requires n_steps >= 1");
    check_grid(t, n_steps, noise, "euler_path");
    const double dt = t / n_steps;
    double y = x;
    for (int k = 0; k < n_steps; ++k) {
        const double tk = k * dt;
        y += model.drift(tk, y) * dt + model.diffusion(tk, y) * noise.increment(k);
    }
    return y;
}

double gbm_exact(double x, double sigma, double t, const NoisePath& noise) {
    if (!(x > 0.0)) throw PreconditionError("gbm_exact requires x > 0");
    if (!(sigma > 0.0)) throw PreconditionError("gbm_exact requires sigma > 0");
    check_grid(t, noise.n_steps(), noise, "gbm_exact");
    return x * std::exp(sigma * noise.total());
}

std::vector<std::pair<double, double>> coupled_terminals(const ModelPair& pair, double x, double t,
                                                         int n_steps, long n_paths,
                                                         std::uint64_t seed) {
    std::vector<std::pair<double, double>> out;
    if (n_paths <= 0) return out;
    out.reserve(static_cast<std::size_t>(n_paths));
    auto terminal = [&](const SdeModel& m, const NoisePath& w) {
        if (m.exact_law == ExactLaw::gbm_lognormal) return gbm_exact(x, m.gbm_sigma, t, w);
        return euler_path(m, x, t, n_steps, w);
    };
    for (long j = 0; j < n_paths; ++j) {
        const NoisePath w =
            brownian_increments(n_steps, t / n_steps, 1, seed, static_cast<std::uint64_t>(j));
        out.emplace_back(terminal(pair.model_x, w), terminal(pair.model_y, w));
    }
    return out;
}

McEstimate mc_lp_distance(const std::vector<std::pair<double, double>>& pairs, double p) {
    if (pairs.empty()) throw PreconditionError("mc_lp_distance requires a nonempty sample");
    if (!(p >= 1.0)) throw PreconditionError("mc_lp_distance requires p >= 1");
    const double n = static_cast<double>(pairs.size());
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& [a, b] : pairs) {
        const double d = std::pow(std::abs(a - b), p);
        sum += d;
        sum_sq += d * d;
    }
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    const double se_mean = std::sqrt(var / n);
    McEstimate est;
    est.n_paths = static_cast<long>(pairs.size());
    est.value = std::pow(mean, 1.0 / p);
    // Delta method through m -> m^{1/p}; for p=1 this is the plain std error.
    est.std_error = (mean > 0.0) ? se_mean * std::pow(mean, 1.0 / p - 1.0) / p : se_mean;
    return est;
}

}  // namespace sdetv
