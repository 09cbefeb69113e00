#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdetv/distance.hpp"
#include "sdetv/model.hpp"
#include "sdetv/simulate.hpp"

namespace sdetv {

struct RatePoint {
    double t = 0.0;
    double value = 0.0;
    double std_error = 0.0;
    bool oracle_ok = true;  // histogram gate verdict; flagged points leave the fit
};

struct RateCurve {
    std::string experiment;
    std::string method;
    std::uint64_t seed = 0;
    std::vector<RatePoint> points;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t window_begin = 0;  // [begin, end) indices of the fitted points
    std::size_t window_end = 0;
};

// Least squares on (log t, log value) over points [begin, end); requires at
// least 3 usable points, all positive. Gate-flagged points are skipped.
RateFit fit_slope(const RateCurve& curve, std::size_t begin, std::size_t end);

// Default window: drop the `skip_largest` largest t (pre-asymptotic), fit the
// rest.
RateFit fit_slope_default(const RateCurve& curve, int skip_largest = 2);

// Dyadic grid {2^{-k}, k = k_min..k_max}, decreasing in t.
std::vector<double> dyadic_grid(int k_min, int k_max);

// Exact TV between the gbm law x e^{sigma W_t} and its one-step Euler
// gaussian, one quadrature per grid point (no Monte Carlo).
RateCurve counterexample_curve(double x, double sigma, const std::vector<double>& t_grid,
                               double quad_tol = 1e-10);

enum class TvMethod { closed_form, fokker_planck };

struct GateOptions {
    bool enabled = true;
    long n_paths = 4'000'000;       // see README: 1e6 leaves the gate noise-bound
    int n_steps = 64;               // floor; effective count is max(n_steps, ceil(t/max_step))
    double max_step = 1.0 / 1024.0;
    double threshold = 0.01;
};

// Fine-Euler step count for the sampling oracles.
inline int effective_steps(double t, int floor_steps, double max_step) {
    const double needed = std::ceil(t / max_step);
    return needed > floor_steps ? static_cast<int>(needed) : floor_steps;
}

struct TvCurveOptions {
    TvMethod method = TvMethod::closed_form;
    FpGridSpec fp;
    GateOptions gate;
    std::uint64_t seed = 1;
    double quad_tol = 1e-10;
    int threads = 1;
};

// TV(model_x law, model_y law) over the t grid. closed_form needs both laws
// in closed form; fokker_planck solves the forward PDE for any side without
// one and cross-checks every solved density against the Monte Carlo
// histogram oracle (failures flag the point and emit a warning).
RateCurve tv_curve(const ModelPair& pair, double x, const std::vector<double>& t_grid,
                   const TvCurveOptions& opts);

struct W1CurveOptions {
    long n_paths = 100'000;
    int n_steps = 64;               // floor; effective count is max(n_steps, ceil(t/max_step))
    double max_step = 1.0 / 1024.0;
    std::uint64_t seed = 1;
    int threads = 1;
};

// W1 over the t grid: the exact CDF integral when both laws are closed-form,
// otherwise the coupled Monte Carlo upper bound E|X_t - Y_t|.
RateCurve w1_curve(const ModelPair& pair, double x, const std::vector<double>& t_grid,
                   const W1CurveOptions& opts);

// |rr_smoothed_expectation - E f(Z)| per epsilon; exact arithmetic, zero
// standard errors.
RateCurve smoothing_order_curve(const TestFunction& f, const ClosedFormDensity& gaussian_law,
                                int r, const std::vector<double>& eps_grid);

// Histogram TV oracle: n_paths fine-Euler samples of the model's time-t law,
// Freedman-Diaconis bins, TV between the binned sample and the grid density
// integrated over the same bins.
double mc_histogram_tv(const SdeModel& model, double x, double t, const DensityGrid& grid,
                       const GateOptions& gate, std::uint64_t seed);

// CSV: header t,value,stderr; fit appended as comment lines.
void write_csv(const RateCurve& curve, const RateFit& fit, std::ostream& os);
void write_csv(const RateCurve& curve, std::ostream& os);  // no fit comments

}  // namespace sdetv
