#include "sdetv/rates.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <ostream>
#include <thread>

#include "sdetv/errors.hpp"
#include "sdetv/rng.hpp"

namespace sdetv {

namespace {

// Run job(i) for i in [0, n) on up to `threads` workers. Results land in
// pre-sized slots, so the schedule never affects the output.
template <typename Job>
void run_indexed(int n, int threads, Job&& job) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                job(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

RateFit fit_slope(const RateCurve& curve, std::size_t begin, std::size_t end) {
    end = std::min(end, curve.points.size());
    std::vector<double> xs, ys;
    for (std::size_t i = begin; i < end; ++i) {
        const RatePoint& p = curve.points[i];
        if (!p.oracle_ok) continue;
        if (!(p.value > 0.0))
            throw SolverError("fit_slope: nonpositive value in window (distance underflow?)");
        xs.push_back(std::log(p.t));
        ys.push_back(std::log(p.value));
    }
    if (xs.size() < 3) throw PreconditionError("fit_slope needs at least 3 usable points");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    RateFit fit;
    fit.window_begin = begin;
    fit.window_end = end;
    const double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double pred = fit.slope * xs[i] + fit.intercept;
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

RateFit fit_slope_default(const RateCurve& curve, int skip_largest) {
    // Points are ordered with t decreasing, so the pre-asymptotic points to
    // drop sit at the front.
    std::size_t begin = 0;
    if (skip_largest > 0 && curve.points.size() > static_cast<std::size_t>(skip_largest) + 2)
        begin = static_cast<std::size_t>(skip_largest);
    return fit_slope(curve, begin, curve.points.size());
}

std::vector<double> dyadic_grid(int k_min, int k_max) {
    if (k_min > k_max) throw ConfigError("dyadic grid requires k_min <= k_max");
    std::vector<double> ts;
    for (int k = k_min; k <= k_max; ++k) ts.push_back(std::ldexp(1.0, -k));
    return ts;
}

RateCurve counterexample_curve(double x, double sigma, const std::vector<double>& t_grid,
                               double quad_tol) {
    if (!(x > 0.0) || !(sigma > 0.0))
        throw PreconditionError("counterexample_curve requires x > 0 and sigma > 0");
    RateCurve curve;
    curve.experiment = "counterexample";
    curve.method = "closed-form";
    curve.points.reserve(t_grid.size());
    for (double t : t_grid) {
        if (!(t > 0.0)) throw PreconditionError("counterexample_curve requires t > 0");
        const auto exact = ClosedFormDensity::gbm_lognormal(x, sigma, t);
        const auto euler =
            ClosedFormDensity::gaussian(x * (1.0 + 0.5 * sigma * sigma * t), sigma * sigma * x * x * t);
        curve.points.push_back({t, tv_densities(exact, euler, quad_tol), quad_tol, true});
    }
    return curve;
}

namespace {

double tv_point(const ModelPair& pair, double x, double t, const TvCurveOptions& opts,
                std::uint64_t point_seed, bool* gate_ok) {
    const bool x_closed = pair.model_x.exact_law != ExactLaw::none;
    const bool y_closed = pair.model_y.exact_law != ExactLaw::none;
    *gate_ok = true;
    if (opts.method == TvMethod::closed_form) {
        if (!x_closed || !y_closed)
            throw PreconditionError("tv_curve closed-form method needs closed-form laws for '" +
                                    pair.model_x.name + "' and '" + pair.model_y.name + "'");
        return tv_densities(exact_density(pair.model_x, x, t), exact_density(pair.model_y, x, t),
                            opts.quad_tol);
    }
    // Fokker-Planck route: the true law (model_x) is always solved through
    // the PDE, closed form or not, so the route stays an independent check;
    // the proxy side keeps its closed form when it has one. Every solved
    // density must pass the Monte Carlo histogram oracle.
    auto solve_side = [&](const SdeModel& m, std::uint64_t gate_stream) {
        DensityGrid grid = fokker_planck_solve(m, x, t, opts.fp);
        if (opts.gate.enabled) {
            const double gap = mc_histogram_tv(m, x, t, grid, opts.gate, gate_stream);
            if (gap > opts.gate.threshold) {
                *gate_ok = false;
                std::cerr << "warning: histogram oracle gap " << gap << " exceeds "
                          << opts.gate.threshold << " for model '" << m.name << "' at t=" << t
                          << "; point excluded from fit\n";
            }
        }
        return grid;
    };
    const DensityGrid gx = solve_side(pair.model_x, point_seed);
    if (y_closed) return tv_densities(gx, exact_density(pair.model_y, x, t));
    const DensityGrid gy = solve_side(pair.model_y, point_seed + 1);
    return tv_densities(gx, gy);
}

}  // namespace

RateCurve tv_curve(const ModelPair& pair, double x, const std::vector<double>& t_grid,
                   const TvCurveOptions& opts) {
    RateCurve curve;
    curve.experiment = "tv-curve";
    curve.method = opts.method == TvMethod::closed_form ? "closed-form" : "fokker-planck";
    curve.seed = opts.seed;
    curve.points.resize(t_grid.size());
    run_indexed(static_cast<int>(t_grid.size()), opts.threads, [&](int i) {
        const double t = t_grid[static_cast<std::size_t>(i)];
        bool ok = true;
        const double value = tv_point(pair, x, t, opts, derive_seed(opts.seed, i), &ok);
        curve.points[static_cast<std::size_t>(i)] = {t, value, opts.quad_tol, ok};
    });
    return curve;
}

RateCurve w1_curve(const ModelPair& pair, double x, const std::vector<double>& t_grid,
                   const W1CurveOptions& opts) {
    RateCurve curve;
    curve.experiment = "w1-curve";
    curve.seed = opts.seed;
    const bool closed =
        pair.model_x.exact_law != ExactLaw::none && pair.model_y.exact_law != ExactLaw::none;
    curve.method = closed ? "cdf" : "coupled-mc";
    curve.points.resize(t_grid.size());
    run_indexed(static_cast<int>(t_grid.size()), opts.threads, [&](int i) {
        const double t = t_grid[static_cast<std::size_t>(i)];
        RatePoint pt{t, 0.0, 0.0, true};
        if (closed) {
            pt.value = w1_cdf(exact_density(pair.model_x, x, t), exact_density(pair.model_y, x, t));
        } else {
            const int steps = effective_steps(t, opts.n_steps, opts.max_step);
            const auto pairs =
                coupled_terminals(pair, x, t, steps, opts.n_paths, derive_seed(opts.seed, i));
            const McEstimate est = mc_lp_distance(pairs, 1.0);
            pt.value = est.value;
            pt.std_error = est.std_error;
        }
        curve.points[static_cast<std::size_t>(i)] = pt;
    });
    return curve;
}

RateCurve smoothing_order_curve(const TestFunction& f, const ClosedFormDensity& gaussian_law,
                                int r, const std::vector<double>& eps_grid) {
    RateCurve curve;
    curve.experiment = "smoothing-order";
    curve.method = "closed-form";
    const double exact = f.smoothed_gaussian_mean(gaussian_law.gauss_mean(),
                                                  gaussian_law.gauss_var(), 0.0);
    curve.points.reserve(eps_grid.size());
    for (double eps : eps_grid) {
        const double err = std::abs(rr_smoothed_expectation(f, gaussian_law, eps, r) - exact);
        curve.points.push_back({eps, err, 0.0, true});
    }
    return curve;
}

double mc_histogram_tv(const SdeModel& model, double x, double t, const DensityGrid& grid,
                       const GateOptions& gate, std::uint64_t seed) {
    const long n = gate.n_paths;
    if (n < 2) throw PreconditionError("mc_histogram_tv needs at least 2 paths");
    std::vector<double> sample(static_cast<std::size_t>(n));
    const int n_steps = effective_steps(t, gate.n_steps, gate.max_step);
    const double dt = t / n_steps;
    const double sqrt_dt = std::sqrt(dt);
    for (long j = 0; j < n; ++j) {
        const CounterRng rng(seed, static_cast<std::uint64_t>(j));
        double y = x;
        for (int k = 0; k < n_steps; ++k) {
            const double tk = k * dt;
            y += model.drift(tk, y) * dt +
                 model.diffusion(tk, y) * sqrt_dt * rng.normal(static_cast<std::uint64_t>(k));
        }
        sample[static_cast<std::size_t>(j)] = y;
    }
    std::sort(sample.begin(), sample.end());
    const double q25 = sample[static_cast<std::size_t>(0.25 * (n - 1))];
    const double q75 = sample[static_cast<std::size_t>(0.75 * (n - 1))];
    const double width = 2.0 * (q75 - q25) / std::cbrt(static_cast<double>(n));
    if (!(width > 0.0)) throw SolverError("mc_histogram_tv: degenerate sample");
    const double lo = sample.front();
    const long n_bins = static_cast<long>(std::ceil((sample.back() - lo) / width)) + 1;
    std::vector<long> counts(static_cast<std::size_t>(n_bins), 0);
    for (double v : sample) {
        long b = static_cast<long>((v - lo) / width);
        if (b >= n_bins) b = n_bins - 1;
        ++counts[static_cast<std::size_t>(b)];
    }
    double tv = 0.0;
    double grid_mass_in_bins = 0.0;
    for (long b = 0; b < n_bins; ++b) {
        const double a = lo + b * width;
        const double mass = grid.cdf_at(a + width) - grid.cdf_at(a);
        grid_mass_in_bins += mass;
        tv += std::abs(static_cast<double>(counts[static_cast<std::size_t>(b)]) / n - mass);
    }
    // Grid mass outside the sampled range counts as discrepancy too.
    tv += std::abs(grid.mass() - grid_mass_in_bins);
    return tv;
}

void write_csv(const RateCurve& curve, std::ostream& os) {
    os << "t,value,stderr\n";
    os.precision(17);
    for (const RatePoint& p : curve.points)
        os << p.t << "," << p.value << "," << p.std_error << "\n";
}

void write_csv(const RateCurve& curve, const RateFit& fit, std::ostream& os) {
    write_csv(curve, os);
    os << "# slope=" << fit.slope << ", intercept=" << fit.intercept << ", r2=" << fit.r2 << "\n";
}

}  // namespace sdetv
