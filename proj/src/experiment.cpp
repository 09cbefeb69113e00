#include "sdetv/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sdetv/density.hpp"
#include "sdetv/distance.hpp"
#include "sdetv/errors.hpp"
#include "sdetv/model.hpp"
#include "sdetv/rates.hpp"
#include "sdetv/romberg.hpp"

namespace sdetv {

const char* experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::weights: return "weights";
        case ExperimentKind::counterexample: return "counterexample";
        case ExperimentKind::tv_curve: return "tv-curve";
        case ExperimentKind::w1_curve: return "w1-curve";
        case ExperimentKind::smoothing_order: return "smoothing-order";
        case ExperimentKind::fokker_planck: return "fokker-planck";
        case ExperimentKind::envelope: return "envelope";
    }
    return "?";
}

std::string ExperimentConfig::out_path() const {
    return out.empty() ? std::string(experiment_name(kind)) + ".csv" : out;
}

void ExperimentConfig::validate() const {
    if (k_min > k_max) throw ConfigError("k_min must not exceed k_max");
    if (j_min > j_max) throw ConfigError("j_min must not exceed j_max");
    if (n_paths <= 0) throw ConfigError("n_paths must be positive");
    if (n_steps <= 0) throw ConfigError("n_steps must be positive");
    if (gate_paths <= 0) throw ConfigError("gate_paths must be positive");
    if (grid_points <= 0) throw ConfigError("grid_points must be positive");
    if (time_steps <= 0) throw ConfigError("time_steps must be positive");
    if (threads <= 0) throw ConfigError("threads must be positive");
    if (order < 1) throw ConfigError("order must be >= 1");
    if (!(quad_tol > 0.0)) throw ConfigError("quad_tol must be positive");
    if (method != "closed-form" && method != "fokker-planck")
        throw ConfigError("method must be closed-form or fokker-planck");
    if (grid_lo.has_value() != grid_hi.has_value())
        throw ConfigError("grid_lo and grid_hi must be given together");
    const bool needs_model = kind == ExperimentKind::tv_curve || kind == ExperimentKind::w1_curve ||
                             kind == ExperimentKind::fokker_planck ||
                             kind == ExperimentKind::envelope;
    if (needs_model && model.empty()) throw ConfigError("missing required key: model");
}

namespace {

std::vector<double> t_grid_of(const ExperimentConfig& cfg) {
    if (!cfg.t_list.empty()) {
        for (double t : cfg.t_list)
            if (!(t > 0.0)) throw ConfigError("t_list entries must be positive");
        return cfg.t_list;
    }
    return dyadic_grid(cfg.k_min, cfg.k_max);
}

ModelPair pair_of(const ExperimentConfig& cfg) {
    SdeModel first = builtin_model(cfg.model, cfg.params);
    SdeModel second = cfg.model2.empty() ? euler_proxy(first, cfg.x)
                                         : builtin_model(cfg.model2, cfg.params2);
    return ModelPair(std::move(first), std::move(second), cfg.x, cfg.horizon);
}

FpGridSpec fp_spec_of(const ExperimentConfig& cfg) {
    FpGridSpec spec;
    spec.n_points = cfg.grid_points;
    spec.n_time_steps = cfg.time_steps;
    spec.lo = cfg.grid_lo;
    spec.hi = cfg.grid_hi;
    return spec;
}

void write_manifest(const ExperimentConfig& cfg, double wall_seconds) {
    std::ofstream os(cfg.out_path() + ".manifest");
    os.precision(17);
    os << "experiment = " << experiment_name(cfg.kind) << "\n";
    os << "version = 0.1.0\n";
    os << "seed = " << cfg.seed << "\n";
    os << "threads = " << cfg.threads << "\n";
    os << "out = " << cfg.out_path() << "\n";
    os << "model = " << cfg.model << "\n";
    os << "params =";
    for (double p : cfg.params) os << " " << p;
    os << "\n";
    os << "model2 = " << (cfg.model2.empty() ? "(euler-proxy)" : cfg.model2) << "\n";
    os << "x = " << cfg.x << "\n";
    os << "sigma = " << cfg.sigma << "\n";
    os << "t = " << cfg.t << "\n";
    os << "k_min = " << cfg.k_min << "\nk_max = " << cfg.k_max << "\n";
    os << "j_min = " << cfg.j_min << "\nj_max = " << cfg.j_max << "\n";
    os << "order = " << cfg.order << "\n";
    os << "indicator_a = " << cfg.indicator_a << "\n";
    os << "law_mean = " << cfg.law_mean << "\nlaw_var = " << cfg.law_var << "\n";
    os << "method = " << cfg.method << "\n";
    os << "n_paths = " << cfg.n_paths << "\nn_steps = " << cfg.n_steps << "\n";
    os << "gate_paths = " << cfg.gate_paths << "\ngate_steps = " << cfg.gate_steps << "\n";
    os << "gate_threshold = " << cfg.gate_threshold << "\n";
    os << "gate_enabled = " << (cfg.gate_enabled ? 1 : 0) << "\n";
    os << "grid_points = " << cfg.grid_points << "\ntime_steps = " << cfg.time_steps << "\n";
    if (cfg.grid_lo) os << "grid_lo = " << *cfg.grid_lo << "\ngrid_hi = " << *cfg.grid_hi << "\n";
    os << "quad_tol = " << cfg.quad_tol << "\n";
    os << "skip_largest = " << cfg.skip_largest << "\n";
    os << "wall_seconds = " << wall_seconds << "\n";
}

ExperimentResult run_weights(const ExperimentConfig& cfg) {
    const RombergWeights wt = weights(cfg.order);
    const auto residuals = vandermonde_residual(wt);
    std::ofstream os(cfg.out_path());
    os << "i,n_i,w_exact,w_float\n";
    os.precision(17);
    for (int i = 0; i < wt.order; ++i)
        os << (i + 1) << "," << wt.refiners[i] << "," << to_string(wt.w[i]) << ","
           << wt.w_float(i + 1) << "\n";
    double max_residual = 0.0;
    std::ostringstream line;
    line << "weights r=" << wt.order << ":";
    for (int i = 0; i < wt.order; ++i) line << " " << to_string(wt.w[i]);
    line << "\nresiduals:";
    for (const auto& res : residuals) {
        line << " " << to_string(res);
        max_residual = std::max(max_residual, std::abs(res.get_d()));
    }
    ExperimentResult out;
    out.headline = max_residual;
    out.headline_line = line.str() + "\nresidual=" + std::to_string(max_residual);
    return out;
}

ExperimentResult curve_result(const RateCurve& curve, const ExperimentConfig& cfg,
                              std::size_t fit_begin) {
    std::ofstream os(cfg.out_path());
    ExperimentResult out;
    std::ostringstream line;
    line.precision(10);
    std::size_t usable = 0;
    for (std::size_t i = fit_begin; i < curve.points.size(); ++i)
        if (curve.points[i].oracle_ok) ++usable;
    if (usable >= 3) {
        const RateFit fit = fit_slope(curve, fit_begin, curve.points.size());
        write_csv(curve, fit, os);
        out.headline = fit.slope;
        line << "slope=" << fit.slope << " r2=" << fit.r2 << " method=" << curve.method;
    } else {
        // Too few points for a slope: report the values themselves.
        write_csv(curve, os);
        out.headline = curve.points.empty() ? 0.0 : curve.points.back().value;
        line << "value=" << out.headline << " method=" << curve.method
             << " (grid too small for a slope fit)";
    }
    out.headline_line = line.str();
    return out;
}

std::size_t default_fit_begin(const ExperimentConfig& cfg, std::size_t n_points) {
    if (cfg.skip_largest <= 0) return 0;
    if (n_points > static_cast<std::size_t>(cfg.skip_largest) + 2)
        return static_cast<std::size_t>(cfg.skip_largest);
    return 0;
}

ExperimentResult run_counterexample(const ExperimentConfig& cfg) {
    const RateCurve curve = counterexample_curve(cfg.x, cfg.sigma, t_grid_of(cfg), cfg.quad_tol);
    return curve_result(curve, cfg, default_fit_begin(cfg, curve.points.size()));
}

ExperimentResult run_tv_curve(const ExperimentConfig& cfg) {
    TvCurveOptions opts;
    opts.method = cfg.method == "fokker-planck" ? TvMethod::fokker_planck : TvMethod::closed_form;
    opts.fp = fp_spec_of(cfg);
    opts.gate.enabled = cfg.gate_enabled;
    opts.gate.n_paths = cfg.gate_paths;
    opts.gate.n_steps = cfg.gate_steps;
    opts.gate.threshold = cfg.gate_threshold;
    opts.seed = cfg.seed;
    opts.quad_tol = cfg.quad_tol;
    opts.threads = cfg.threads;
    const RateCurve curve = tv_curve(pair_of(cfg), cfg.x, t_grid_of(cfg), opts);
    return curve_result(curve, cfg, default_fit_begin(cfg, curve.points.size()));
}

ExperimentResult run_w1_curve(const ExperimentConfig& cfg) {
    W1CurveOptions opts;
    opts.n_paths = cfg.n_paths;
    opts.n_steps = cfg.n_steps;
    opts.seed = cfg.seed;
    opts.threads = cfg.threads;
    const RateCurve curve = w1_curve(pair_of(cfg), cfg.x, t_grid_of(cfg), opts);
    return curve_result(curve, cfg, default_fit_begin(cfg, curve.points.size()));
}

ExperimentResult run_smoothing_order(const ExperimentConfig& cfg) {
    std::vector<double> eps;
    for (int j = cfg.j_min; j <= cfg.j_max; ++j) eps.push_back(std::ldexp(1.0, -j));
    const auto law = ClosedFormDensity::gaussian(cfg.law_mean, cfg.law_var);
    const RateCurve curve =
        smoothing_order_curve(TestFunction::indicator(cfg.indicator_a), law, cfg.order, eps);
    return curve_result(curve, cfg, 0);
}

ExperimentResult run_fokker_planck(const ExperimentConfig& cfg) {
    const SdeModel model = builtin_model(cfg.model, cfg.params);
    const DensityGrid grid = fokker_planck_solve(model, cfg.x, cfg.t, fp_spec_of(cfg));
    std::ofstream os(cfg.out_path());
    grid.write_csv(os);
    ExperimentResult out;
    out.headline = std::abs(grid.mass() - 1.0);
    std::ostringstream line;
    line << "mass_residual=" << out.headline;
    out.headline_line = line.str();
    return out;
}

ExperimentResult run_envelope(const ExperimentConfig& cfg) {
    const SdeModel model = builtin_model(cfg.model, cfg.params);
    const DensityGrid grid = fokker_planck_solve(model, cfg.x, cfg.t, fp_spec_of(cfg));
    const AronsonEnvelope env = aronson_envelope_fit(grid, cfg.x, cfg.t);
    std::ofstream os(cfg.out_path());
    os.precision(17);
    os << "C,c,t\n" << env.big_c << "," << env.small_c << "," << env.t << "\n";
    ExperimentResult out;
    out.headline = env.big_c;
    std::ostringstream line;
    line << "C=" << env.big_c << " c=" << env.small_c;
    out.headline_line = line.str();
    return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult result;
    switch (cfg.kind) {
        case ExperimentKind::weights: result = run_weights(cfg); break;
        case ExperimentKind::counterexample: result = run_counterexample(cfg); break;
        case ExperimentKind::tv_curve: result = run_tv_curve(cfg); break;
        case ExperimentKind::w1_curve: result = run_w1_curve(cfg); break;
        case ExperimentKind::smoothing_order: result = run_smoothing_order(cfg); break;
        case ExperimentKind::fokker_planck: result = run_fokker_planck(cfg); break;
        case ExperimentKind::envelope: result = run_envelope(cfg); break;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(cfg, wall);
    return result;
}

}  // namespace sdetv
