// sde-tv-lab: small-time total-variation laboratory for 1D SDEs and their
// one-step Euler-Maruyama proxies.
//
// Exit codes: 0 ok, 2 config error, 3 precondition error, 4 solver error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "sdetv/errors.hpp"
#include "sdetv/experiment.hpp"

namespace {

using sdetv::ExperimentConfig;
using sdetv::ExperimentKind;

struct Cli {
    CLI::App app{"total-variation / Wasserstein rate experiments for SDE Euler proxies",
                 "sde-tv-lab"};
    ExperimentConfig cfg;
    ExperimentKind selected = ExperimentKind::counterexample;
    bool have_selection = false;

    Cli() {
        app.set_config("--config", "", "key = value config file; flags override it");
        app.allow_config_extras(false);  // unknown keys are errors
        app.require_subcommand(0, 1);
        app.option_defaults()->always_capture_default();

        app.add_option("--seed", cfg.seed, "master 64-bit seed");
        app.add_option("--out", cfg.out, "output CSV path (default <experiment>.csv)");
        app.add_option("--threads", cfg.threads, "worker threads for grid points");

        add_weights();
        add_counterexample();
        add_tv_curve();
        add_w1_curve();
        add_smoothing_order();
        add_fokker_planck();
        add_envelope();
    }

    CLI::App* sub(const char* name, const char* help, ExperimentKind kind) {
        CLI::App* s = app.add_subcommand(name, help);
        s->configurable();
        s->callback([this, kind] {
            have_selection = true;
            selected = kind;
        });
        return s;
    }

    void add_model_options(CLI::App* s, bool with_pair) {
        s->add_option("--model", cfg.model, "catalog model name");
        s->add_option("--params", cfg.params, "model parameters")->delimiter(',');
        if (with_pair) {
            s->add_option("--model2", cfg.model2,
                          "second model (default: one-step Euler proxy of --model)");
            s->add_option("--params2", cfg.params2, "second model parameters")->delimiter(',');
        }
        s->add_option("--x", cfg.x, "start point");
    }

    void add_t_grid(CLI::App* s) {
        s->add_option("--k-min,--k_min", cfg.k_min, "t grid starts at 2^-k_min");
        s->add_option("--k-max,--k_max", cfg.k_max, "t grid ends at 2^-k_max");
        s->add_option("--t-list,--t_list", cfg.t_list, "explicit t grid")->delimiter(',');
        s->add_option("--skip-largest,--skip_largest", cfg.skip_largest,
                      "pre-asymptotic points dropped from the fit");
    }

    void add_fp_options(CLI::App* s) {
        s->add_option("--grid-points,--grid_points", cfg.grid_points, "spatial grid size");
        s->add_option("--time-steps,--time_steps", cfg.time_steps, "Crank-Nicolson steps");
        s->add_option("--grid-lo,--grid_lo", cfg.grid_lo, "explicit left boundary");
        s->add_option("--grid-hi,--grid_hi", cfg.grid_hi, "explicit right boundary");
    }

    void add_weights() {
        CLI::App* s = sub("weights", "exact Richardson-Romberg weights", ExperimentKind::weights);
        s->add_option("--order,-r,--r", cfg.order, "extrapolation order");
    }

    void add_counterexample() {
        CLI::App* s = sub("counterexample", "exact TV curve of gbm vs its one-step Euler law",
                          ExperimentKind::counterexample);
        s->add_option("--x", cfg.x, "start point (> 0)");
        s->add_option("--sigma", cfg.sigma, "gbm volatility");
        add_t_grid(s);
        s->add_option("--quad-tol,--quad_tol", cfg.quad_tol, "quadrature tolerance");
    }

    void add_tv_curve() {
        CLI::App* s = sub("tv-curve", "TV(model law, pair law) over a dyadic t grid",
                          ExperimentKind::tv_curve);
        add_model_options(s, true);
        add_t_grid(s);
        add_fp_options(s);
        s->add_option("--method", cfg.method, "closed-form | fokker-planck");
        s->add_option("--gate-paths,--gate_paths", cfg.gate_paths, "histogram oracle sample size");
        s->add_option("--gate-steps,--gate_steps", cfg.gate_steps, "histogram oracle Euler steps");
        s->add_option("--gate-threshold,--gate_threshold", cfg.gate_threshold,
                      "histogram oracle acceptance gap");
        s->add_flag("--gate,!--no-gate", cfg.gate_enabled,
                    "toggle the Monte Carlo histogram oracle");
        s->add_option("--quad-tol,--quad_tol", cfg.quad_tol, "quadrature tolerance");
    }

    void add_w1_curve() {
        CLI::App* s = sub("w1-curve", "W1 upper bound (coupled MC) or exact CDF W1 over a t grid",
                          ExperimentKind::w1_curve);
        add_model_options(s, true);
        add_t_grid(s);
        s->add_option("--paths,--n_paths", cfg.n_paths, "Monte Carlo paths per grid point");
        s->add_option("--steps,--n_steps", cfg.n_steps, "fine Euler steps for the true law");
    }

    void add_smoothing_order() {
        CLI::App* s = sub("smoothing-order",
                          "Richardson-Romberg smoothing error vs epsilon, closed form",
                          ExperimentKind::smoothing_order);
        s->add_option("--order,-r,--r", cfg.order, "extrapolation order");
        s->add_option("--a,--indicator-a,--indicator_a", cfg.indicator_a, "indicator threshold");
        s->add_option("--mean,--law_mean", cfg.law_mean, "gaussian law mean");
        s->add_option("--var,--law_var", cfg.law_var, "gaussian law variance");
        s->add_option("--j-min,--j_min", cfg.j_min, "eps grid starts at 2^-j_min");
        s->add_option("--j-max,--j_max", cfg.j_max, "eps grid ends at 2^-j_max");
    }

    void add_fokker_planck() {
        CLI::App* s = sub("fokker-planck", "forward-PDE transition density at one t",
                          ExperimentKind::fokker_planck);
        add_model_options(s, false);
        s->add_option("--t", cfg.t, "time horizon");
        add_fp_options(s);
    }

    void add_envelope() {
        CLI::App* s = sub("envelope", "Aronson envelope constants fitted to an FP density",
                          ExperimentKind::envelope);
        add_model_options(s, false);
        s->add_option("--t", cfg.t, "time horizon");
        add_fp_options(s);
    }
};

}  // namespace

int main(int argc, char** argv) {
    Cli cli;
    try {
        cli.app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.app.exit(e);
    } catch (const CLI::ParseError& e) {
        cli.app.exit(e);
        return 2;
    }
    try {
        if (!cli.have_selection)
            throw sdetv::ConfigError("no experiment selected: pass a subcommand or a config file "
                                     "with an experiment section");
        cli.cfg.kind = cli.selected;
        const sdetv::ExperimentResult result = sdetv::run_experiment(cli.cfg);
        std::cout << result.headline_line << "\n";
        std::cout << "wrote " << cli.cfg.out_path() << "\n";
        return 0;
    } catch (const sdetv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const sdetv::PreconditionError& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return 3;
    } catch (const sdetv::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 4;
    }
}
