#include "sdetv/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sdetv {

namespace {

double smooth_step(double tau) {
    // C-infinity 0->1 transition on [0,1] (all derivatives vanish at both ends).
    if (tau <= 0.0) return 0.0;
    if (tau >= 1.0) return 1.0;
    double a = std::exp(-1.0 / tau);
    double b = std::exp(-1.0 / (1.0 - tau));
    return a / (a + b);
}

void require_params(const std::string& name, const std::vector<double>& params, std::size_t n) {
    if (params.size() != n) {
        std::ostringstream msg;
        msg << "model '" << name << "' expects " << n << " parameter(s), got " << params.size();
        throw ConfigError(msg.str());
    }
}

}  // namespace

double smooth_clamp(double y, double eps) {
    const double band = eps / 4.0;
    const double inv = 1.0 / eps;
    if (y <= eps - band) return eps;
    if (y < eps + band) return eps + (y - eps) * smooth_step((y - eps + band) / (2.0 * band));
    if (y <= inv - band) return y;
    if (y < inv + band) return inv + (y - inv) * (1.0 - smooth_step((y - inv + band) / (2.0 * band)));
    return inv;
}

ModelPair::ModelPair(SdeModel x, SdeModel y, double start_point, double horizon_t)
    : model_x(std::move(x)), model_y(std::move(y)), start(start_point), horizon(horizon_t) {
    if (model_x.dimension != model_y.dimension)
        throw PreconditionError("model pair dimensions do not match");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw PreconditionError("model pair horizon must be finite and positive");
}

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names = {
        "gbm", "ou", "brownian-drift", "sine-diffusion", "clamped-gbm"};
    return names;
}

SdeModel builtin_model(const std::string& name, const std::vector<double>& params) {
    SdeModel m;
    m.name = name;
    if (name == "gbm") {
        require_params(name, params, 1);
        const double sigma = params[0];
        if (!(sigma > 0.0)) throw ConfigError("gbm requires sigma > 0");
        m.drift = [sigma](double, double y) { return 0.5 * sigma * sigma * y; };
        m.diffusion = [sigma](double, double y) { return sigma * y; };
        m.exact_law = ExactLaw::gbm_lognormal;
        m.gbm_sigma = sigma;
    } else if (name == "ou") {
        require_params(name, params, 2);
        const double theta = params[0];
        const double sigma = params[1];
        if (!(sigma > 0.0)) throw ConfigError("ou requires sigma > 0");
        if (!std::isfinite(theta)) throw ConfigError("ou requires finite theta");
        m.drift = [theta](double, double y) { return -theta * y; };
        m.diffusion = [sigma](double, double) { return sigma; };
        m.exact_law = ExactLaw::gaussian;
        m.gaussian_law = [theta, sigma](double x, double t) {
            // Exact OU transition: mean decays, variance saturates.
            const double mean = x * std::exp(-theta * t);
            double var;
            if (std::abs(theta) < 1e-12) {
                var = sigma * sigma * t;
            } else {
                var = sigma * sigma * (1.0 - std::exp(-2.0 * theta * t)) / (2.0 * theta);
            }
            return GaussianLawParams{mean, var};
        };
    } else if (name == "brownian-drift") {
        require_params(name, params, 2);
        const double mu = params[0];
        const double sigma = params[1];
        if (!(sigma > 0.0)) throw ConfigError("brownian-drift requires sigma > 0");
        m.drift = [mu](double, double) { return mu; };
        m.diffusion = [sigma](double, double) { return sigma; };
        m.exact_law = ExactLaw::gaussian;
        m.gaussian_law = [mu, sigma](double x, double t) {
            return GaussianLawParams{x + mu * t, sigma * sigma * t};
        };
    } else if (name == "sine-diffusion") {
        require_params(name, params, 0);
        m.drift = [](double, double y) { return std::cos(y); };
        m.diffusion = [](double, double y) { return 1.0 + 0.5 * std::sin(y); };
    } else if (name == "clamped-gbm") {
        require_params(name, params, 2);
        const double sigma = params[0];
        const double eps = params[1];
        if (!(sigma > 0.0)) throw ConfigError("clamped-gbm requires sigma > 0");
        if (!(eps > 0.0 && eps < 0.5)) throw ConfigError("clamped-gbm requires eps in (0, 1/2)");
        m.drift = [sigma](double, double y) { return 0.5 * sigma * sigma * y; };
        m.diffusion = [sigma, eps](double, double y) { return sigma * smooth_clamp(y, eps); };
    } else {
        std::ostringstream msg;
        msg << "unknown model '" << name << "'; catalog:";
        for (const auto& n : catalog_names()) msg << " " << n;
        throw ConfigError(msg.str());
    }
    return m;
}

SdeModel euler_proxy(const SdeModel& model, double x) {
    const double b0 = model.drift(0.0, x);
    const double s0 = model.diffusion(0.0, x);
    SdeModel proxy;
    proxy.name = model.name + "-euler";
    proxy.drift = [b0](double, double) { return b0; };
    proxy.diffusion = [s0](double, double) { return s0; };
    proxy.dimension = model.dimension;
    proxy.exact_law = ExactLaw::gaussian;
    proxy.gaussian_law = [b0, s0](double start, double t) {
        return GaussianLawParams{start + b0 * t, s0 * s0 * t};
    };
    return proxy;
}

double delta_b(const ModelPair& pair, double x) {
    return std::abs(pair.model_x.drift(0.0, x) - pair.model_y.drift(0.0, x));
}

double delta_sigma(const ModelPair& pair, double x) {
    return std::abs(pair.model_x.diffusion(0.0, x) - pair.model_y.diffusion(0.0, x));
}

double ellipticity_check(const SdeModel& model,
                         const std::vector<double>& state_grid,
                         const std::vector<double>& time_grid) {
    if (model.dimension != 1) throw PreconditionError("ellipticity_check requires a 1D model");
    if (state_grid.empty() || time_grid.empty())
        throw PreconditionError("ellipticity_check requires nonempty grids");
    double lo = std::numeric_limits<double>::infinity();
    for (double t : time_grid)
        for (double y : state_grid) {
            const double s = model.diffusion(t, y);
            lo = std::min(lo, s * s);
        }
    return lo;
}

}  // namespace sdetv
