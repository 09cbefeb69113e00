#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sdetv/errors.hpp"

namespace sdetv {

// Scalar coefficient of a 1D SDE, evaluated at (time, state).
using CoefficientFn = std::function<double(double t, double y)>;

enum class ExactLaw { none, gaussian, gbm_lognormal };

struct GaussianLawParams {
    double mean;
    double var;
};

/// Drift/diffusion pair dX = b(t,X)dt + sigma(t,X)dW plus metadata.
///
/// Catalog models are autonomous; time dependence only enters through
/// coefficient freezing (euler_proxy). When `exact_law` is gaussian, the
/// time-t transition law from any start x is N(gaussian_law(x,t)); when it is
/// gbm_lognormal, the law is that of x*exp(gbm_sigma*W_t).
struct SdeModel {
    std::string name;
    CoefficientFn drift;
    CoefficientFn diffusion;
    int dimension = 1;
    ExactLaw exact_law = ExactLaw::none;
    std::function<GaussianLawParams(double x, double t)> gaussian_law;
    double gbm_sigma = 0.0;
};

/// The pair (X, Y) of SDEs started at the same point.
struct ModelPair {
    SdeModel model_x;
    SdeModel model_y;
    double start = 0.0;
    double horizon = 1.0;

    ModelPair(SdeModel x, SdeModel y, double start_point, double horizon_t);
};

// Catalog: gbm(sigma), ou(theta, sigma), brownian-drift(mu, sigma),
// sine-diffusion(), clamped-gbm(sigma, eps). Unknown names and invalid
// parameters throw ConfigError.
SdeModel builtin_model(const std::string& name, const std::vector<double>& params);

const std::vector<std::string>& catalog_names();

// One-step Euler-Maruyama proxy: coefficients frozen at (0, x). The proxy's
// time-t law is the gaussian N(x + b(0,x)t, sigma(0,x)^2 t).
SdeModel euler_proxy(const SdeModel& model, double x);

// Absolute coefficient gaps |b1(0,x) - b2(0,x)| and |sigma1 - sigma2|(0,x).
double delta_b(const ModelPair& pair, double x);
double delta_sigma(const ModelPair& pair, double x);

// Min over the given grids of diffusion(t,y)^2: a numerical (not certified)
// ellipticity constant. Zero or near-zero flags a vanishing diffusion.
double ellipticity_check(const SdeModel& model,
                         const std::vector<double>& state_grid,
                         const std::vector<double>& time_grid);

// C-infinity clamp of y to [eps, 1/eps]: equals the hard clamp outside two
// transition bands of half-width eps/4 around the kinks, and in particular
// psi(y) = y on [2*eps, 1/(2*eps)].
double smooth_clamp(double y, double eps);

}  // namespace sdetv
