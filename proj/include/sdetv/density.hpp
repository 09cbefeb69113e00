#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "sdetv/model.hpp"

namespace sdetv {

/// Closed-form 1D transition density: gaussian(mean, var) or the lognormal
/// law of x*exp(sigma*W_t) (zero on y <= 0).
class ClosedFormDensity {
public:
    enum class Kind { gaussian, gbm_lognormal };

    static ClosedFormDensity gaussian(double mean, double var);
    static ClosedFormDensity gbm_lognormal(double start, double vol, double time);

    Kind kind() const { return kind_; }
    double pdf(double y) const;
    double cdf(double y) const;
    double mean() const;
    // [lo, hi] containing all mass up to the n_sigmas Gaussian tail level
    // (lognormal support is measured in log space).
    std::pair<double, double> support(double n_sigmas) const;
    // E[(Y - a)+] and E[(a - Y)+]; exact, used for W1 tail control.
    double upper_tail_mean(double a) const;
    double lower_tail_mean(double a) const;

    double gauss_mean() const { return mu_; }
    double gauss_var() const { return var_; }

private:
    ClosedFormDensity() = default;
    Kind kind_ = Kind::gaussian;
    double mu_ = 0.0, var_ = 1.0;          // gaussian
    double x0_ = 1.0, vol_ = 1.0, t_ = 1.0;  // lognormal
};

/// Density sampled on a uniform grid; the Fokker-Planck solver output.
struct DensityGrid {
    double lo = 0.0;
    double hi = 0.0;
    double dx = 0.0;
    std::vector<double> values;

    double point(std::size_t i) const { return lo + static_cast<double>(i) * dx; }
    double mass() const;                    // trapezoid
    double value_at(double y) const;        // linear interpolation, 0 outside
    double cdf_at(double y) const;          // trapezoid CDF, clamped outside
    void write_csv(std::ostream& os) const;  // header "y,p"
};

struct AronsonEnvelope {
    double big_c = 0.0;  // C
    double small_c = 0.0;  // c
    double t = 0.0;
    double at(double y, double x) const;
};

// Probabilist Hermite polynomial He_r(u) via the three-term recurrence.
double hermite(int r, double u);

// r-th derivative in y of the gaussian(mu, v) density:
// (-1)^r v^{-r/2} He_r((y-mu)/sqrt(v)) * pdf(y).
double gaussian_density_deriv(int r, double mu, double v, double y);

// Integral of |d^r/dy^r gaussian(., v)| = v^{-r/2} E|He_r(Z)| by quadrature
// split at the Hermite roots.
double deriv_l1_norm(int r, double v);

// Gaussian law of the one-step Euler scheme frozen at (0, x).
ClosedFormDensity euler_one_step_density(const SdeModel& model, double x, double t);

// Closed-form time-t law of the model started at x; PreconditionError when
// the model declares none.
ClosedFormDensity exact_density(const SdeModel& model, double x, double t);

struct FpGridSpec {
    int n_points = 4001;
    double width_sigmas = 10.0;        // boundary at +-width_sigmas sqrt(t) in the 1/sigma metric
    std::optional<double> lo;          // explicit support override
    std::optional<double> hi;
    int n_time_steps = 200;            // Crank-Nicolson steps from t0 to t
    double init_fraction = 64.0;       // t0 = t / init_fraction
    double mass_tol = 1e-6;
    double rescale_below = 1e-3;       // solve in u = (y-x)/sqrt(t) for smaller t
};

/// Forward Kolmogorov solve d_t p = -d_y(b p) + 1/2 d_yy(sigma^2 p).
///
/// The Dirac start is replaced by the frozen-coefficient gaussian at
/// t0 = t/init_fraction which is then stepped to t (Crank-Nicolson on the
/// flux form, zero Dirichlet boundaries). Throws PreconditionError if the
/// diffusion is not elliptic on the grid and SolverError if mass drifts
/// beyond spec.mass_tol.
DensityGrid fokker_planck_solve(const SdeModel& model, double x, double t,
                                const FpGridSpec& spec = FpGridSpec{});

// Default support [x -, x +] radius: width_sigmas * sqrt(t) measured in the
// metric ds = dy/sigma(0,y), which reduces to x +- width_sigmas*sigma*sqrt(t)
// for constant sigma and to x*exp(+-width_sigmas*sigma*sqrt(t)) for gbm.
std::pair<double, double> metric_support(const SdeModel& model, double x, double t,
                                         double width_sigmas);

struct EnvelopeFitOptions {
    double sigma_max = 0.0;     // 0: inferred from the grid extent
    double floor_rel = 1e-12;   // ignore grid values below floor_rel * peak
    double slack = 0.05;        // accept C within (1+slack) of the minimum
    int n_c = 64;               // log-spaced c grid size
};

// Smallest-C envelope p(y) <= C t^{-1/2} exp(-c (y-x)^2 / t) over a coarse
// c grid; among c values whose C is within `slack` of the minimum, the
// largest (sharpest) c wins.
AronsonEnvelope aronson_envelope_fit(const DensityGrid& grid, double x, double t,
                                     const EnvelopeFitOptions& opts = EnvelopeFitOptions{});

// Standard normal cdf/pdf helpers shared across modules.
double norm_cdf(double z);
double norm_pdf(double z);

}  // namespace sdetv
