#include "sdetv/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "sdetv/errors.hpp"
#include "sdetv/quadrature.hpp"

namespace sdetv {

double norm_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// ---------------------------------------------------------------- closed form

ClosedFormDensity ClosedFormDensity::gaussian(double mean, double var) {
    if (!(var > 0.0)) throw PreconditionError("gaussian density requires var > 0");
    ClosedFormDensity d;
    d.kind_ = Kind::gaussian;
    d.mu_ = mean;
    d.var_ = var;
    return d;
}

ClosedFormDensity ClosedFormDensity::gbm_lognormal(double start, double vol, double time) {
    if (!(start > 0.0)) throw PreconditionError("lognormal density requires start > 0");
    if (!(vol > 0.0)) throw PreconditionError("lognormal density requires vol > 0");
    if (!(time > 0.0)) throw PreconditionError("lognormal density requires time > 0");
    ClosedFormDensity d;
    d.kind_ = Kind::gbm_lognormal;
    d.x0_ = start;
    d.vol_ = vol;
    d.t_ = time;
    return d;
}

double ClosedFormDensity::pdf(double y) const {
    if (kind_ == Kind::gaussian) {
        const double s = std::sqrt(var_);
        return norm_pdf((y - mu_) / s) / s;
    }
    if (y <= 0.0) return 0.0;
    const double s = vol_ * std::sqrt(t_);
    return norm_pdf(std::log(y / x0_) / s) / (y * s);
}

double ClosedFormDensity::cdf(double y) const {
    if (kind_ == Kind::gaussian) return norm_cdf((y - mu_) / std::sqrt(var_));
    if (y <= 0.0) return 0.0;
    return norm_cdf(std::log(y / x0_) / (vol_ * std::sqrt(t_)));
}

double ClosedFormDensity::mean() const {
    if (kind_ == Kind::gaussian) return mu_;
    return x0_ * std::exp(0.5 * vol_ * vol_ * t_);
}

std::pair<double, double> ClosedFormDensity::support(double n_sigmas) const {
    if (kind_ == Kind::gaussian) {
        const double s = std::sqrt(var_);
        return {mu_ - n_sigmas * s, mu_ + n_sigmas * s};
    }
    const double s = vol_ * std::sqrt(t_);
    return {x0_ * std::exp(-n_sigmas * s), x0_ * std::exp(n_sigmas * s)};
}

double ClosedFormDensity::upper_tail_mean(double a) const {
    if (kind_ == Kind::gaussian) {
        const double s = std::sqrt(var_);
        const double z = (a - mu_) / s;
        return s * (norm_pdf(z) - z * (1.0 - norm_cdf(z)));
    }
    // E[(Y-a)+] for Y = x0 exp(vol W_t), Black-Scholes style.
    const double s = vol_ * std::sqrt(t_);
    if (a <= 0.0) return mean() - a;
    const double d1 = (std::log(x0_ / a) + vol_ * vol_ * t_) / s;
    const double d2 = d1 - s;
    return mean() * norm_cdf(d1) - a * norm_cdf(d2);
}

double ClosedFormDensity::lower_tail_mean(double a) const {
    // E[(a-Y)+] = E[(Y-a)+] - E[Y] + a
    return upper_tail_mean(a) - mean() + a;
}

// ---------------------------------------------------------------- grid

double DensityGrid::mass() const {
    if (values.size() < 2) return 0.0;
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
    return sum * dx;
}

double DensityGrid::value_at(double y) const {
    if (values.empty() || y < lo || y > hi) return 0.0;
    const double pos = (y - lo) / dx;
    const std::size_t i = std::min(static_cast<std::size_t>(pos), values.size() - 2);
    const double w = pos - static_cast<double>(i);
    return values[i] * (1.0 - w) + values[i + 1] * w;
}

double DensityGrid::cdf_at(double y) const {
    if (values.empty() || y <= lo) return 0.0;
    double sum = 0.0;
    std::size_t i = 0;
    for (; i + 1 < values.size() && point(i + 1) <= y; ++i)
        sum += 0.5 * (values[i] + values[i + 1]) * dx;
    if (i + 1 < values.size() && y > point(i)) {
        const double w = y - point(i);
        const double py = value_at(y);
        sum += 0.5 * (values[i] + py) * w;
    }
    return sum;
}

void DensityGrid::write_csv(std::ostream& os) const {
    os << "y,p\n";
    os.precision(17);
    for (std::size_t i = 0; i < values.size(); ++i) os << point(i) << "," << values[i] << "\n";
}

double AronsonEnvelope::at(double y, double x) const {
    return big_c / std::sqrt(t) * std::exp(-small_c * (y - x) * (y - x) / t);
}

// ---------------------------------------------------------------- derivatives

double hermite(int r, double u) {
    if (r < 0) throw PreconditionError("hermite order must be >= 0");
    double prev = 1.0;
    if (r == 0) return prev;
    double cur = u;
    for (int k = 1; k < r; ++k) {
        const double next = u * cur - static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double gaussian_density_deriv(int r, double mu, double v, double y) {
    if (!(v > 0.0)) throw PreconditionError("gaussian_density_deriv requires v > 0");
    const double s = std::sqrt(v);
    const double u = (y - mu) / s;
    const double sign = (r % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(v, -0.5 * r) * hermite(r, u) * norm_pdf(u) / s;
}

double deriv_l1_norm(int r, double v) {
    if (!(v > 0.0)) throw PreconditionError("deriv_l1_norm requires v > 0");
    if (r == 0) return 1.0;
    // E|He_r(Z)| with the integral split at the polynomial roots: the
    // integrand is smooth on each piece. Roots live inside |u| <= 2 sqrt(r)+1.
    const double radius = 2.0 * std::sqrt(static_cast<double>(r)) + 2.0;
    auto signed_integrand = [r](double u) { return hermite(r, u) * norm_pdf(u); };
    const double bound = std::max(radius, 14.0);
    const double expectation = integrate_abs(signed_integrand, -bound, bound, 1e-12, 2048);
    return std::pow(v, -0.5 * r) * expectation;
}

ClosedFormDensity euler_one_step_density(const SdeModel& model, double x, double t) {
    if (model.dimension != 1) throw PreconditionError("euler_one_step_density requires 1D");
    if (!(t > 0.0)) throw PreconditionError("euler_one_step_density requires t > 0");
    const double b0 = model.drift(0.0, x);
    const double s0 = model.diffusion(0.0, x);
    if (s0 == 0.0) throw PreconditionError("degenerate law: diffusion vanishes at (0, x)");
    return ClosedFormDensity::gaussian(x + b0 * t, s0 * s0 * t);
}

ClosedFormDensity exact_density(const SdeModel& model, double x, double t) {
    switch (model.exact_law) {
        case ExactLaw::gaussian: {
            const GaussianLawParams p = model.gaussian_law(x, t);
            return ClosedFormDensity::gaussian(p.mean, p.var);
        }
        case ExactLaw::gbm_lognormal:
            return ClosedFormDensity::gbm_lognormal(x, model.gbm_sigma, t);
        case ExactLaw::none:
            break;
    }
    throw PreconditionError("model '" + model.name + "' has no closed-form law");
}

// ---------------------------------------------------------------- FP solver

std::pair<double, double> metric_support(const SdeModel& model, double x, double t,
                                         double width_sigmas) {
    // Follow dy/ds = +-sigma(0, y) for s in [0, width_sigmas*sqrt(t)] (RK4).
    const double total = width_sigmas * std::sqrt(t);
    const int n_sub = 400;
    const double h = total / n_sub;
    auto sig = [&model](double y) { return model.diffusion(0.0, y); };
    auto rk4_step = [&sig](double y, double step) {
        const double k1 = sig(y);
        const double k2 = sig(y + 0.5 * step * k1);
        const double k3 = sig(y + 0.5 * step * k2);
        const double k4 = sig(y + step * k3);
        return y + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    double lo = x, hi = x;
    for (int i = 0; i < n_sub; ++i) {
        hi = rk4_step(hi, h);
        lo = rk4_step(lo, -h);
    }
    return {lo, hi};
}

namespace {

// One Crank-Nicolson march of the flux-form operator
//   (L p)_j = (F_{j+1/2} - F_{j-1/2}) / dy,
//   F_{j+1/2} = -b_{j+1/2} (p_j + p_{j+1})/2 + (s2_{j+1} p_{j+1} - s2_j p_j) / (2 dy)
// with zero Dirichlet rows at both ends. Coefficients may depend on time;
// they are sampled at the midpoint of each step.
struct CnWorkspace {
    std::vector<double> lower, diag, upper;       // operator L
    std::vector<double> al, ad, au;               // factored A = I - dt/2 L
    std::vector<double> rhs, scratch;
};

void assemble_operator(const CoefficientFn& drift, const CoefficientFn& diffusion, double s,
                       double lo, double dy, int n, CnWorkspace& w) {
    w.lower.assign(n, 0.0);
    w.diag.assign(n, 0.0);
    w.upper.assign(n, 0.0);
    std::vector<double>& s2 = w.scratch;
    s2.resize(n);
    for (int j = 0; j < n; ++j) {
        const double sig = diffusion(s, lo + j * dy);
        s2[j] = sig * sig;
    }
    double b_left = drift(s, lo + 0.5 * dy);
    for (int j = 1; j + 1 < n; ++j) {
        const double b_right = drift(s, lo + (j + 0.5) * dy);
        w.lower[j] = (0.5 * b_left + s2[j - 1] / (2.0 * dy)) / dy;
        w.diag[j] = (0.5 * (b_left - b_right) - s2[j] / dy) / dy;
        w.upper[j] = (-0.5 * b_right + s2[j + 1] / (2.0 * dy)) / dy;
        b_left = b_right;
    }
}

void thomas_solve(const std::vector<double>& al, const std::vector<double>& ad,
                  const std::vector<double>& au, std::vector<double>& rhs,
                  std::vector<double>& out) {
    const int n = static_cast<int>(ad.size());
    static thread_local std::vector<double> c_prime, d_prime;
    c_prime.assign(n, 0.0);
    d_prime.assign(n, 0.0);
    c_prime[0] = au[0] / ad[0];
    d_prime[0] = rhs[0] / ad[0];
    for (int i = 1; i < n; ++i) {
        const double m = ad[i] - al[i] * c_prime[i - 1];
        c_prime[i] = au[i] / m;
        d_prime[i] = (rhs[i] - al[i] * d_prime[i - 1]) / m;
    }
    out.resize(n);
    out[n - 1] = d_prime[n - 1];
    for (int i = n - 2; i >= 0; --i) out[i] = d_prime[i] - c_prime[i] * out[i + 1];
}

DensityGrid crank_nicolson_march(const CoefficientFn& drift, const CoefficientFn& diffusion,
                                 double lo, double hi, int n, double mu0, double v0, double t0,
                                 double t1, int n_time) {
    DensityGrid grid;
    grid.lo = lo;
    grid.hi = hi;
    grid.dx = (hi - lo) / (n - 1);
    grid.values.resize(n);
    const double s0 = std::sqrt(v0);
    for (int j = 0; j < n; ++j)
        grid.values[j] = norm_pdf((grid.point(j) - mu0) / s0) / s0;
    grid.values.front() = 0.0;
    grid.values.back() = 0.0;

    CnWorkspace w;
    const double dt = (t1 - t0) / n_time;
    std::vector<double>& p = grid.values;
    for (int step = 0; step < n_time; ++step) {
        const double s_mid = t0 + (step + 0.5) * dt;
        assemble_operator(drift, diffusion, s_mid, lo, grid.dx, n, w);
        w.rhs.assign(n, 0.0);
        for (int j = 1; j + 1 < n; ++j)
            w.rhs[j] = p[j] + 0.5 * dt *
                                  (w.lower[j] * p[j - 1] + w.diag[j] * p[j] + w.upper[j] * p[j + 1]);
        w.al.assign(n, 0.0);
        w.ad.assign(n, 1.0);
        w.au.assign(n, 0.0);
        for (int j = 1; j + 1 < n; ++j) {
            w.al[j] = -0.5 * dt * w.lower[j];
            w.ad[j] = 1.0 - 0.5 * dt * w.diag[j];
            w.au[j] = -0.5 * dt * w.upper[j];
        }
        thomas_solve(w.al, w.ad, w.au, w.rhs, p);
    }
    return grid;
}

}  // namespace

DensityGrid fokker_planck_solve(const SdeModel& model, double x, double t, const FpGridSpec& spec) {
    if (model.dimension != 1) throw PreconditionError("fokker_planck_solve requires a 1D model");
    if (!(t > 0.0)) throw PreconditionError("fokker_planck_solve requires t > 0");
    if (spec.n_points < 16) throw PreconditionError("fokker_planck_solve: grid too small");

    double lo, hi;
    if (spec.lo && spec.hi) {
        lo = *spec.lo;
        hi = *spec.hi;
        if (!(hi > lo)) throw PreconditionError("fokker_planck_solve: hi must exceed lo");
    } else {
        std::tie(lo, hi) = metric_support(model, x, t, spec.width_sigmas);
    }

    // Ellipticity on the target grid, sampled at both time endpoints. A sign
    // change means the diffusion vanishes inside the domain even though
    // sigma^2 stays positive at every sample point.
    {
        std::vector<double> ys(static_cast<std::size_t>(spec.n_points));
        const std::vector<double> times = {0.0, t};
        for (int i = 0; i < spec.n_points; ++i)
            ys[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (spec.n_points - 1.0);
        double sig_min = std::numeric_limits<double>::infinity();
        double sig_max = 0.0;
        bool sign_change = false;
        for (double s : times) {
            double prev = model.diffusion(s, ys[0]);
            for (double y : ys) {
                const double sig = model.diffusion(s, y);
                sig_min = std::min(sig_min, std::abs(sig));
                sig_max = std::max(sig_max, std::abs(sig));
                if (sig * prev < 0.0) sign_change = true;
                prev = sig;
            }
        }
        if (sign_change || !(sig_min > 1e-8 * sig_max) ||
            !(ellipticity_check(model, ys, times) > 0.0))
            throw PreconditionError("fokker_planck_solve: diffusion is not elliptic on the grid");
    }

    const double t0 = t / spec.init_fraction;
    const double b0 = model.drift(0.0, x);
    const double sig0 = model.diffusion(0.0, x);
    const double mu0 = x + b0 * t0;
    const double v0 = sig0 * sig0 * t0;

    DensityGrid grid;
    if (t < spec.rescale_below) {
        // Work in u = (y - x)/sqrt(t): q(s,u) = sqrt(t) p(s, x + u sqrt(t))
        // solves the same flux-form equation with coefficients
        // b_u = b/sqrt(t), sigma_u = sigma/sqrt(t); keeps the profile O(1).
        const double rt = std::sqrt(t);
        auto drift_u = [&model, x, rt](double s, double u) {
            return model.drift(s, x + u * rt) / rt;
        };
        auto diff_u = [&model, x, rt](double s, double u) {
            return model.diffusion(s, x + u * rt) / rt;
        };
        const double ulo = (lo - x) / rt, uhi = (hi - x) / rt;
        DensityGrid q = crank_nicolson_march(drift_u, diff_u, ulo, uhi, spec.n_points,
                                             (mu0 - x) / rt, v0 / t, t0, t, spec.n_time_steps);
        grid.lo = x + q.lo * rt;
        grid.hi = x + q.hi * rt;
        grid.dx = q.dx * rt;
        grid.values.resize(q.values.size());
        for (std::size_t i = 0; i < q.values.size(); ++i) grid.values[i] = q.values[i] / rt;
    } else {
        grid = crank_nicolson_march(model.drift, model.diffusion, lo, hi, spec.n_points, mu0, v0,
                                    t0, t, spec.n_time_steps);
    }

    for (double& v : grid.values) {
        if (v < 0.0) {
            if (v < -1e-12)
                throw SolverError("fokker_planck_solve: negative density beyond clip tolerance");
            v = 0.0;
        }
    }
    const double mass = grid.mass();
    if (std::abs(mass - 1.0) > spec.mass_tol)
        throw SolverError("fokker_planck_solve: mass drifted to " + std::to_string(mass));
    return grid;
}

AronsonEnvelope aronson_envelope_fit(const DensityGrid& grid, double x, double t,
                                     const EnvelopeFitOptions& opts) {
    if (grid.values.empty()) throw PreconditionError("aronson_envelope_fit: empty grid");
    double sigma_max = opts.sigma_max;
    if (!(sigma_max > 0.0)) sigma_max = (grid.hi - grid.lo) / (20.0 * std::sqrt(t));
    const double peak = *std::max_element(grid.values.begin(), grid.values.end());
    if (!(peak > 0.0)) throw PreconditionError("aronson_envelope_fit: zero density");

    const double c_mid = 1.0 / (2.0 * sigma_max * sigma_max);
    const double log_lo = std::log(0.01 * c_mid), log_hi = std::log(100.0 * c_mid);
    std::vector<double> cs(opts.n_c), big(opts.n_c);
    for (int i = 0; i < opts.n_c; ++i) {
        cs[i] = std::exp(log_lo + (log_hi - log_lo) * i / (opts.n_c - 1));
        // C(c) = max over meaningful grid points of p sqrt(t) exp(c u^2/t),
        // evaluated in log space to dodge overflow.
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < grid.values.size(); ++j) {
            const double p = grid.values[j];
            if (p <= peak * opts.floor_rel) continue;
            const double u = grid.point(j) - x;
            best = std::max(best, std::log(p) + 0.5 * std::log(t) + cs[i] * u * u / t);
        }
        big[i] = std::exp(best);
    }
    const double c_min = *std::min_element(big.begin(), big.end());
    int chosen = 0;
    for (int i = 0; i < opts.n_c; ++i)
        if (big[i] <= c_min * (1.0 + opts.slack)) chosen = i;
    return AronsonEnvelope{big[chosen], cs[chosen], t};
}

}  // namespace sdetv
