#include "sdetv/distance.hpp"

#include <algorithm>
#include <cmath>

#include "sdetv/errors.hpp"
#include "sdetv/quadrature.hpp"
#include "sdetv/romberg.hpp"

namespace sdetv {

// ---------------------------------------------------------------- TestFunction

TestFunction TestFunction::indicator(double a) {
    TestFunction f;
    f.base_ = 0.0;
    f.thresholds_ = {a};
    f.coeffs_ = {1.0};
    return f;
}

TestFunction TestFunction::sign() {
    // sign(y) = 1 - 2 * 1{y <= 0} up to the null point y = 0.
    TestFunction f;
    f.base_ = 1.0;
    f.thresholds_ = {0.0};
    f.coeffs_ = {-2.0};
    return f;
}

TestFunction TestFunction::step(std::vector<double> thresholds, std::vector<double> levels) {
    if (levels.size() != thresholds.size() + 1)
        throw PreconditionError("step function needs one more level than thresholds");
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw PreconditionError("step thresholds must be sorted");
    for (double l : levels)
        if (std::abs(l) > 1.0) throw PreconditionError("test functions are bounded by 1");
    TestFunction f;
    // levels[j] on (a_j, a_{j+1}]: base is the rightmost level, each
    // indicator 1{y <= a_j} adds the level difference across a_j.
    f.base_ = levels.back();
    f.thresholds_ = std::move(thresholds);
    f.coeffs_.resize(f.thresholds_.size());
    for (std::size_t j = 0; j < f.thresholds_.size(); ++j)
        f.coeffs_[j] = levels[j] - levels[j + 1];
    return f;
}

double TestFunction::operator()(double y) const {
    double v = base_;
    for (std::size_t j = 0; j < thresholds_.size(); ++j)
        if (y <= thresholds_[j]) v += coeffs_[j];
    return v;
}

double TestFunction::smoothed(double y, double eps) const {
    if (!(eps > 0.0)) throw PreconditionError("smoothing requires eps > 0");
    const double s = std::sqrt(eps);
    double v = base_;
    for (std::size_t j = 0; j < thresholds_.size(); ++j)
        v += coeffs_[j] * norm_cdf((thresholds_[j] - y) / s);
    return v;
}

double TestFunction::smoothed_gaussian_mean(double mu, double var, double eps) const {
    if (!(var > 0.0)) throw PreconditionError("smoothed_gaussian_mean requires var > 0");
    if (eps < 0.0) throw PreconditionError("smoothed_gaussian_mean requires eps >= 0");
    // Z + sqrt(eps) zeta ~ N(mu, var + eps).
    const double s = std::sqrt(var + eps);
    double v = base_;
    for (std::size_t j = 0; j < thresholds_.size(); ++j)
        v += coeffs_[j] * norm_cdf((thresholds_[j] - mu) / s);
    return v;
}

std::function<double(double)> smooth(const TestFunction& f, double eps) {
    if (!(eps > 0.0)) throw PreconditionError("smooth requires eps > 0");
    return [f, eps](double y) { return f.smoothed(y, eps); };
}

// ---------------------------------------------------------------- TV

namespace {

std::pair<double, double> union_support(const ClosedFormDensity& p, const ClosedFormDensity& q,
                                        double n_sigmas) {
    auto [plo, phi] = p.support(n_sigmas);
    auto [qlo, qhi] = q.support(n_sigmas);
    return {std::min(plo, qlo), std::max(phi, qhi)};
}

}  // namespace

double tv_densities(const ClosedFormDensity& p, const ClosedFormDensity& q, double abs_tol) {
    auto [lo, hi] = union_support(p, q, 12.0);
    auto diff = [&](double y) { return p.pdf(y) - q.pdf(y); };
    return integrate_abs(diff, lo, hi, abs_tol, 2048);
}

double tv_densities(const DensityGrid& p, const ClosedFormDensity& q) {
    // Per-cell Simpson on |p_lin - q| plus the closed-form mass q carries
    // outside the grid (where p is 0 by convention).
    double total = q.cdf(p.lo) + (1.0 - q.cdf(p.hi));
    for (std::size_t i = 0; i + 1 < p.values.size(); ++i) {
        const double a = p.point(i), b = p.point(i + 1);
        const double m = 0.5 * (a + b);
        const double fa = std::abs(p.values[i] - q.pdf(a));
        const double fm = std::abs(0.5 * (p.values[i] + p.values[i + 1]) - q.pdf(m));
        const double fb = std::abs(p.values[i + 1] - q.pdf(b));
        total += (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    }
    return total;
}

double tv_densities(const ClosedFormDensity& p, const DensityGrid& q) { return tv_densities(q, p); }

double tv_densities(const DensityGrid& p, const DensityGrid& q) {
    // Resample q onto p's grid (linear interpolation), then add the mass each
    // grid carries outside the shared window.
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < p.values.size(); ++i) {
        const double a = p.point(i), b = p.point(i + 1);
        const double fa = std::abs(p.values[i] - q.value_at(a));
        const double fb = std::abs(p.values[i + 1] - q.value_at(b));
        total += 0.5 * (fa + fb) * (b - a);
    }
    total += q.cdf_at(p.lo) + std::max(0.0, q.mass() - q.cdf_at(p.hi));
    return total;
}

// ---------------------------------------------------------------- W1

double w1_cdf(const ClosedFormDensity& p, const ClosedFormDensity& q, double abs_tol) {
    auto [lo, hi] = union_support(p, q, 12.0);
    auto cdf_gap = [&](double y) { return p.cdf(y) - q.cdf(y); };
    double w1 = integrate_abs(cdf_gap, lo, hi, abs_tol, 2048);
    // Exact tails: integral of F below lo is E[(lo - Y)+], integral of 1-F
    // above hi is E[(Y - hi)+]; they bound the truncated |F_p - F_q| mass.
    w1 += p.lower_tail_mean(lo) + q.lower_tail_mean(lo);
    w1 += p.upper_tail_mean(hi) + q.upper_tail_mean(hi);
    return w1;
}

// ---------------------------------------------------------------- RR

double rr_smoothed_expectation(const TestFunction& f, const ClosedFormDensity& gaussian_law,
                               double eps, int r) {
    if (gaussian_law.kind() != ClosedFormDensity::Kind::gaussian)
        throw PreconditionError("rr_smoothed_expectation requires a gaussian law");
    if (!(eps > 0.0)) throw PreconditionError("rr_smoothed_expectation requires eps > 0");
    const RombergWeights wt = weights(r);
    const double mu = gaussian_law.gauss_mean();
    const double var = gaussian_law.gauss_var();
    double acc = 0.0;
    for (int i = 0; i < r; ++i)
        acc += wt.w_float(i + 1) *
               f.smoothed_gaussian_mean(mu, var, eps / static_cast<double>(wt.refiners[i]));
    return acc;
}

double optimal_epsilon(int r, double w1, double deriv_norm_sum) {
    if (r < 1) throw PreconditionError("optimal_epsilon requires r >= 1");
    if (!(w1 > 0.0) || !(deriv_norm_sum > 0.0))
        throw PreconditionError("optimal_epsilon requires positive inputs");
    return std::pow(w1 / (2.0 * r * deriv_norm_sum), 2.0 / (2.0 * r + 1.0));
}

}  // namespace sdetv
