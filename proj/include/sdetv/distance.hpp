#pragma once

#include <functional>
#include <vector>

#include "sdetv/density.hpp"

namespace sdetv {

/// Bounded measurable test function on R, |f| <= 1.
///
/// Three kinds: indicator(a) = 1{y <= a}, sign(y), and a piecewise-constant
/// step with sorted thresholds a_1 < ... < a_m and m+1 levels. The Gaussian
/// smoothing f_eps(y) = E f(y + sqrt(eps) Z) and the smoothed expectation
/// under a gaussian law are closed-form for all three.
class TestFunction {
public:
    static TestFunction indicator(double a);
    static TestFunction sign();
    static TestFunction step(std::vector<double> thresholds, std::vector<double> levels);

    double operator()(double y) const;
    double smoothed(double y, double eps) const;
    // E f_eps(Z) for Z ~ N(mu, var); eps = 0 gives the plain expectation.
    double smoothed_gaussian_mean(double mu, double var, double eps) const;

private:
    TestFunction() = default;
    // Internal form: base + sum_j coeff_j * 1{y <= a_j}.
    double base_ = 0.0;
    std::vector<double> thresholds_;
    std::vector<double> coeffs_;
};

// f_eps as a callable; eps > 0.
std::function<double(double)> smooth(const TestFunction& f, double eps);

// Total variation distance with the factor-2 normalization: integral of
// |p - q|, so identical laws give 0 and disjoint ones 2. The quadrature is
// split at the crossing points of p - q.
double tv_densities(const ClosedFormDensity& p, const ClosedFormDensity& q,
                    double abs_tol = 1e-10);
double tv_densities(const DensityGrid& p, const ClosedFormDensity& q);
double tv_densities(const ClosedFormDensity& p, const DensityGrid& q);
double tv_densities(const DensityGrid& p, const DensityGrid& q);

// L1-Wasserstein distance via the 1D identity W1 = integral |F_p - F_q|,
// truncated at 12 combined sigmas; the exact tail integrals are added.
double w1_cdf(const ClosedFormDensity& p, const ClosedFormDensity& q, double abs_tol = 1e-10);

// Richardson-Romberg extrapolated smoothed expectation
//   sum_i w_i E f_{eps/n_i}(Z),  Z ~ gaussian law,
// with the order-r weights and refiners n_i = 2^{i-1}.
double rr_smoothed_expectation(const TestFunction& f, const ClosedFormDensity& gaussian_law,
                               double eps, int r);

// eps* = (w1 / (2 r deriv_norm_sum))^{2/(2r+1)} minimizing the TV bound
// kappa eps^r + w1 eps^{-1/2}.
double optimal_epsilon(int r, double w1, double deriv_norm_sum);

}  // namespace sdetv
