#pragma once

#include <functional>
#include <vector>

namespace sdetv {

using RealFn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a,b] to absolute
/// tolerance abs_tol. Throws SolverError if the interval budget is exhausted
/// before the tolerance is met.
double integrate(const RealFn& f, double a, double b, double abs_tol = 1e-10,
                 int max_intervals = 200000);

// Roots of f in (a,b): sign changes located on an n_scan grid, then refined
// by bisection to ~1e-14 relative accuracy. Tangential zeros are missed.
std::vector<double> find_sign_changes(const RealFn& f, double a, double b, int n_scan = 1024);

// Integral of |f| over [a,b]: splits at the sign changes of f so each piece
// is smooth, then integrates each piece adaptively.
double integrate_abs(const RealFn& f, double a, double b, double abs_tol = 1e-10,
                     int n_scan = 1024);

}  // namespace sdetv
