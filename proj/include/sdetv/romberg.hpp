#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace sdetv {

// Exactness carrier for the weight algebra: arbitrary-precision rational,
// kept normalized (gcd 1, positive denominator) by GMP's canonical form.
using Rational = mpq_class;

/// Order-r Richardson-Romberg weights for the refiners n_i = 2^{i-1}:
///   u_k = (prod_{l=1}^{k-1} (1 - 2^{-l}))^{-1},
///   v_k = (-1)^k 2^{-k(k+1)/2} u_{k+1},
///   w_k = u_k v_{r-k},   k = 1..r,
/// the unique solution of the Vandermonde system
///   sum_i w_i n_i^{-k} = [k == 0],  k = 0..r-1.
struct RombergWeights {
    int order = 0;
    std::vector<long> refiners;   // n_i = 2^{i-1}
    std::vector<Rational> u;      // u_1..u_r
    std::vector<Rational> v;      // v_0..v_{r-1}
    std::vector<Rational> w;      // w_1..w_r

    double w_float(int k) const { return w[static_cast<std::size_t>(k) - 1].get_d(); }
};

// r in [1, 12]; larger orders are unsupported (float conditioning of the
// downstream use is unstudied).
RombergWeights weights(int r);

// Residuals sum_i w_i n_i^{-k} - [k==0] for k = 0..r-1; all exactly zero.
std::vector<Rational> vandermonde_residual(const RombergWeights& wt);

struct WeightBounds {
    double sum_w_over_n_r = 0.0;   // sum |w_i| n_i^{-r}
    double sum_w_2_half = 0.0;     // sum |w_i| 2^{(i-1)/2}
    double u_inf_sq = 0.0;
    bool within_envelopes = false;
};

// The two weight sums against their envelopes
//   sum |w_i| n_i^{-r}    <= u_inf^2 sum_{i=0}^{r-1} 2^{-i/2},
//   sum |w_i| 2^{(i-1)/2} <= u_inf^2 2^r,
// with u_inf from the 64-factor partial product.
WeightBounds weight_bound_checks(const RombergWeights& wt);

// u_inf = prod_{l>=1} (1 - 2^{-l})^{-1}, truncated at 64 factors.
double u_infinity();

// Adaptive extrapolation order r(t) = max(1, floor(sqrt(log(1/t)))) for
// t in (0,1); returns 1 for t >= 1.
int adaptive_order(double t);

// Exact fraction rendering "num/den" (or "num" for integers).
std::string to_string(const Rational& q);

}  // namespace sdetv
