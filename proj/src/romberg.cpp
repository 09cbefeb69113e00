#include "sdetv/romberg.hpp"

#include <cmath>

#include "sdetv/errors.hpp"

namespace sdetv {

namespace {

Rational pow2(long e) {
    // 2^e as an exact rational, e may be negative.
    mpz_class num = 1;
    if (e >= 0) {
        mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
        return Rational(num);
    }
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
    Rational q(1, num);
    q.canonicalize();
    return q;
}

Rational u_of(int k) {
    Rational prod = 1;
    for (int l = 1; l <= k - 1; ++l) prod *= 1 - pow2(-l);
    return 1 / prod;
}

Rational v_of(int k) {
    Rational val = pow2(-static_cast<long>(k) * (k + 1) / 2) * u_of(k + 1);
    return (k % 2 == 0) ? val : -val;
}

}  // namespace

RombergWeights weights(int r) {
    if (r < 1) throw ConfigError("romberg order must be >= 1");
    if (r > 12) throw ConfigError("romberg order above 12 is unsupported");
    RombergWeights wt;
    wt.order = r;
    wt.refiners.resize(r);
    for (int i = 0; i < r; ++i) wt.refiners[i] = 1L << i;
    wt.u.reserve(r);
    wt.v.reserve(r);
    wt.w.reserve(r);
    for (int k = 1; k <= r; ++k) wt.u.push_back(u_of(k));
    for (int k = 0; k < r; ++k) wt.v.push_back(v_of(k));
    for (int k = 1; k <= r; ++k) wt.w.push_back(wt.u[k - 1] * wt.v[r - k]);
    return wt;
}

std::vector<Rational> vandermonde_residual(const RombergWeights& wt) {
    std::vector<Rational> res;
    res.reserve(wt.order);
    for (int k = 0; k < wt.order; ++k) {
        Rational sum = 0;
        for (int i = 0; i < wt.order; ++i) sum += wt.w[i] * pow2(-static_cast<long>(i) * k);
        if (k == 0) sum -= 1;
        res.push_back(sum);
    }
    return res;
}

double u_infinity() {
    double prod = 1.0;
    for (int l = 1; l <= 64; ++l) prod *= 1.0 - std::ldexp(1.0, -l);
    return 1.0 / prod;
}

WeightBounds weight_bound_checks(const RombergWeights& wt) {
    const int r = wt.order;
    // sum |w_i| n_i^{-r} is rational: accumulate exactly, round once.
    Rational sum_n = 0;
    for (int i = 1; i <= r; ++i)
        sum_n += abs(wt.w[i - 1]) * pow2(-static_cast<long>(i - 1) * r);
    WeightBounds out;
    out.sum_w_over_n_r = sum_n.get_d();
    // sum |w_i| 2^{(i-1)/2} mixes in sqrt(2); double precision suffices here.
    double s2 = 0.0;
    for (int i = 1; i <= r; ++i)
        s2 += std::abs(wt.w[i - 1].get_d()) * std::exp2(0.5 * (i - 1));
    out.sum_w_2_half = s2;
    const double ui2 = u_infinity() * u_infinity();
    out.u_inf_sq = ui2;
    double envelope_n = 0.0;
    for (int i = 0; i < r; ++i) envelope_n += std::exp2(-0.5 * i);
    out.within_envelopes =
        out.sum_w_over_n_r <= ui2 * envelope_n && out.sum_w_2_half <= ui2 * std::exp2(r);
    return out;
}

int adaptive_order(double t) {
    if (!(t > 0.0)) throw PreconditionError("adaptive_order requires t > 0");
    if (t >= 1.0) return 1;  // degenerate: formula leaves (0,1)
    // Nudge by 1e-9 so exact-arithmetic boundary cases (t = e^{-k^2}) are not
    // pushed down an order by the last ulp of log/sqrt.
    const double s = std::sqrt(std::log(1.0 / t));
    const int r = static_cast<int>(std::floor(s + 1e-9));
    return r < 1 ? 1 : r;
}

std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace sdetv
