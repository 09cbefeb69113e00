#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "sdetv/density.hpp"
#include "sdetv/errors.hpp"
#include "sdetv/model.hpp"
#include "sdetv/quadrature.hpp"

using namespace sdetv;

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}

TEST_CASE("closed-form density evaluation") {
    const auto logn = ClosedFormDensity::gbm_lognormal(1.0, 1.0, 1.0);
    CHECK(logn.pdf(1.0) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-12));
    CHECK(logn.pdf(-1.0) == 0.0);
    CHECK(logn.pdf(0.0) == 0.0);

    const auto gauss = ClosedFormDensity::gaussian(0.0, 1.0);
    CHECK(gauss.pdf(0.0) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-12));
    CHECK(gauss.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));

    SUBCASE("unit mass by quadrature") {
        for (const auto* d : {&logn, &gauss}) {
            auto [lo, hi] = d->support(13.0);
            const double mass = integrate([d](double y) { return d->pdf(y); }, lo, hi, 1e-12);
            CHECK(std::abs(mass - 1.0) < 1e-10);
        }
    }
    SUBCASE("lognormal mean identity") {
        CHECK(logn.mean() == doctest::Approx(std::exp(0.5)).epsilon(1e-14));
    }
}

TEST_CASE("one-step euler law") {
    SUBCASE("gbm at x=1, t=0.01") {
        const auto law = euler_one_step_density(builtin_model("gbm", {1.0}), 1.0, 0.01);
        CHECK(law.gauss_mean() == doctest::Approx(1.005).epsilon(1e-15));
        CHECK(law.gauss_var() == doctest::Approx(0.01).epsilon(1e-15));
    }
    SUBCASE("driftless brownian") {
        const auto law = euler_one_step_density(builtin_model("brownian-drift", {0.0, 1.0}), 0.0, 0.3);
        CHECK(law.gauss_mean() == 0.0);
        CHECK(law.gauss_var() == doctest::Approx(0.3));
    }
    SUBCASE("ou frozen at (0, 2)") {
        const auto law = euler_one_step_density(builtin_model("ou", {1.0, 1.0}), 2.0, 0.1);
        CHECK(law.gauss_mean() == doctest::Approx(1.8).epsilon(1e-15));
        CHECK(law.gauss_var() == doctest::Approx(0.1).epsilon(1e-15));
    }
    SUBCASE("vanishing diffusion is degenerate") {
        SdeModel flat;
        flat.name = "flat";
        flat.drift = [](double, double) { return 0.0; };
        flat.diffusion = [](double, double) { return 0.0; };
        CHECK_THROWS_AS(euler_one_step_density(flat, 0.0, 0.1), PreconditionError);
    }
}

TEST_CASE("exact transition laws by tag") {
    const auto ou = exact_density(builtin_model("ou", {1.0, 1.0}), 2.0, 0.5);
    CHECK(ou.gauss_mean() == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-14));
    CHECK(ou.gauss_var() == doctest::Approx(0.5 * (1.0 - std::exp(-1.0))).epsilon(1e-14));

    const auto gbm = exact_density(builtin_model("gbm", {0.7}), 1.5, 0.25);
    CHECK(gbm.kind() == ClosedFormDensity::Kind::gbm_lognormal);

    CHECK_THROWS_AS(exact_density(builtin_model("sine-diffusion", {}), 0.0, 0.1),
                    PreconditionError);
}

TEST_CASE("hermite recurrence") {
    CHECK(hermite(0, 5.0) == 1.0);
    CHECK(hermite(1, -2.5) == -2.5);
    CHECK(hermite(2, 2.0) == doctest::Approx(3.0));   // u^2 - 1
    CHECK(hermite(3, 2.0) == doctest::Approx(2.0));   // u^3 - 3u
    SUBCASE("matches explicit polynomials") {
        for (double u : {-3.0, -0.7, 0.0, 0.4, 1.9}) {
            CHECK(hermite(4, u) == doctest::Approx(u * u * u * u - 6 * u * u + 3).epsilon(1e-12));
            CHECK(hermite(5, u) ==
                  doctest::Approx(std::pow(u, 5) - 10 * u * u * u + 15 * u).epsilon(1e-12));
            CHECK(hermite(6, u) ==
                  doctest::Approx(std::pow(u, 6) - 15 * std::pow(u, 4) + 45 * u * u - 15)
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("gaussian density derivatives") {
    SUBCASE("order zero is the density") {
        const auto g = ClosedFormDensity::gaussian(0.3, 2.0);
        for (double y : {-1.0, 0.3, 2.2})
            CHECK(gaussian_density_deriv(0, 0.3, 2.0, y) == doctest::Approx(g.pdf(y)).epsilon(1e-14));
    }
    SUBCASE("odd symmetry at the mean") { CHECK(gaussian_density_deriv(1, 0.0, 1.0, 0.0) == 0.0); }
    SUBCASE("curvature at the standard peak") {
        CHECK(gaussian_density_deriv(2, 0.0, 1.0, 0.0) == doctest::Approx(-kInvSqrt2Pi).epsilon(1e-12));
    }
    SUBCASE("five-point differences of the next-lower order, r <= 6") {
        const double mu = 0.3, v = 2.0, h = 1e-4;
        for (int r = 1; r <= 6; ++r) {
            double scale = 0.0;
            for (int i = 0; i <= 40; ++i) {
                const double y = mu + std::sqrt(v) * (-5.0 + 0.25 * i);
                scale = std::max(scale, std::abs(gaussian_density_deriv(r, mu, v, y)));
            }
            for (int i = 0; i <= 40; ++i) {
                const double y = mu + std::sqrt(v) * (-5.0 + 0.25 * i);
                const double exact = gaussian_density_deriv(r, mu, v, y);
                const double fd = oracles::central_diff_5pt(
                    [&](double z) { return gaussian_density_deriv(r - 1, mu, v, z); }, y, h);
                CHECK(std::abs(fd - exact) <= 1e-6 * std::max(std::abs(exact), 1e-3 * scale));
            }
        }
    }
    SUBCASE("plain second difference of the density itself") {
        const double mu = 0.0, v = 1.0, h = 1e-4;
        auto pdf = [&](double y) { return gaussian_density_deriv(0, mu, v, y); };
        for (double y : {-1.7, -0.3, 0.0, 0.8, 2.4}) {
            const double fd = (pdf(y + h) - 2.0 * pdf(y) + pdf(y - h)) / (h * h);
            const double exact = gaussian_density_deriv(2, mu, v, y);
            CHECK(std::abs(fd - exact) <= 2e-6 * std::max(std::abs(exact), 1e-2));
        }
    }
}

TEST_CASE("integrated derivative norms") {
    CHECK(deriv_l1_norm(0, 3.7) == 1.0);
    CHECK(deriv_l1_norm(1, 1.0) ==
          doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-9));

    SUBCASE("absolute Hermite moments at unit variance") {
        CHECK(deriv_l1_norm(2, 1.0) == doctest::Approx(0.967882898).epsilon(1e-7));
        CHECK(deriv_l1_norm(3, 1.0) == doctest::Approx(1.510013000).epsilon(1e-7));
        CHECK(deriv_l1_norm(4, 1.0) == doctest::Approx(2.800600301).epsilon(1e-7));
        CHECK(deriv_l1_norm(6, 1.0) == doctest::Approx(13.815597048).epsilon(1e-7));
    }
    SUBCASE("variance scaling t^{-r/2}") {
        for (int r : {1, 2, 3, 4}) {
            for (double t : {0.01, 0.1, 0.5}) {
                const double lhs = deriv_l1_norm(r, t * 1.0);
                const double rhs = std::pow(t, -0.5 * r) * deriv_l1_norm(r, 1.0);
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("fokker-planck heat kernel") {
    const SdeModel bm = builtin_model("brownian-drift", {0.0, 1.0});
    FpGridSpec spec;
    const DensityGrid grid = fokker_planck_solve(bm, 0.0, 0.5, spec);
    const auto exact = ClosedFormDensity::gaussian(0.0, 0.5);

    double sup = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        const double err = std::abs(grid.values[i] - exact.pdf(grid.point(i)));
        sup = std::max(sup, err);
        l1 += err * grid.dx;
    }
    CHECK(sup < 1e-3);
    CHECK(l1 < 1e-3);
    CHECK(std::abs(grid.mass() - 1.0) < 1e-6);

    SUBCASE("peak value") {
        double peak = 0.0;
        for (double v : grid.values) peak = std::max(peak, v);
        CHECK(peak == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-3));
    }
    SUBCASE("second-order convergence under refinement") {
        double errs[2];
        int idx = 0;
        for (int n : {501, 1001}) {
            FpGridSpec coarse;
            coarse.n_points = n;
            coarse.n_time_steps = n / 5;
            const DensityGrid g = fokker_planck_solve(bm, 0.0, 0.5, coarse);
            double e = 0.0;
            for (std::size_t i = 0; i < g.values.size(); ++i)
                e += std::abs(g.values[i] - exact.pdf(g.point(i))) * g.dx;
            errs[idx++] = e;
        }
        const double order = std::log2(errs[0] / errs[1]);
        CHECK(order >= 1.8);
    }
}

TEST_CASE("fokker-planck against the gbm lognormal") {
    const SdeModel gbm = builtin_model("gbm", {1.0});
    const DensityGrid grid = fokker_planck_solve(gbm, 1.0, 0.05, FpGridSpec{});
    const auto exact = ClosedFormDensity::gbm_lognormal(1.0, 1.0, 0.05);
    double l1 = 0.0;
    for (std::size_t i = 0; i < grid.values.size(); ++i)
        l1 += std::abs(grid.values[i] - exact.pdf(grid.point(i))) * grid.dx;
    CHECK(l1 < 1e-3);
    CHECK(grid.lo > 0.0);  // metric support never reaches 0 for gbm
    CHECK(std::abs(grid.mass() - 1.0) < 1e-6);
}

TEST_CASE("fokker-planck preconditions and failure modes") {
    SUBCASE("non-elliptic grid is rejected") {
        const SdeModel gbm = builtin_model("gbm", {1.0});
        FpGridSpec spec;
        spec.lo = -1.0;  // sigma(y) = y crosses zero here
        spec.hi = 3.0;
        CHECK_THROWS_AS(fokker_planck_solve(gbm, 1.0, 0.05, spec), PreconditionError);
    }
    SUBCASE("narrow box loses mass") {
        const SdeModel bm = builtin_model("brownian-drift", {0.0, 1.0});
        FpGridSpec spec;
        spec.width_sigmas = 1.5;  // Dirichlet walls absorb real mass
        CHECK_THROWS_AS(fokker_planck_solve(bm, 0.0, 0.5, spec), SolverError);
    }
}

TEST_CASE("rescaled small-t solve agrees with the physical one") {
    const SdeModel sine = builtin_model("sine-diffusion", {});
    const double t = 5e-4;  // below the rescale threshold
    FpGridSpec rescaled;  // default: rescale_below = 1e-3
    FpGridSpec physical;
    physical.rescale_below = 0.0;
    const DensityGrid a = fokker_planck_solve(sine, 0.0, t, rescaled);
    const DensityGrid b = fokker_planck_solve(sine, 0.0, t, physical);
    REQUIRE(a.values.size() == b.values.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]) * a.dx);
    CHECK(worst < 1e-10);
}

TEST_CASE("metric support reduces to the familiar boxes") {
    SUBCASE("constant diffusion") {
        const SdeModel bm = builtin_model("brownian-drift", {0.0, 2.0});
        auto [lo, hi] = metric_support(bm, 1.0, 0.25, 10.0);
        CHECK(lo == doctest::Approx(1.0 - 10.0 * 2.0 * 0.5).epsilon(1e-9));
        CHECK(hi == doctest::Approx(1.0 + 10.0 * 2.0 * 0.5).epsilon(1e-9));
    }
    SUBCASE("gbm grows exponentially") {
        const SdeModel gbm = builtin_model("gbm", {1.0});
        auto [lo, hi] = metric_support(gbm, 1.0, 0.05, 10.0);
        CHECK(lo == doctest::Approx(std::exp(-10.0 * std::sqrt(0.05))).epsilon(1e-6));
        CHECK(hi == doctest::Approx(std::exp(10.0 * std::sqrt(0.05))).epsilon(1e-6));
    }
}

TEST_CASE("aronson envelope") {
    SUBCASE("heat kernel constants") {
        // Analytic grid: the fit should recover C = 1/sqrt(2 pi), c <= 1/2.
        DensityGrid grid;
        grid.lo = -10.0;
        grid.hi = 10.0;
        grid.dx = 20.0 / 4000;
        grid.values.resize(4001);
        const auto exact = ClosedFormDensity::gaussian(0.0, 0.5);
        for (std::size_t i = 0; i < grid.values.size(); ++i)
            grid.values[i] = exact.pdf(grid.point(i));
        EnvelopeFitOptions opts;
        opts.sigma_max = 1.0;
        const AronsonEnvelope env = aronson_envelope_fit(grid, 0.0, 0.5, opts);
        CHECK(env.big_c == doctest::Approx(kInvSqrt2Pi).epsilon(1e-6));
        CHECK(env.small_c <= 0.5 + 1e-12);
        CHECK(env.small_c > 0.38);
        // Exact pair dominates with equality at y = x.
        CHECK(env.at(0.0, 0.0) >= exact.pdf(0.0) * (1.0 - 1e-12));
        SUBCASE("domination on the fitted grid") {
            for (std::size_t i = 0; i < grid.values.size(); ++i)
                CHECK(grid.values[i] <= env.at(grid.point(i), 0.0) + 1e-12);
        }
        SUBCASE("self-similar domination after rescaling time") {
            const double s = 0.125;
            const auto smaller = ClosedFormDensity::gaussian(0.0, s);
            AronsonEnvelope scaled{env.big_c, env.small_c, s};
            for (double y = -2.0; y <= 2.0; y += 0.01)
                CHECK(smaller.pdf(y) <= scaled.at(y, 0.0) * (1.0 + 1e-9) + 1e-300);
        }
    }
    SUBCASE("sine-diffusion lands inside the diffusivity range") {
        const SdeModel sine = builtin_model("sine-diffusion", {});
        const DensityGrid grid = fokker_planck_solve(sine, 0.0, 0.05, FpGridSpec{});
        const AronsonEnvelope env = aronson_envelope_fit(grid, 0.0, 0.05);
        CHECK(env.small_c >= 1.0 / (2.0 * 1.5 * 1.5));
        CHECK(env.small_c <= 1.0 / (2.0 * 0.5 * 0.5));
        double peak = 0.0;
        for (double v : grid.values) peak = std::max(peak, v);
        for (std::size_t i = 0; i < grid.values.size(); ++i) {
            if (grid.values[i] <= 1e-12 * peak) continue;  // below the fit floor
            CHECK(grid.values[i] <= env.at(grid.point(i), 0.0) * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("density grid csv serialization") {
    DensityGrid grid;
    grid.lo = 0.0;
    grid.hi = 1.0;
    grid.dx = 0.5;
    grid.values = {0.25, 1.5, 0.25};
    std::ostringstream os;
    grid.write_csv(os);
    const std::string text = os.str();
    CHECK(text.rfind("y,p\n", 0) == 0);
    CHECK(text.find("0.5,1.5") != std::string::npos);
}
