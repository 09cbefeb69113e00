#include <doctest.h>

#include <cmath>

#include "sdetv/errors.hpp"
#include "sdetv/model.hpp"
#include "sdetv/rng.hpp"

using namespace sdetv;

TEST_CASE("gbm coefficients") {
    const SdeModel m = builtin_model("gbm", {1.0});
    CHECK(m.drift(0.0, 2.0) == doctest::Approx(1.0));
    CHECK(m.diffusion(0.0, 2.0) == doctest::Approx(2.0));
    CHECK(m.drift(3.7, 2.0) == doctest::Approx(1.0));  // autonomous
    CHECK(m.exact_law == ExactLaw::gbm_lognormal);
    CHECK(m.gbm_sigma == 1.0);
}

TEST_CASE("sine-diffusion noise stays inside [0.5, 1.5]") {
    const SdeModel m = builtin_model("sine-diffusion", {});
    double lo = 10.0, hi = -10.0;
    for (int i = 0; i <= 2000; ++i) {
        const double y = -25.0 + i * 0.025;
        const double s = m.diffusion(0.0, y);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    CHECK(lo >= 0.5);
    CHECK(hi <= 1.5);
    CHECK(lo == doctest::Approx(0.5).epsilon(1e-4));  // grid-resolution attainment
    CHECK(hi == doctest::Approx(1.5).epsilon(1e-4));
}

TEST_CASE("smooth clamp matches the hard clamp away from the kinks") {
    const double eps = 0.1;
    SUBCASE("identity on the inner window") {
        for (double y : {0.2, 0.5, 1.0, 3.0, 5.0}) CHECK(smooth_clamp(y, eps) == y);
    }
    SUBCASE("flat tails") {
        for (double y : {-4.0, 0.0, 0.05}) CHECK(smooth_clamp(y, eps) == eps);
        for (double y : {20.0, 1e6}) CHECK(smooth_clamp(y, eps) == 1.0 / eps);
    }
    SUBCASE("globally bounded with a small margin") {
        double worst = 0.0;
        for (int i = 0; i <= 40000; ++i) worst = std::max(worst, smooth_clamp(-2.0 + i * 4e-4, eps));
        CHECK(worst <= 1.0 / eps + eps);
    }
    SUBCASE("never loses ellipticity") {
        for (int i = 0; i <= 40000; ++i) CHECK(smooth_clamp(-2.0 + i * 4e-4, eps) >= 0.98 * eps);
    }
}

TEST_CASE("clamped-gbm equals gbm on the matching region") {
    const SdeModel clamped = builtin_model("clamped-gbm", {1.0, 0.1});
    const SdeModel plain = builtin_model("gbm", {1.0});
    for (double y : {0.2, 0.7, 1.0, 2.5, 5.0}) {
        CHECK(clamped.diffusion(0.0, y) == plain.diffusion(0.0, y));
        CHECK(clamped.drift(0.0, y) == plain.drift(0.0, y));
    }
}

TEST_CASE("euler proxy freezes coefficients at (0, x)") {
    SUBCASE("gbm at x=1") {
        const SdeModel p = euler_proxy(builtin_model("gbm", {1.0}), 1.0);
        for (double t : {0.0, 0.5, 2.0})
            for (double y : {-3.0, 0.0, 7.0}) {
                CHECK(p.drift(t, y) == doctest::Approx(0.5));
                CHECK(p.diffusion(t, y) == doctest::Approx(1.0));
            }
        CHECK(p.exact_law == ExactLaw::gaussian);
    }
    SUBCASE("sine-diffusion at x=0") {
        const SdeModel p = euler_proxy(builtin_model("sine-diffusion", {}), 0.0);
        CHECK(p.drift(0.3, 9.0) == doctest::Approx(1.0));
        CHECK(p.diffusion(0.3, 9.0) == doctest::Approx(1.0));
    }
    SUBCASE("idempotent") {
        const CounterRng rng(7, 0);
        for (int i = 0; i < 20; ++i) {
            const double x = 3.0 * rng.normal(static_cast<std::uint64_t>(i));
            const SdeModel once = euler_proxy(builtin_model("sine-diffusion", {}), x);
            const SdeModel twice = euler_proxy(once, x);
            for (double y : {-1.0, 0.0, 2.0}) {
                CHECK(once.drift(0.0, y) == twice.drift(0.0, y));
                CHECK(once.diffusion(0.0, y) == twice.diffusion(0.0, y));
            }
        }
    }
}

TEST_CASE("coefficient gaps") {
    const SdeModel gbm = builtin_model("gbm", {1.0});
    const SdeModel ou = builtin_model("ou", {1.0, 1.0});
    const SdeModel sine = builtin_model("sine-diffusion", {});

    SUBCASE("proxy pair has zero gaps") {
        for (double x : {0.5, 1.0, 2.0}) {
            const ModelPair pair(gbm, euler_proxy(gbm, x), x, 1.0);
            CHECK(delta_b(pair, x) == 0.0);
            CHECK(delta_sigma(pair, x) == 0.0);
        }
    }
    SUBCASE("gbm vs ou at x=1") {
        const ModelPair pair(gbm, ou, 1.0, 1.0);
        CHECK(delta_b(pair, 1.0) == doctest::Approx(1.5));
        CHECK(delta_sigma(pair, 1.0) == doctest::Approx(0.0));
    }
    SUBCASE("identical models") {
        const ModelPair pair(sine, sine, 0.0, 1.0);
        CHECK(delta_b(pair, 0.33) == 0.0);
        CHECK(delta_sigma(pair, 0.33) == 0.0);
    }
    SUBCASE("symmetry and triangle inequality") {
        const CounterRng rng(11, 1);
        for (int i = 0; i < 25; ++i) {
            const double x = 2.0 * rng.normal(static_cast<std::uint64_t>(i));
            const ModelPair ab(gbm, ou, x, 1.0), ba(ou, gbm, x, 1.0);
            const ModelPair ac(gbm, sine, x, 1.0), cb(sine, ou, x, 1.0);
            CHECK(delta_b(ab, x) == delta_b(ba, x));
            CHECK(delta_sigma(ab, x) == delta_sigma(ba, x));
            CHECK(delta_b(ab, x) <= delta_b(ac, x) + delta_b(cb, x) + 1e-15);
            CHECK(delta_sigma(ab, x) <= delta_sigma(ac, x) + delta_sigma(cb, x) + 1e-15);
        }
    }
}

TEST_CASE("ellipticity scan") {
    std::vector<double> grid, times = {0.0};
    for (int i = 0; i <= 4000; ++i) grid.push_back(-10.0 + i * 0.005);

    SUBCASE("sine-diffusion floor is one quarter") {
        const double h = ellipticity_check(builtin_model("sine-diffusion", {}), grid, times);
        CHECK(h == doctest::Approx(0.25).epsilon(1e-4));
        CHECK(h >= 0.25);
    }
    SUBCASE("gbm degenerates near zero") {
        const double h = ellipticity_check(builtin_model("gbm", {1.0}), grid, times);
        CHECK(h < 1e-5);
    }
    SUBCASE("constant diffusion") {
        const double h = ellipticity_check(builtin_model("brownian-drift", {0.0, 2.5}), grid, times);
        CHECK(h == doctest::Approx(6.25));
    }
}

TEST_CASE("catalog rejects unknown names and bad parameters") {
    CHECK_THROWS_AS(builtin_model("gmb", {1.0}), ConfigError);
    try {
        builtin_model("gmb", {1.0});
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("unknown model 'gmb'") != std::string::npos);
        for (const auto& name : catalog_names()) CHECK(what.find(name) != std::string::npos);
    }
    CHECK_THROWS_AS(builtin_model("gbm", {-1.0}), ConfigError);
    CHECK_THROWS_AS(builtin_model("gbm", {}), ConfigError);
    CHECK_THROWS_AS(builtin_model("clamped-gbm", {1.0, 0.6}), ConfigError);
    CHECK_THROWS_AS(builtin_model("clamped-gbm", {0.0, 0.1}), ConfigError);
    CHECK_THROWS_AS(builtin_model("ou", {1.0}), ConfigError);
}

TEST_CASE("model pair validation") {
    const SdeModel a = builtin_model("gbm", {1.0});
    CHECK_THROWS_AS(ModelPair(a, a, 1.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(ModelPair(a, a, 1.0, -2.0), PreconditionError);
    SdeModel b = a;
    b.dimension = 2;
    CHECK_THROWS_AS(ModelPair(a, b, 1.0, 1.0), PreconditionError);
}
