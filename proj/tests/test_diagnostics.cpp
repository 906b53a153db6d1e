#include "wkg/diagnostics.hpp"
#include "wkg/weights.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace wkg;

TEST_CASE("fit_decay_exponent recovers exact power laws") {
    std::vector<double> t, v;
    for (int i = 1; i <= 40; ++i) {
        t.push_back(5.0 * i);
        v.push_back(3.7 * std::pow(5.0 * i, -1.5));
    }
    CHECK(fit_decay_exponent(t, v) == Catch::Approx(-1.5).margin(1e-12));

    std::vector<double> c(t.size(), 2.0);
    CHECK(fit_decay_exponent(t, c) == Catch::Approx(0.0).margin(1e-12));

    CHECK_THROWS_AS(fit_decay_exponent({1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_decay_exponent({1.0, 2.0}, {1.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_decay_exponent({0.0, 2.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("bracket weight and its branches") {
    CHECK(jb(0.0) == 1.0);
    CHECK(jb(-3.0) == jb(3.0));
    CHECK(jb(4.0) == Catch::Approx(std::sqrt(17.0)));

    // rho < 0: decays in t + r.
    CHECK(weight_W(-0.5, 10.0, 5.0) == Catch::Approx(std::pow(jb(15.0), -0.5)));
    // rho = 0: inverse logarithm of the cone-distance ratio.
    CHECK(weight_W(0.0, 10.0, 5.0) ==
          Catch::Approx(1.0 / std::log(2.0 + jb(15.0) / jb(5.0))));
    // rho > 0: decays in t - r.
    CHECK(weight_W(0.7, 10.0, 5.0) == Catch::Approx(std::pow(jb(5.0), 0.7)));
}

TEST_CASE("W_minus is dominated by both of its brackets") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int i = 0; i < 500; ++i) {
        const double t = u(rng), r = u(rng);
        const double wm = weight_Wminus(t, r);
        CHECK(wm <= jb(r) + 1e-14);
        CHECK(wm <= jb(t - r) + 1e-14);
        CHECK(wm >= 1.0);
    }
}

TEST_CASE("the weight comparison holds with constant 3 and is near-sharp") {
    // <t+r> W_-(t,r) <= 3 <r> <t-r> over the sampled quadrant; the constant
    // is attained (up to discretization) near t = 2r.
    const double ratio = weight_comparison_ratio();
    CHECK(ratio <= 1.0);
    CHECK(ratio > 0.95);

    // Direct near-sharp witness: t = 2r, r large.
    const double t = 90.0, r = 45.0;
    CHECK(jb(t + r) * weight_Wminus(t, r) / (jb(r) * jb(t - r)) > 2.9);
}

TEST_CASE("analytic field derivatives are consistent with finite differences") {
    auto fields = analytic_field_family(61);
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> ut(0.5, 8.0), ux(-4.0, 4.0);
    const double h = 1e-5;
    for (const auto& F : fields)
        for (int trial = 0; trial < 10; ++trial) {
            Point p;
            p.t = ut(rng);
            for (auto& xi : p.x) xi = ux(rng);
            const FieldEval e = F(p);
            for (int a = 0; a < 4; ++a) {
                Point pm = p, pp = p;
                if (a == 0) {
                    pm.t -= h;
                    pp.t += h;
                } else {
                    pm.x[a - 1] -= h;
                    pp.x[a - 1] += h;
                }
                CHECK(e.d[a] == Catch::Approx((F(pp).f - F(pm).f) / (2 * h)).margin(1e-6));
                for (int b = 0; b < 4; ++b)
                    CHECK(e.d2[a][b] ==
                          Catch::Approx((F(pp).d[b] - F(pm).d[b]) / (2 * h)).margin(1e-6));
            }
        }
}

TEST_CASE("frame identity suite residuals are at roundoff level") {
    const auto suite = frame_identity_suite(1000, 4242);
    CHECK(suite.size() == 8);
    for (const auto& rep : suite) {
        INFO(rep.name);
        CHECK(rep.max_abs_residual <= 1e-10);
    }
}

TEST_CASE("null-form pointwise bound has positive margin") {
    const double ratio = null_form_bound_ratio(2000, 999);
    CHECK(ratio > 0.0);   // not vacuous
    CHECK(ratio <= 1.0);  // bounded by the documented empirical constant
}

TEST_CASE("weighted Sobolev ratio is finite and stable under dilation") {
    // sobolev_bound_ratio sweeps widths 0.3..8: a uniform bound across the
    // family reflects the scale behavior of the inequality.
    const double ratio = sobolev_bound_ratio();
    CHECK(ratio > 0.0);
    CHECK(ratio < 1.0);
}

TEST_CASE("spherical-means oracle properties") {
    auto w0 = [](double r) { return std::exp(-r * r); };

    SECTION("initial data is reproduced") {
        for (double r : {0.0, 0.3, 1.0, 2.5})
            CHECK(dalembert_radial(w0, 0.0, r) == Catch::Approx(w0(r)).margin(1e-9));
    }
    SECTION("the origin limit is w0(t) + t w0'(t)") {
        for (double t : {0.5, 1.0, 2.0}) {
            const double expect = std::exp(-t * t) * (1.0 - 2.0 * t * t);
            CHECK(dalembert_radial(w0, t, 0.0) == Catch::Approx(expect).margin(1e-6));
        }
    }
    SECTION("the solution satisfies the wave equation") {
        const double h = 1e-4;
        for (double t : {1.0, 3.0})
            for (double r : {0.5, 1.5, 4.0}) {
                auto u = [&](double tt, double rr) { return dalembert_radial(w0, tt, rr); };
                const double utt = (u(t + h, r) - 2 * u(t, r) + u(t - h, r)) / (h * h);
                const double urr = (u(t, r + h) - 2 * u(t, r) + u(t, r - h)) / (h * h);
                const double ur = (u(t, r + h) - u(t, r - h)) / (2 * h);
                CHECK(utt == Catch::Approx(urr + 2.0 * ur / r).margin(1e-4));
            }
    }
    SECTION("strong Huygens: zero strictly inside the cone for compact data") {
        auto bump = [](double r) { return r < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0; };
        for (double t : {3.0, 5.0})
            for (double r : {0.0, 0.5, t - 1.5})
                CHECK(dalembert_radial(bump, t, r) == Catch::Approx(0.0).margin(1e-12));
    }
}
