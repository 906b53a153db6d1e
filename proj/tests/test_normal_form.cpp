#include "wkg/fixtures.hpp"
#include "wkg/null_analyzer.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace wkg;

namespace {

/// Point sample with independently chosen values and first derivatives.
struct RandomSample {
    std::map<int, double> val, dt;
    std::map<std::pair<int, int>, double> dx;

    static RandomSample make(std::mt19937_64& rng, int N, double scale) {
        std::uniform_real_distribution<double> u(-scale, scale);
        RandomSample s;
        for (int c = 1; c <= N; ++c) {
            s.val[c] = u(rng);
            s.dt[c] = u(rng);
            for (int k = 1; k <= 3; ++k) s.dx[{c, k}] = u(rng);
        }
        return s;
    }

    PointSample view() const {
        PointSample p;
        p.val = [this](int c) { return val.at(c); };
        p.dt = [this](int c) { return dt.at(c); };
        p.dx = [this](int c, int k) { return dx.at({c, k}); };
        return p;
    }
};

} // namespace

TEST_CASE("normal form shift reproduces the hand-derived transformed system") {
    const SystemSpec raw = get_fixture("kg_shift_raw").spec;
    const SystemSpec handmade = get_fixture("kg_shift_transformed").spec;
    const SystemSpec gen = normal_form_transform(raw);

    CHECK(gen.N == raw.N);
    CHECK(gen.N1 == raw.N1);
    // Quadratic parts agree with the hand transformation exactly.
    CHECK(gen.F[0] == handmade.F[0]);
    CHECK(gen.F[1] == handmade.F[1]);

    // The generated tails agree numerically with the hand-written ones.
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const RandomSample s = RandomSample::make(rng, raw.N, 0.8);
        const PointSample p = s.view();
        for (int e = 0; e < 2; ++e) {
            REQUIRE(gen.tails[e].has_value());
            REQUIRE(handmade.tails[e].has_value());
            const double a = gen.tails[e]->eval(p);
            const double b = handmade.tails[e]->eval(p);
            CHECK(a == Catch::Approx(b).margin(1e-12));
        }
    }
}

TEST_CASE("the transformed resonant model satisfies the hypotheses") {
    const auto rep = analyze_system(normal_form_transform(get_fixture("kg_shift_raw").spec));
    CHECK(rep.theorem_applies);
    CHECK(rep.partition.ok);
    CHECK(rep.partition.I1 == std::set<int>{1});
    CHECK(rep.partition.I2 == std::set<int>{});
}

TEST_CASE("normal form shift is the identity without wave-wave sources") {
    const SystemSpec s = get_fixture("mixed_interaction_model").spec;
    // The Klein-Gordon equation of this fixture has wave-wave terms; strip them
    // to obtain a shift-free system.
    SystemSpec t = s;
    t.F[0] = split_form(s.F[0], s.N1).K + split_form(s.F[0], s.N1).KW;
    const SystemSpec gen = normal_form_transform(t);
    for (int e = 0; e < t.N; ++e) {
        CHECK(gen.F[e] == t.F[e]);
        CHECK_FALSE(gen.tails[e].has_value());
    }
}

TEST_CASE("normal form shift validates its applicability") {
    SECTION("pre-existing tails are rejected") {
        CHECK_THROWS_AS(normal_form_transform(get_fixture("kg_shift_transformed").spec),
                        SpecError);
    }
    SECTION("differentiated wave-wave sources are rejected") {
        SystemSpec s = get_fixture("kg_shift_raw").spec;
        s.F[0] = {};
        s.F[0].add(VarRef::first(2, 0), VarRef::plain(2), 1);
        CHECK_THROWS_AS(normal_form_transform(s), SpecError);
    }
    SECTION("second-derivative factors are rejected") {
        SystemSpec s = get_fixture("kg_shift_raw").spec;
        s.F[1].add(VarRef::second(2, 1, 1), VarRef::plain(1), 1);
        CHECK_THROWS_AS(normal_form_transform(s), SpecError);
    }
}

TEST_CASE("generated quadratic parts insert Q0 with the mass-scaled weight") {
    // (box + 4) v = 3 w^2 with mass 2: the shift must produce -2 * (1/4) * 3 Q0.
    SystemSpec s;
    s.name = "mass_scaled";
    s.N = 2;
    s.N1 = 1;
    s.masses = {2.0, 0.0};
    s.F.assign(2, {});
    s.tails.assign(2, std::nullopt);
    s.F[0].add(VarRef::plain(2), VarRef::plain(2), 3);
    const SystemSpec gen = normal_form_transform(s);
    QuadraticForm expect;
    add_q0(expect, 2, 2, Rational(-3, 2));
    CHECK(gen.F[0] == expect);
}
