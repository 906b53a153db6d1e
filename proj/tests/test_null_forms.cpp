#include "wkg/diagnostics.hpp"
#include "wkg/null_forms.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace wkg;

namespace {

/// Evaluates a quadratic form (possibly with second-derivative factors) on a
/// tuple of analytic fields at a point, using the exact coded derivatives.
double eval_form_on_fields(const QuadraticForm& f, const std::vector<FieldEval>& e) {
    return f.eval_d([&](const VarRef& v) {
        const FieldEval& u = e[v.component - 1];
        switch (v.kind) {
            case DerivKind::None: return u.f;
            case DerivKind::First: return u.d[v.a];
            default: return u.d2[v.k][v.a];
        }
    });
}

Point random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ut(0.3, 10.0), ux(-5.0, 5.0);
    Point p;
    p.t = ut(rng);
    for (auto& xi : p.x) xi = ux(rng);
    return p;
}

} // namespace

TEST_CASE("formal_derivative follows the derivative ladder") {
    CHECK(*formal_derivative(VarRef::plain(3), 2) == VarRef::first(3, 2));
    CHECK(*formal_derivative(VarRef::first(3, 2), 1) == VarRef::second(3, 1, 2));
    CHECK(*formal_derivative(VarRef::first(1, 0), 0) == VarRef::second(1, 0, 0));
    CHECK_FALSE(formal_derivative(VarRef::second(1, 1, 2), 0).has_value());
}

TEST_CASE("expand_q0 matches direct evaluation on analytic fields") {
    auto fields = analytic_field_family(11);
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<std::size_t> pick(0, fields.size() - 1);
    for (int trial = 0; trial < 100; ++trial) {
        const Point p = random_point(rng);
        const FieldEval f = fields[pick(rng)](p), g = fields[pick(rng)](p);
        const auto q = expand_q0(VarRef::plain(1), VarRef::plain(2));
        REQUIRE(q.has_value());
        const double direct = frame::q0(f, g);
        CHECK(eval_form_on_fields(*q, {f, g}) == Catch::Approx(direct).margin(1e-12));
    }
}

TEST_CASE("expand_qab matches direct evaluation and is antisymmetric") {
    auto fields = analytic_field_family(21);
    std::mt19937_64 rng(22);
    std::uniform_int_distribution<std::size_t> pick(0, fields.size() - 1);
    for (int trial = 0; trial < 50; ++trial) {
        const Point p = random_point(rng);
        const FieldEval f = fields[pick(rng)](p), g = fields[pick(rng)](p);
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) {
                const auto q = expand_qab(VarRef::plain(1), VarRef::plain(2), a, b);
                REQUIRE(q.has_value());
                CHECK(eval_form_on_fields(*q, {f, g}) ==
                      Catch::Approx(frame::qab(f, g, a, b)).margin(1e-12));
                // Q_ab(X, X) vanishes identically.
                const auto same = expand_qab(VarRef::plain(1), VarRef::plain(1), a, b);
                REQUIRE(same.has_value());
                CHECK(same->empty());
            }
    }
}

TEST_CASE("null forms on derivative arguments reach the second-derivative algebra") {
    const auto q = expand_q0(VarRef::first(1, 1), VarRef::plain(2));
    REQUIRE(q.has_value());
    // The time part is d_t d_1 u_1 * d_t u_2.
    CHECK(q->coeff(Monomial(VarRef::second(1, 1, 0), VarRef::first(2, 0))) == 1);
    // Q0 of two first derivatives needs the formal time-time symbol.
    const auto qq = expand_q0(VarRef::first(1, 0), VarRef::first(2, 0));
    REQUIRE(qq.has_value());
    CHECK(qq->coeff(Monomial(VarRef::second(1, 0, 0), VarRef::second(2, 0, 0))) == 1);
    // Third derivatives are unrepresentable.
    CHECK_FALSE(expand_q0(VarRef::second(1, 1, 1), VarRef::plain(2)).has_value());
}

TEST_CASE("expand_da_of_monomial matches a finite-difference derivative") {
    auto fields = analytic_field_family(31);
    std::mt19937_64 rng(32);
    std::uniform_int_distribution<std::size_t> pick(0, fields.size() - 1);
    std::uniform_int_distribution<int> slot(0, 3), kindpick(0, 1);
    const double h = 1e-5;
    for (int trial = 0; trial < 200; ++trial) {
        const auto F = fields[pick(rng)];
        const auto G = fields[pick(rng)];
        auto var = [&]() {
            return kindpick(rng) == 0 ? VarRef::plain(1) : VarRef::first(1, slot(rng));
        };
        VarRef vx = var(), vy = var();
        vy.component = 2;
        const Monomial m(vx, vy);
        const int a = slot(rng);
        const auto e = expand_da_of_monomial(m, a);
        if (!e) {
            // Expansion only fails when a time-time symbol would be required.
            const bool needs_tt = (m.x.kind == DerivKind::First && m.x.a == 0 && a == 0) ||
                                  (m.y.kind == DerivKind::First && m.y.a == 0 && a == 0);
            CHECK(needs_tt);
            continue;
        }
        const Point p = random_point(rng);
        Point pm = p, pp = p;
        if (a == 0) {
            pm.t -= h;
            pp.t += h;
        } else {
            pm.x[a - 1] -= h;
            pp.x[a - 1] += h;
        }
        auto prod = [&](const Point& q) {
            QuadraticForm mono;
            mono.add(m, 1);
            return eval_form_on_fields(mono, {F(q), G(q)});
        };
        const double fd = (prod(pp) - prod(pm)) / (2.0 * h);
        const double exact = eval_form_on_fields(*e, {F(p), G(p)});
        CHECK(exact == Catch::Approx(fd).margin(1e-5));
    }
}

TEST_CASE("expand_divergence is linear and matches per-term expansion") {
    std::array<QuadraticForm, 4> G{};
    G[1].add(VarRef::plain(1), VarRef::plain(1), Rational(2));
    G[2].add(VarRef::plain(1), VarRef::first(2, 3), Rational(-1, 2));
    const auto e = expand_divergence(G);
    REQUIRE(e.has_value());
    QuadraticForm expect;
    expect.add_scaled(*expand_da_of_monomial(Monomial(VarRef::plain(1), VarRef::plain(1)), 1), 2);
    expect.add_scaled(*expand_da_of_monomial(Monomial(VarRef::plain(1), VarRef::first(2, 3)), 2),
                      Rational(-1, 2));
    CHECK(*e == expect);

    // A time-slot witness with a time-differentiated factor is unrepresentable.
    std::array<QuadraticForm, 4> bad{};
    bad[0].add(VarRef::first(1, 0), VarRef::plain(1), 1);
    CHECK_FALSE(expand_divergence(bad).has_value());
}
