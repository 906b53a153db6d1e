#include "wkg/linear_span.hpp"
#include "wkg/quadratic_form.hpp"
#include "wkg/rational.hpp"
#include "wkg/system_model.hpp"
#include "wkg/varref.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace wkg;

namespace {

QuadraticForm random_form(std::mt19937_64& rng, int ncomp, int nterms) {
    std::uniform_int_distribution<int> comp(1, ncomp), kind(0, 1), slot(0, 3), co(-5, 5);
    QuadraticForm f;
    for (int i = 0; i < nterms; ++i) {
        auto var = [&]() {
            return kind(rng) == 0 ? VarRef::plain(comp(rng)) : VarRef::first(comp(rng), slot(rng));
        };
        f.add(var(), var(), co(rng));
    }
    return f;
}

} // namespace

TEST_CASE("rational parsing and printing round-trip") {
    CHECK(parse_rational("3/4") == Rational(3, 4));
    CHECK(parse_rational("-7") == Rational(-7));
    CHECK(rational_to_string(Rational(6, 4)) == "3/2");
    CHECK(rational_to_string(Rational(-2, 1)) == "-2");
    CHECK(parse_rational(rational_to_string(Rational(22, 7))) == Rational(22, 7));
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("abc"));
    CHECK(to_double(Rational(1, 2)) == 0.5);
}

TEST_CASE("VarRef second derivatives are canonicalized") {
    CHECK(VarRef::second(1, 2, 1) == VarRef::second(1, 1, 2));
    CHECK(VarRef::second(1, 0, 3) == VarRef::second(1, 3, 0));
    CHECK(VarRef::second(1, 0, 0).is_time_time());
    CHECK_FALSE(VarRef::second(1, 1, 0).is_time_time());
    CHECK(VarRef::plain(1).order() == 0);
    CHECK(VarRef::first(1, 2).order() == 1);
    CHECK(VarRef::second(1, 1, 2).order() == 2);
}

TEST_CASE("Monomial factor order is immaterial") {
    const VarRef a = VarRef::plain(2), b = VarRef::first(1, 0);
    CHECK(Monomial(a, b) == Monomial(b, a));
    CHECK(Monomial(a, b).x < Monomial(a, b).y);
}

TEST_CASE("QuadraticForm stores no zero coefficients") {
    QuadraticForm f;
    f.add(VarRef::plain(1), VarRef::plain(2), Rational(1, 3));
    f.add(VarRef::plain(2), VarRef::plain(1), Rational(-1, 3));
    CHECK(f.empty());
    f.add(VarRef::plain(1), VarRef::plain(1), 0);
    CHECK(f.empty());
}

TEST_CASE("QuadraticForm arithmetic is exact and consistent") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const QuadraticForm a = random_form(rng, 3, 6), b = random_form(rng, 3, 6);
        CHECK((a + b) - b == a);
        CHECK(a - a == QuadraticForm{});
        QuadraticForm twice;
        twice.add_scaled(a, 2);
        CHECK(twice == a + a);

        // Evaluation is linear in the form.
        std::uniform_int_distribution<int> val(-4, 4);
        std::map<std::tuple<int, int, int, int>, Rational> assign;
        auto value = [&](const VarRef& v) -> Rational {
            auto [it, ins] = assign.emplace(v.tie(), Rational(val(rng), 3));
            return it->second;
        };
        CHECK((a + b).eval(value) == a.eval(value) + b.eval(value));
    }
}

TEST_CASE("relabel renames components consistently") {
    QuadraticForm f;
    f.add(VarRef::plain(1), VarRef::first(2, 0), Rational(5));
    auto g = f.relabel([](int c) { return c + 10; });
    CHECK(g.coeff(Monomial(VarRef::plain(11), VarRef::first(12, 0))) == 5);
    CHECK(g.relabel([](int c) { return c - 10; }) == f);
}

TEST_CASE("find_plain_factor sees only undifferentiated occurrences") {
    QuadraticForm f;
    f.add(VarRef::first(1, 0), VarRef::first(1, 1), 1);
    CHECK_FALSE(f.find_plain_factor(1).has_value());
    f.add(VarRef::plain(1), VarRef::first(2, 2), 1);
    REQUIRE(f.find_plain_factor(1).has_value());
    CHECK_FALSE(f.find_plain_factor(2).has_value());
}

TEST_CASE("split_form reconstructs the input exactly") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 50; ++trial) {
        const QuadraticForm f = random_form(rng, 5, 10);
        const int N1 = static_cast<int>(rng() % 6);
        const SplitForm s = split_form(f, N1);
        CHECK(s.W + s.K + s.KW == f);
        for (const auto& [m, c] : s.W.terms()) {
            CHECK(m.x.component > N1);
            CHECK(m.y.component > N1);
        }
        for (const auto& [m, c] : s.K.terms()) {
            CHECK(m.x.component <= N1);
            CHECK(m.y.component <= N1);
        }
        for (const auto& [m, c] : s.KW.terms())
            CHECK(((m.x.component <= N1) != (m.y.component <= N1)));
    }
}

TEST_CASE("LinearSpan recovers exact decomposition coefficients") {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 30; ++trial) {
        LinearSpan span;
        std::vector<QuadraticForm> basis;
        for (int i = 0; i < 8; ++i) {
            basis.push_back(random_form(rng, 3, 4));
            span.add(basis.back());
        }
        // A random combination must reduce to zero residual with coefficients
        // that rebuild the target.
        std::uniform_int_distribution<int> co(-3, 3);
        QuadraticForm target;
        for (const auto& b : basis) target.add_scaled(b, Rational(co(rng), 2));
        const auto red = span.reduce(target);
        CHECK(red.residual.empty());
        QuadraticForm rebuilt;
        for (const auto& [i, c] : red.coeffs) rebuilt.add_scaled(basis[i], c);
        CHECK(rebuilt == target);
    }
}

TEST_CASE("LinearSpan rejects vectors outside the span") {
    LinearSpan span;
    QuadraticForm a;
    a.add(VarRef::plain(1), VarRef::plain(1), 1);
    span.add(a);
    QuadraticForm b;
    b.add(VarRef::plain(2), VarRef::plain(2), 1);
    const auto red = span.reduce(b);
    CHECK_FALSE(red.residual.empty());
    CHECK(span.rank() == 1);
    // Adding a dependent vector does not change the rank.
    QuadraticForm twice;
    twice.add_scaled(a, 7);
    span.add(twice);
    CHECK(span.rank() == 1);
}

TEST_CASE("LinearSpan reduction is idempotent on residuals") {
    std::mt19937_64 rng(404);
    LinearSpan span;
    for (int i = 0; i < 5; ++i) span.add(random_form(rng, 3, 4));
    for (int trial = 0; trial < 20; ++trial) {
        const auto red = span.reduce(random_form(rng, 3, 6));
        const auto again = span.reduce(red.residual);
        CHECK(again.residual == red.residual);
        CHECK(again.coeffs.empty());
    }
}
