#ifndef WKG_NULL_FORMS_HPP
#define WKG_NULL_FORMS_HPP

#include "wkg/quadratic_form.hpp"

#include <array>
#include <optional>

namespace wkg {

/// First-order derivative descriptor used for the d^alpha slots of the
/// null-form basis: -1 means no derivative, 0..3 means d_a.
struct SmallIndex {
    int a = -1;
    bool none() const { return a < 0; }
    std::string str() const { return none() ? "" : "d" + std::to_string(a); }
};

/// Formal d_a applied to one variable reference.
/// Stays within the extended variable algebra (which includes the internal
/// time-time symbol); derivatives of second derivatives are not representable.
inline std::optional<VarRef> formal_derivative(const VarRef& v, int a) {
    switch (v.kind) {
        case DerivKind::None: return VarRef::first(v.component, a);
        case DerivKind::First: return VarRef::second(v.component, a, v.a);
        default: return std::nullopt; // third derivative
    }
}

/// d^alpha w_j as a VarRef (alpha of length <= 1).
inline VarRef apply_small(int comp, SmallIndex alpha) {
    return alpha.none() ? VarRef::plain(comp) : VarRef::first(comp, alpha.a);
}

/// Q0(d^alpha w_j, d^beta w_k) expanded into raw monomials:
/// (d_t X)(d_t Y) - sum_m (d_m X)(d_m Y).
inline std::optional<QuadraticForm> expand_q0(const VarRef& X, const VarRef& Y) {
    QuadraticForm out;
    for (int a = 0; a <= 3; ++a) {
        auto dx = formal_derivative(X, a);
        auto dy = formal_derivative(Y, a);
        if (!dx || !dy) return std::nullopt;
        out.add(*dx, *dy, a == 0 ? 1 : -1);
    }
    return out;
}

/// Q_ab(X, Y) = (d_a X)(d_b Y) - (d_b X)(d_a Y).
inline std::optional<QuadraticForm> expand_qab(const VarRef& X, const VarRef& Y, int a, int b) {
    auto dax = formal_derivative(X, a);
    auto dby = formal_derivative(Y, b);
    auto dbx = formal_derivative(X, b);
    auto day = formal_derivative(Y, a);
    if (!dax || !dby || !dbx || !day) return std::nullopt;
    QuadraticForm out;
    out.add(*dax, *dby, 1);
    out.add(*dbx, *day, -1);
    return out;
}

/// Formal expansion of d_a { x * y } by the product rule, for monomials over
/// (xi, xi') as they appear in divergence witnesses G_a(phi, d phi).
/// Fails when the expansion would need a time-time second derivative,
/// which lies outside the (xi, xi'') target algebra.
inline std::optional<QuadraticForm> expand_da_of_monomial(const Monomial& m, int a) {
    auto dx = formal_derivative(m.x, a);
    auto dy = formal_derivative(m.y, a);
    if (!dx || !dy) return std::nullopt;
    if (dx->is_time_time() || dy->is_time_time()) return std::nullopt;
    QuadraticForm out;
    out.add(*dx, m.y, 1);
    out.add(m.x, *dy, 1);
    return out;
}

/// Formal expansion of sum_a d_a { G_a } for four quadratic forms over (xi, xi').
inline std::optional<QuadraticForm> expand_divergence(const std::array<QuadraticForm, 4>& G) {
    QuadraticForm out;
    for (int a = 0; a <= 3; ++a)
        for (const auto& [m, c] : G[a].terms()) {
            auto e = expand_da_of_monomial(m, a);
            if (!e) return std::nullopt;
            out.add_scaled(*e, c);
        }
    return out;
}

} // namespace wkg

#endif
