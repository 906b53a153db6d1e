#ifndef WKG_DIAGNOSTICS_HPP
#define WKG_DIAGNOSTICS_HPP

#include "wkg/weights.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace wkg {

// ---------------------------------------------------------------------------
// Decay-rate fitting
// ---------------------------------------------------------------------------

/// Least-squares slope of log(v) against log(t); v must be positive.
inline double fit_decay_exponent(const std::vector<double>& t, const std::vector<double>& v) {
    if (t.size() != v.size() || t.size() < 2)
        throw std::invalid_argument("fit_decay_exponent: need matching series, length >= 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] <= 0 || v[i] <= 0)
            throw std::invalid_argument("fit_decay_exponent: series must be positive");
        const double x = std::log(t[i]), y = std::log(v[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Analytic field family with exact derivatives, for pointwise identity checks.
// ---------------------------------------------------------------------------

struct Point {
    double t = 0;
    std::array<double, 3> x{};
    double r() const { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }
};

/// Value, gradient (index 0 = time), and Hessian of a smooth field at a point.
struct FieldEval {
    double f = 0;
    std::array<double, 4> d{};
    std::array<std::array<double, 4>, 4> d2{};
};

using AnalyticField = std::function<FieldEval(const Point&)>;

/// Plane wave sin(omega t + k.x + c); omega, k need not be characteristic
/// (the identities under test are algebraic in the derivatives).
inline AnalyticField plane_wave_field(double omega, std::array<double, 3> k, double c) {
    return [=](const Point& p) {
        const double phase = omega * p.t + k[0] * p.x[0] + k[1] * p.x[1] + k[2] * p.x[2] + c;
        const std::array<double, 4> grad = {omega, k[0], k[1], k[2]};
        FieldEval e;
        e.f = std::sin(phase);
        const double cs = std::cos(phase), sn = e.f;
        for (int a = 0; a < 4; ++a) e.d[a] = grad[a] * cs;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) e.d2[a][b] = -grad[a] * grad[b] * sn;
        return e;
    };
}

/// Space-time Gaussian bump exp(-(|x - x0|^2 + (t - t0)^2) / s^2).
inline AnalyticField gaussian_field(double t0, std::array<double, 3> x0, double s) {
    return [=](const Point& p) {
        std::array<double, 4> u = {p.t - t0, p.x[0] - x0[0], p.x[1] - x0[1], p.x[2] - x0[2]};
        double q = 0;
        for (double z : u) q += z * z;
        const double inv = 1.0 / (s * s);
        FieldEval e;
        e.f = std::exp(-q * inv);
        for (int a = 0; a < 4; ++a) e.d[a] = -2.0 * u[a] * inv * e.f;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                e.d2[a][b] = (4.0 * u[a] * u[b] * inv * inv - (a == b ? 2.0 * inv : 0.0)) * e.f;
        return e;
    };
}

/// Low-degree polynomial c0 + c.z + t x1 x2 term mix (exact derivatives).
inline AnalyticField polynomial_field(std::array<double, 5> c) {
    return [=](const Point& p) {
        FieldEval e;
        const double t = p.t, x1 = p.x[0], x2 = p.x[1], x3 = p.x[2];
        e.f = c[0] + c[1] * t + c[2] * x1 + c[3] * x2 * x3 + c[4] * t * x1;
        e.d = {c[1] + c[4] * x1, c[2] + c[4] * t, c[3] * x3, c[3] * x2};
        e.d2[0][1] = e.d2[1][0] = c[4];
        e.d2[2][3] = e.d2[3][2] = c[3];
        return e;
    };
}

inline std::vector<AnalyticField> analytic_field_family(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<AnalyticField> out;
    for (int i = 0; i < 3; ++i) out.push_back(plane_wave_field(u(rng), {u(rng), u(rng), u(rng)}, u(rng)));
    for (int i = 0; i < 3; ++i)
        out.push_back(gaussian_field(u(rng), {u(rng), u(rng), u(rng)}, 1.5 + std::abs(u(rng))));
    for (int i = 0; i < 2; ++i) out.push_back(polynomial_field({u(rng), u(rng), u(rng), u(rng), u(rng)}));
    return out;
}

// ---------------------------------------------------------------------------
// Derived first-order operators from a FieldEval at a point.
// ---------------------------------------------------------------------------

namespace frame {

inline std::array<double, 3> omega(const Point& p) {
    const double r = p.r();
    return {p.x[0] / r, p.x[1] / r, p.x[2] / r};
}

inline double d_r(const Point& p, const FieldEval& e) {
    const auto w = omega(p);
    return w[0] * e.d[1] + w[1] * e.d[2] + w[2] * e.d[3];
}

/// Rotations Omega = x cross grad.
inline std::array<double, 3> Omega(const Point& p, const FieldEval& e) {
    const auto& x = p.x;
    return {x[1] * e.d[3] - x[2] * e.d[2], x[2] * e.d[1] - x[0] * e.d[3],
            x[0] * e.d[2] - x[1] * e.d[1]};
}

/// Lorentz boosts L_j = x_j d_t + t d_j.
inline std::array<double, 3> L(const Point& p, const FieldEval& e) {
    return {p.x[0] * e.d[0] + p.t * e.d[1], p.x[1] * e.d[0] + p.t * e.d[2],
            p.x[2] * e.d[0] + p.t * e.d[3]};
}

inline double L_r(const Point& p, const FieldEval& e) { return p.r() * e.d[0] + p.t * d_r(p, e); }

inline double S(const Point& p, const FieldEval& e) {
    return p.t * e.d[0] + p.x[0] * e.d[1] + p.x[1] * e.d[2] + p.x[2] * e.d[3];
}

inline double d_plus(const Point& p, const FieldEval& e) { return e.d[0] + d_r(p, e); }
inline double d_minus(const Point& p, const FieldEval& e) { return e.d[0] - d_r(p, e); }

inline std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double q0(const FieldEval& f, const FieldEval& g) {
    return f.d[0] * g.d[0] - f.d[1] * g.d[1] - f.d[2] * g.d[2] - f.d[3] * g.d[3];
}

inline double qab(const FieldEval& f, const FieldEval& g, int a, int b) {
    return f.d[a] * g.d[b] - f.d[b] * g.d[a];
}

inline double q0_rad(const Point& p, const FieldEval& f, const FieldEval& g) {
    return f.d[0] * g.d[0] - d_r(p, f) * d_r(p, g);
}

inline double q0r_rad(const Point& p, const FieldEval& f, const FieldEval& g) {
    return f.d[0] * d_r(p, g) - d_r(p, f) * g.d[0];
}

/// |phi|_1 = sum over the eleven fields {id, Omega, L, partial} of |Z phi|.
inline double znorm1(const Point& p, const FieldEval& e) {
    double s = std::abs(e.f);
    for (double z : Omega(p, e)) s += std::abs(z);
    for (double z : L(p, e)) s += std::abs(z);
    for (int a = 0; a < 4; ++a) s += std::abs(e.d[a]);
    return s;
}

inline double dnorm(const FieldEval& e) {
    double s = 0;
    for (int a = 0; a < 4; ++a) s += std::abs(e.d[a]);
    return s;
}

} // namespace frame

// ---------------------------------------------------------------------------
// Pointwise identity suite. Each identity holds exactly for arbitrary smooth
// fields; the suite reports the largest absolute residual over random sample
// points for the analytic family (which has exact derivatives).
// ---------------------------------------------------------------------------

struct IdentityReport {
    std::string name;
    double max_abs_residual = 0;
};

inline std::vector<IdentityReport> frame_identity_suite(int samples = 200,
                                                        std::uint64_t seed = 4242) {
    auto fields = analytic_field_family(seed);
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> ut(0.2, 25.0), ux(-8.0, 8.0);
    std::uniform_int_distribution<std::size_t> pick(0, fields.size() - 1);

    std::vector<IdentityReport> rep = {
        {"gradient_frame_split"},      // grad = omega d_r - r^{-1} omega x Omega
        {"boosted_frame_split"},       // (t+r)(grad - omega d_r) = -omega x (Omega + omega x L)
        {"q0r_boost_factorization"},   // (t+r) Q0r_rad = (d_-phi)(L_r psi) - (L_r phi)(d_- psi)
        {"q0_characteristic_split"},   // Q0_rad = ((d_+phi)(d_-psi) + (d_-phi)(d_+psi)) / 2
        {"q0r_characteristic_split"},  // Q0r_rad = (d_+phi)(d_r psi) - (d_r phi)(d_+ psi)
        {"dplus_scaling_split"},       // r d_+ = S - (t-r) d_t
        {"dplus_boost_split"},         // (t+r) d_+ = 2 L_r + (t-r) d_t - (t-r) d_r
        {"qab_divergence_identity"},   // 2 Q_ab = d_a{phi d_b psi - (d_b phi) psi} + d_b{...}
    };

    for (int it = 0; it < samples; ++it) {
        Point p;
        p.t = ut(rng);
        for (auto& xi : p.x) xi = ux(rng);
        if (p.r() < 0.3) p.x[0] += 1.0;
        const auto& F = fields[pick(rng)];
        const auto& G = fields[pick(rng)];
        const FieldEval f = F(p), g = G(p);
        const auto w = frame::omega(p);
        const double r = p.r(), t = p.t;
        auto upd = [&](std::size_t i, double res) {
            rep[i].max_abs_residual = std::max(rep[i].max_abs_residual, std::abs(res));
        };

        const auto Of = frame::Omega(p, f);
        const auto Lf = frame::L(p, f);
        const double drf = frame::d_r(p, f), drg = frame::d_r(p, g);
        {
            const auto c = frame::cross(w, Of);
            for (int k = 0; k < 3; ++k) upd(0, f.d[k + 1] - (w[k] * drf - c[k] / r));
        }
        {
            std::array<double, 3> inner = frame::cross(w, Lf);
            for (int k = 0; k < 3; ++k) inner[k] += Of[k];
            const auto c = frame::cross(w, inner);
            for (int k = 0; k < 3; ++k) upd(1, (t + r) * (f.d[k + 1] - w[k] * drf) + c[k]);
        }
        upd(2, (t + r) * frame::q0r_rad(p, f, g) -
                   (frame::d_minus(p, f) * frame::L_r(p, g) -
                    frame::L_r(p, f) * frame::d_minus(p, g)));
        upd(3, frame::q0_rad(p, f, g) - 0.5 * (frame::d_plus(p, f) * frame::d_minus(p, g) +
                                               frame::d_minus(p, f) * frame::d_plus(p, g)));
        upd(4, frame::q0r_rad(p, f, g) -
                   (frame::d_plus(p, f) * drg - drf * frame::d_plus(p, g)));
        upd(5, r * frame::d_plus(p, f) - (frame::S(p, f) - (t - r) * f.d[0]));
        upd(6, (t + r) * frame::d_plus(p, f) -
                   (2.0 * frame::L_r(p, f) + (t - r) * f.d[0] - (t - r) * drf));
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) {
                // d_a{phi d_b psi - (d_b phi) psi} + d_b{(d_a phi) psi - phi d_a psi}
                const double da = f.d[a] * g.d[b] + f.f * g.d2[a][b] - f.d2[a][b] * g.f -
                                  f.d[b] * g.d[a];
                const double db = f.d2[a][b] * g.f + f.d[a] * g.d[b] - f.d[b] * g.d[a] -
                                  f.f * g.d2[a][b];
                upd(7, 2.0 * frame::qab(f, g, a, b) - (da + db));
            }
    }
    return rep;
}

/// Largest ratio, over random samples, of <t+r> |Q(phi, psi)| against the
/// first-order majorant
///   |phi|_1 |d psi| + |d phi| |psi|_1 + <t-r> |d phi| |d psi|
/// (for Q = Q0) or without the <t-r> term (for Q = Q_ab). The pointwise
/// estimates guarantee this ratio is bounded by an absolute constant.
inline double null_form_bound_ratio(int samples = 500, std::uint64_t seed = 999) {
    auto fields = analytic_field_family(seed);
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> ut(0.2, 50.0), ux(-10.0, 10.0);
    std::uniform_int_distribution<std::size_t> pick(0, fields.size() - 1);
    double worst = 0;
    for (int it = 0; it < samples; ++it) {
        Point p;
        p.t = ut(rng);
        for (auto& xi : p.x) xi = ux(rng);
        if (p.r() < 0.3) p.x[0] += 1.0;
        const FieldEval f = fields[pick(rng)](p), g = fields[pick(rng)](p);
        const double zf = frame::znorm1(p, f), zg = frame::znorm1(p, g);
        const double df = frame::dnorm(f), dg = frame::dnorm(g);
        const double tr = jb(p.t + p.r()), tmr = jb(p.t - p.r());
        {
            const double rhs = zf * dg + df * zg + tmr * df * dg;
            if (rhs > 1e-12)
                worst = std::max(worst, tr * std::abs(frame::q0(f, g)) / rhs);
        }
        const double rhs_ab = zf * dg + df * zg;
        if (rhs_ab > 1e-12)
            for (int a = 0; a < 4; ++a)
                for (int b = a + 1; b < 4; ++b)
                    worst = std::max(worst, tr * std::abs(frame::qab(f, g, a, b)) / rhs_ab);
    }
    return worst;
}

/// Largest ratio of <t+r> W_-(t,r) against 3 <r> <t-r> over a (t, r) sweep;
/// the comparison <t+r> W_- <= 3 <r> <t-r> holds with sharp constant 3.
inline double weight_comparison_ratio(int samples = 2000, std::uint64_t seed = 777) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 200.0);
    double worst = 0;
    for (int i = 0; i < samples; ++i) {
        const double t = u(rng), r = u(rng);
        worst = std::max(worst, jb(t + r) * weight_Wminus(t, r) / (jb(r) * jb(t - r)));
    }
    return worst / weight_comparison_constant;
}

// ---------------------------------------------------------------------------
// Sobolev-type inequality check on the Gaussian family: all norms in
//   sup <x> |phi| <= C sum_{|alpha|+|beta|<=2} || d^alpha Omega^beta phi ||_L2
// have closed forms for phi = exp(-|x|^2 / (2 s^2)) (Omega phi = 0: radial).
// Returns the largest left/right ratio over a range of widths s.
// ---------------------------------------------------------------------------

inline double sobolev_bound_ratio() {
    double worst = 0;
    for (double s : {0.3, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        // sup over r of <r> exp(-r^2/(2 s^2)), by dense 1d scan.
        double lhs = 0;
        for (int i = 0; i <= 4000; ++i) {
            const double r = i * (10.0 * s + 10.0) / 4000.0;
            lhs = std::max(lhs, jb(r) * std::exp(-r * r / (2 * s * s)));
        }
        // Closed-form L2 norms: with G = integral exp(-r^2/s^2) dx = pi^{3/2} s^3,
        // E[x_i^2] = s^2/2, E[x_i^4] = 3 s^4/4, E[x_i^2 x_j^2] = s^4/4 under G.
        const double G = std::pow(M_PI, 1.5) * s * s * s;
        const double m2 = s * s / 2.0, m4 = 3.0 * s * s * s * s / 4.0,
                     m22 = s * s * s * s / 4.0;
        const double inv2 = 1.0 / (s * s), inv4 = inv2 * inv2;
        double rhs = std::sqrt(G); // |alpha| = 0
        for (int i = 0; i < 3; ++i) rhs += std::sqrt(G * m2 * inv4); // d_i phi = -(x_i/s^2) phi
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                // d_i d_j phi = (x_i x_j / s^4 - delta_ij / s^2) phi
                double n2;
                if (i == j)
                    n2 = G * (m4 * inv4 * inv4 - 2.0 * m2 * inv4 * inv2 + inv4);
                else
                    n2 = G * m22 * inv4 * inv4;
                rhs += std::sqrt(n2);
            }
        worst = std::max(worst, lhs / rhs);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Radial d'Alembert oracle: exact solution of box w = 0 in 3d for radial data
// w(0) = w0(|x|), d_t w(0) = 0, via the spherical-means formula
//   r w(t, r) = ((r + t) w0(r + t) + (r - t) w0(|r - t|)) / 2
// (w0 extended evenly). The r -> 0 limit is w0(t) + t w0'(t), evaluated by a
// symmetric difference of the numerator.
// ---------------------------------------------------------------------------

inline double dalembert_radial(const std::function<double(double)>& w0, double t, double r) {
    auto num = [&](double rr) {
        return 0.5 * ((rr + t) * w0(rr + t) + (rr - t) * w0(std::abs(rr - t)));
    };
    if (r > 1e-6) return num(r) / r;
    const double h = 1e-5;
    return (num(h) - num(-h)) / (2.0 * h);
}

} // namespace wkg

#endif
