#ifndef WKG_FIXTURES_HPP
#define WKG_FIXTURES_HPP

#include "wkg/null_forms.hpp"
#include "wkg/system_model.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wkg {

// ---------------------------------------------------------------------------
// Exact complex-rational 4x4 matrix algebra, enough to build the gamma-matrix
// couplings of the spinor fixtures.
// ---------------------------------------------------------------------------

struct CRat {
    Rational re = 0, im = 0;

    CRat() = default;
    CRat(Rational r) : re(std::move(r)) {}
    CRat(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    friend CRat operator+(const CRat& a, const CRat& b) { return {a.re + b.re, a.im + b.im}; }
    friend CRat operator-(const CRat& a, const CRat& b) { return {a.re - b.re, a.im - b.im}; }
    friend CRat operator*(const CRat& a, const CRat& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend bool operator==(const CRat& a, const CRat& b) { return a.re == b.re && a.im == b.im; }
    CRat conj() const { return {re, -im}; }
};

using Mat4 = std::array<std::array<CRat, 4>, 4>;

inline Mat4 mat_zero() { return Mat4{}; }

inline Mat4 mat_identity() {
    Mat4 m{};
    for (int i = 0; i < 4; ++i) m[i][i] = CRat(1);
    return m;
}

inline Mat4 operator*(const Mat4& A, const Mat4& B) {
    Mat4 out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) out[i][j] = out[i][j] + A[i][k] * B[k][j];
    return out;
}

inline Mat4 operator+(const Mat4& A, const Mat4& B) {
    Mat4 out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out[i][j] = A[i][j] + B[i][j];
    return out;
}

inline Mat4 operator*(const CRat& c, const Mat4& A) {
    Mat4 out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out[i][j] = c * A[i][j];
    return out;
}

/// Dirac representation: gamma_0 = diag(1,1,-1,-1), gamma_k off-diagonal
/// Pauli blocks; they satisfy {gamma_a, gamma_b} = 2 g_ab with g = diag(1,-1,-1,-1).
inline Mat4 gamma_mat(int a) {
    const CRat i(0, 1);
    Mat4 m{};
    switch (a) {
        case 0:
            m[0][0] = CRat(1);
            m[1][1] = CRat(1);
            m[2][2] = CRat(-1);
            m[3][3] = CRat(-1);
            break;
        case 1:
            m[0][3] = CRat(1);
            m[1][2] = CRat(1);
            m[2][1] = CRat(-1);
            m[3][0] = CRat(-1);
            break;
        case 2:
            m[0][3] = CRat(0) - i;
            m[1][2] = i;
            m[2][1] = i;
            m[3][0] = CRat(0) - i;
            break;
        case 3:
            m[0][2] = CRat(1);
            m[1][3] = CRat(-1);
            m[2][0] = CRat(-1);
            m[3][1] = CRat(1);
            break;
        default: throw SpecError("gamma index out of range");
    }
    return m;
}

/// Chirality matrix in the convention gamma_5 = -i gamma_0 gamma_1 gamma_2 gamma_3.
inline Mat4 gamma5_mat() {
    const CRat minus_i(0, -1);
    return minus_i * (gamma_mat(0) * gamma_mat(1) * gamma_mat(2) * gamma_mat(3));
}

// ---------------------------------------------------------------------------
// Real splitting of spinor couplings. A C^4 spinor psi occupies eight real
// components: psi_base+1..psi_base+4 hold Re psi, psi_base+5..psi_base+8 Im psi.
// ---------------------------------------------------------------------------

namespace detail {

inline VarRef spinor_var(int psi_base, int s, bool imag, std::optional<int> deriv) {
    const int comp = psi_base + s + 1 + (imag ? 4 : 0);
    return deriv ? VarRef::first(comp, *deriv) : VarRef::plain(comp);
}

} // namespace detail

/// Adds the real split of scalar * (B psi) to the eight equations
/// F[eq_base..eq_base+7] (0-based indices into F): rows eq_base+r receive the
/// real parts, rows eq_base+4+r the imaginary parts. The spinor factor carries
/// the derivative `dpsi` (nullopt: undifferentiated).
inline void add_matrix_coupling(std::vector<QuadraticForm>& F, int eq_base, const Mat4& B,
                                const VarRef& scalar, int psi_base,
                                std::optional<int> dpsi = std::nullopt) {
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) {
            const CRat& c = B[r][s];
            const VarRef pr = detail::spinor_var(psi_base, s, false, dpsi);
            const VarRef pi = detail::spinor_var(psi_base, s, true, dpsi);
            // Re[(B psi)_r] = Re B * Re psi - Im B * Im psi
            F[eq_base + r].add(scalar, pr, c.re);
            F[eq_base + r].add(scalar, pi, -c.im);
            // Im[(B psi)_r] = Im B * Re psi + Re B * Im psi
            F[eq_base + 4 + r].add(scalar, pr, c.im);
            F[eq_base + 4 + r].add(scalar, pi, c.re);
        }
}

/// Adds the real sesquilinear form psi* H psi to F. H must be Hermitian so the
/// form is real; the imaginary part is checked to cancel exactly.
inline void add_sesquilinear(QuadraticForm& F, const Mat4& H, int psi_base) {
    QuadraticForm imag;
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) {
            const CRat& c = H[r][s];
            const VarRef rr = detail::spinor_var(psi_base, r, false, std::nullopt);
            const VarRef ri = detail::spinor_var(psi_base, r, true, std::nullopt);
            const VarRef sr = detail::spinor_var(psi_base, s, false, std::nullopt);
            const VarRef si = detail::spinor_var(psi_base, s, true, std::nullopt);
            // conj(psi_r) psi_s = (Re_r Re_s + Im_r Im_s) + i (Re_r Im_s - Im_r Re_s)
            F.add(rr, sr, c.re);
            F.add(ri, si, c.re);
            F.add(rr, si, -c.im);
            F.add(ri, sr, c.im);
            imag.add(rr, sr, c.im);
            imag.add(ri, si, c.im);
            imag.add(rr, si, c.re);
            imag.add(ri, sr, -c.re);
        }
    if (!imag.empty()) throw SpecError("sesquilinear form is not real: H is not Hermitian");
}

// ---------------------------------------------------------------------------
// Null-form helpers in fixture construction.
// ---------------------------------------------------------------------------

inline void add_q0(QuadraticForm& F, int compj, int compk, const Rational& c) {
    F.add(VarRef::first(compj, 0), VarRef::first(compk, 0), c);
    for (int k = 1; k <= 3; ++k) F.add(VarRef::first(compj, k), VarRef::first(compk, k), -c);
}

inline void add_qab(QuadraticForm& F, int compj, int compk, int a, int b, const Rational& c) {
    F.add(VarRef::first(compj, a), VarRef::first(compk, b), c);
    F.add(VarRef::first(compj, b), VarRef::first(compk, a), -c);
}

// ---------------------------------------------------------------------------
// Fixture catalog
// ---------------------------------------------------------------------------

/// A catalogued system together with its expected analysis verdicts,
/// established by hand from the defining structure of each system.
struct Fixture {
    SystemSpec spec;
    bool expect_applies = false;
    bool expect_condition_a = false;
    bool expect_strong = false;
    bool expect_partition_ok = false;
    std::set<int> expect_I1, expect_I2;
};

namespace fixtures {

/// Dirac equation with mass M > 0 coupled to a massless scalar through a
/// pseudoscalar vertex; second-order reduction of the spinor equation.
/// Components: 1..8 = (Re psi, Im psi) Klein-Gordon with mass M = 1,
/// 9 = scalar wave. Cubic remainder -phi^2 psi is carried as evaluable tails.
inline Fixture dirac_scalar_massive_spinor() {
    Fixture f;
    SystemSpec& s = f.spec;
    s.name = "dirac_scalar_massive_spinor";
    s.N = 9;
    s.N1 = 8;
    s.masses.assign(9, 1.0);
    s.masses[8] = 0.0;
    s.F.assign(9, {});
    s.tails.assign(9, std::nullopt);
    const Mat4 g5 = gamma5_mat();
    for (int a = 0; a <= 3; ++a)
        add_matrix_coupling(s.F, 0, CRat(-1) * (gamma_mat(a) * g5), VarRef::first(9, a), 0);
    add_sesquilinear(s.F[8], gamma_mat(0), 0);
    for (int i = 1; i <= 8; ++i) {
        CubicTail tail;
        tail.name = "dirac_scalar_cubic_" + std::to_string(i);
        tail.eval = [i](const PointSample& p) {
            const double phi = p.val(9);
            return -phi * phi * p.val(i);
        };
        register_tail(tail.name, tail.eval);
        s.tails[i - 1] = std::move(tail);
    }
    f.expect_applies = true;
    f.expect_condition_a = true;
    f.expect_strong = false;
    f.expect_partition_ok = true;
    f.expect_I1 = {1};
    f.expect_I2 = {};
    return f;
}

/// Massless Dirac equation coupled to a massive scalar; the spinor equation is
/// kept in divergence-expanded form. Components: 1 = scalar Klein-Gordon
/// (mass 1), 2..9 = (Re psi, Im psi) waves.
inline Fixture dirac_scalar_massive_scalar() {
    Fixture f;
    SystemSpec& s = f.spec;
    s.name = "dirac_scalar_massive_scalar";
    s.N = 9;
    s.N1 = 1;
    s.masses.assign(9, 0.0);
    s.masses[0] = 1.0;
    s.F.assign(9, {});
    s.tails.assign(9, std::nullopt);
    const Mat4 g5 = gamma5_mat();
    for (int a = 0; a <= 3; ++a) {
        const Mat4 B = CRat(-1) * (gamma_mat(a) * g5);
        add_matrix_coupling(s.F, 1, B, VarRef::first(1, a), 1);          // (d_a phi) B psi
        add_matrix_coupling(s.F, 1, B, VarRef::plain(1), 1, a);          // phi B (d_a psi)
    }
    add_sesquilinear(s.F[0], gamma_mat(0), 1);
    f.expect_applies = true;
    f.expect_condition_a = true;
    f.expect_strong = false;
    f.expect_partition_ok = true;
    f.expect_I1 = {};
    f.expect_I2 = {1, 2, 3, 4, 5, 6, 7, 8};
    return f;
}

/// Massless spinor coupled to four massive vector components through a chiral
/// vertex; the spinor equation is in divergence-expanded form. Components:
/// 1..4 = A_0..A_3 Klein-Gordon (mass 1), 5..12 = (Re psi, Im psi) waves.
inline Fixture spinor_vector_system() {
    Fixture f;
    SystemSpec& s = f.spec;
    s.name = "spinor_vector_system";
    s.N = 12;
    s.N1 = 4;
    s.masses.assign(12, 0.0);
    for (int i = 0; i < 4; ++i) s.masses[i] = 1.0;
    s.F.assign(12, {});
    s.tails.assign(12, std::nullopt);
    const Mat4 g5 = gamma5_mat();
    const Mat4 chir = mat_identity() + g5;
    const CRat minus_half_i(0, Rational(-1, 2));
    for (int b = 0; b <= 3; ++b)
        for (int a = 0; a <= 3; ++a) {
            const Rational gaa = (a == 0) ? 1 : -1;
            const Mat4 C = (CRat(gaa) * minus_half_i) * (gamma_mat(b) * gamma_mat(a) * chir);
            add_matrix_coupling(s.F, 4, C, VarRef::first(a + 1, b), 4);   // (d_b A_a) C psi
            add_matrix_coupling(s.F, 4, C, VarRef::plain(a + 1), 4, b);   // A_a C (d_b psi)
        }
    for (int a = 0; a <= 3; ++a) {
        const Mat4 H = CRat(Rational(1, 2)) * (gamma_mat(0) * gamma_mat(a) * chir);
        add_sesquilinear(s.F[a], H, 4);
    }
    f.expect_applies = true;
    f.expect_condition_a = true;
    f.expect_strong = false;
    f.expect_partition_ok = true;
    f.expect_I1 = {};
    f.expect_I2 = {1, 2, 3, 4, 5, 6, 7, 8};
    return f;
}

/// First-order reduction of a Klein-Gordon field (complex, three entries)
/// coupled to a wave field: the gradient components are promoted to unknowns
/// so the wave source becomes a spatial divergence. Components: 1..6 = field
/// values, 7..24 = their spatial gradients, 25 = wave.
inline Fixture kg_wave_gradient_reduction() {
    Fixture f;
    SystemSpec& s = f.spec;
    s.name = "kg_wave_gradient_reduction";
    s.N = 25;
    s.N1 = 24;
    s.masses.assign(25, 1.0);
    s.masses[24] = 0.0;
    s.F.assign(25, {});
    s.tails.assign(25, std::nullopt);
    const int w = 25;
    for (int i = 1; i <= 6; ++i) s.F[i - 1].add(VarRef::plain(w), VarRef::plain(i), -1);
    for (int i = 1; i <= 6; ++i)
        for (int k = 1; k <= 3; ++k) {
            const int c = 3 * i + 3 + k;
            s.F[c - 1].add(VarRef::plain(w), VarRef::first(i, k), -1);
            s.F[c - 1].add(VarRef::first(w, k), VarRef::plain(i), -1);
        }
    for (int j = 1; j <= 3; ++j)
        for (int i = 1; i <= 3; ++i) {
            // 2 d_j (v_i v_{3i+3+j} + v_{i+3} v_{3i+12+j})
            for (int off : {0, 3}) {
                const int p = i + off;
                const int q = 3 * p + 3 + j;
                s.F[w - 1].add(VarRef::first(p, j), VarRef::plain(q), 2);
                s.F[w - 1].add(VarRef::plain(p), VarRef::first(q, j), 2);
            }
        }
    f.expect_applies = true;
    f.expect_condition_a = true;
    f.expect_strong = false;
    f.expect_partition_ok = true;
    f.expect_I1 = {};
    f.expect_I2 = {1};
    return f;
}

/// Three-component model with one Klein-Gordon and two wave components,
/// exercising every admissible interaction type: null forms between waves,
/// arbitrary Klein-Gordon couplings, and a divergence-form wave equation
/// whose witness contains an undifferentiated wave factor.
inline Fixture mixed_interaction_model() {
    Fixture f;
    SystemSpec& s = f.spec;
    s.name = "mixed_interaction_model";
    s.N = 3;
    s.N1 = 1;
    s.masses = {1.0, 0.0, 0.0};
    s.F.assign(3, {});
    s.tails.assign(3, std::nullopt);
    const int v = 1, w1 = 2, w2 = 3;
    // Klein-Gordon equation: generic quadratic couplings (no undifferentiated w1).
    s.F[0].add(VarRef::plain(v), VarRef::plain(v), 1);
    s.F[0].add(VarRef::plain(v), VarRef::first(v, 0), 1);
    s.F[0].add(VarRef::first(v, 1), VarRef::first(v, 2), 1);
    s.F[0].add(VarRef::plain(v), VarRef::first(w1, 0), 1);
    s.F[0].add(VarRef::first(v, 3), VarRef::first(w1, 1), 1);
    s.F[0].add(VarRef::plain(v), VarRef::plain(w2), 1);
    s.F[0].add(VarRef::first(v, 0), VarRef::first(w2, 2), 1);
    s.F[0].add(VarRef::first(w1, 0), VarRef::first(w1, 0), 1);
    s.F[0].add(VarRef::first(w1, 1), VarRef::first(w1, 2), 1);
    s.F[0].add(VarRef::first(w1, 2), VarRef::plain(w2), 1);
    s.F[0].add(VarRef::plain(w2), VarRef::plain(w2), 1);
    s.F[0].add(VarRef::plain(w2), VarRef::first(w2, 1), 1);
    // First wave equation: Klein-Gordon couplings plus null forms.
    s.F[1].add(VarRef::plain(v), VarRef::plain(v), 1);
    s.F[1].add(VarRef::plain(v), VarRef::first(w1, 1), 1);
    s.F[1].add(VarRef::first(v, 0), VarRef::plain(w2), 1);
    add_q0(s.F[1], w1, w1, 1);
    add_q0(s.F[1], w1, w2, 2);
    add_qab(s.F[1], w1, w2, 0, 1, 3);
    add_qab(s.F[1], w2, w1, 2, 3, -1);
    // Second wave equation: sum_a d_a (C1_a v^2 + C2_a v w2), C1 = (1,0,2,0),
    // C2 = (1,1,0,0), expanded.
    const std::array<Rational, 4> C1 = {1, 0, 2, 0}, C2 = {1, 1, 0, 0};
    for (int a = 0; a <= 3; ++a) {
        if (C1[a] != 0) s.F[2].add(VarRef::plain(v), VarRef::first(v, a), 2 * C1[a]);
        if (C2[a] != 0) {
            s.F[2].add(VarRef::first(v, a), VarRef::plain(w2), C2[a]);
            s.F[2].add(VarRef::plain(v), VarRef::first(w2, a), C2[a]);
        }
    }
    f.expect_applies = true;
    f.expect_condition_a = true;
    f.expect_strong = false;
    f.expect_partition_ok = true;
    f.expect_I1 = {1};
    f.expect_I2 = {2};
    return f;
}

/// The resonant model (box + 1) v = w^2, box w = v^2: the undifferentiated
/// wave source w^2 admits no divergence witness, so the criteria fail as
/// stated (a change of unknowns repairs it: see kg_shift_transformed).
inline Fixture kg_shift_raw() {
    Fixture f;
    SystemSpec& s = f.spec;
    s.name = "kg_shift_raw";
    s.N = 2;
    s.N1 = 1;
    s.masses = {1.0, 0.0};
    s.F.assign(2, {});
    s.tails.assign(2, std::nullopt);
    s.F[0].add(VarRef::plain(2), VarRef::plain(2), 1);
    s.F[1].add(VarRef::plain(1), VarRef::plain(1), 1);
    f.expect_applies = false;
    f.expect_condition_a = true; // v^2 has no wave-wave part
    f.expect_strong = false;
    f.expect_partition_ok = false;
    return f;
}

/// The same model after the shift v~ = v - w^2:
/// (box + 1) v~ = -2 Q0(w, w) - 2 w (v~ + w^2)^2, box w = (v~ + w^2)^2.
inline Fixture kg_shift_transformed() {
    Fixture f;
    SystemSpec& s = f.spec;
    s.name = "kg_shift_transformed";
    s.N = 2;
    s.N1 = 1;
    s.masses = {1.0, 0.0};
    s.F.assign(2, {});
    s.tails.assign(2, std::nullopt);
    add_q0(s.F[0], 2, 2, -2);
    s.F[1].add(VarRef::plain(1), VarRef::plain(1), 1);
    CubicTail t1;
    t1.name = "kg_shift_kg_tail";
    t1.eval = [](const PointSample& p) {
        const double v = p.val(1) + p.val(2) * p.val(2);
        return -2.0 * p.val(2) * v * v;
    };
    register_tail(t1.name, t1.eval);
    CubicTail t2;
    t2.name = "kg_shift_wave_tail";
    t2.eval = [](const PointSample& p) {
        const double vt = p.val(1), w2 = p.val(2) * p.val(2);
        return 2.0 * vt * w2 + w2 * w2;
    };
    register_tail(t2.name, t2.eval);
    s.tails[0] = std::move(t1);
    s.tails[1] = std::move(t2);
    f.expect_applies = true;
    f.expect_condition_a = true;
    f.expect_strong = false;
    f.expect_partition_ok = true;
    f.expect_I1 = {1};
    f.expect_I2 = {};
    return f;
}

/// box w = (d_t w)^2: the classical finite-time blowup model; fails the null
/// condition with an explicit witness.
inline Fixture wave_dtsq_blowup() {
    Fixture f;
    SystemSpec& s = f.spec;
    s.name = "wave_dtsq_blowup";
    s.N = 1;
    s.N1 = 0;
    s.masses = {0.0};
    s.F.assign(1, {});
    s.tails.assign(1, std::nullopt);
    s.F[0].add(VarRef::first(1, 0), VarRef::first(1, 0), 1);
    f.expect_applies = false;
    f.expect_condition_a = false;
    f.expect_strong = false;
    f.expect_partition_ok = true;
    f.expect_I1 = {1};
    f.expect_I2 = {};
    return f;
}

/// box w = Q0(w, w): the model null-form wave equation (globally solvable).
inline Fixture wave_q0_model() {
    Fixture f;
    SystemSpec& s = f.spec;
    s.name = "wave_q0_model";
    s.N = 1;
    s.N1 = 0;
    s.masses = {0.0};
    s.F.assign(1, {});
    s.tails.assign(1, std::nullopt);
    add_q0(s.F[0], 1, 1, 1);
    f.expect_applies = true;
    f.expect_condition_a = true;
    f.expect_strong = false; // Q0 is not a Q_ab combination
    f.expect_partition_ok = true;
    f.expect_I1 = {1};
    f.expect_I2 = {};
    return f;
}

/// Two waves coupled through rotational null forms only; satisfies the strong
/// null condition.
inline Fixture wave_qab_model() {
    Fixture f;
    SystemSpec& s = f.spec;
    s.name = "wave_qab_model";
    s.N = 2;
    s.N1 = 0;
    s.masses = {0.0, 0.0};
    s.F.assign(2, {});
    s.tails.assign(2, std::nullopt);
    add_qab(s.F[0], 1, 2, 0, 1, 1);
    add_qab(s.F[1], 1, 2, 2, 3, 1);
    f.expect_applies = true;
    f.expect_condition_a = true;
    f.expect_strong = true;
    f.expect_partition_ok = true;
    f.expect_I1 = {1, 2};
    f.expect_I2 = {};
    return f;
}

/// Free Klein-Gordon equation (linear); all conditions hold vacuously.
inline Fixture free_kg() {
    Fixture f;
    SystemSpec& s = f.spec;
    s.name = "free_kg";
    s.N = 1;
    s.N1 = 1;
    s.masses = {1.0};
    s.F.assign(1, {});
    s.tails.assign(1, std::nullopt);
    f.expect_applies = true;
    f.expect_condition_a = true;
    f.expect_strong = true;
    f.expect_partition_ok = true;
    return f;
}

/// Free wave equation (linear).
inline Fixture free_wave() {
    Fixture f;
    SystemSpec& s = f.spec;
    s.name = "free_wave";
    s.N = 1;
    s.N1 = 0;
    s.masses = {0.0};
    s.F.assign(1, {});
    s.tails.assign(1, std::nullopt);
    f.expect_applies = true;
    f.expect_condition_a = true;
    f.expect_strong = true;
    f.expect_partition_ok = true;
    f.expect_I1 = {1};
    f.expect_I2 = {};
    return f;
}

} // namespace fixtures

inline std::vector<std::string> fixture_names() {
    return {"dirac_scalar_massive_spinor",
            "dirac_scalar_massive_scalar",
            "spinor_vector_system",
            "kg_wave_gradient_reduction",
            "mixed_interaction_model",
            "kg_shift_raw",
            "kg_shift_transformed",
            "wave_dtsq_blowup",
            "wave_q0_model",
            "wave_qab_model",
            "free_kg",
            "free_wave"};
}

inline Fixture get_fixture(const std::string& name) {
    if (name == "dirac_scalar_massive_spinor") return fixtures::dirac_scalar_massive_spinor();
    if (name == "dirac_scalar_massive_scalar") return fixtures::dirac_scalar_massive_scalar();
    if (name == "spinor_vector_system") return fixtures::spinor_vector_system();
    if (name == "kg_wave_gradient_reduction") return fixtures::kg_wave_gradient_reduction();
    if (name == "mixed_interaction_model") return fixtures::mixed_interaction_model();
    if (name == "kg_shift_raw") return fixtures::kg_shift_raw();
    if (name == "kg_shift_transformed") return fixtures::kg_shift_transformed();
    if (name == "wave_dtsq_blowup") return fixtures::wave_dtsq_blowup();
    if (name == "wave_q0_model") return fixtures::wave_q0_model();
    if (name == "wave_qab_model") return fixtures::wave_qab_model();
    if (name == "free_kg") return fixtures::free_kg();
    if (name == "free_wave") return fixtures::free_wave();
    throw SpecError("unknown fixture: " + name);
}

// ---------------------------------------------------------------------------
// Normal-form shift: removes undifferentiated wave-wave sources from the
// Klein-Gordon equations by the substitution v_i -> v_i - m_i^{-2} W_i(w),
// where W_i is the wave-wave part of F_i. Supported when every such W_i
// consists of undifferentiated monomials, the system is first-order
// semilinear, and no equation carries a pre-existing tail. Quadratic parts
// are rewritten exactly; cubic-and-higher corrections become generated
// evaluable tails (exact pointwise differences, not truncations).
// ---------------------------------------------------------------------------

inline SystemSpec normal_form_transform(const SystemSpec& s) {
    for (int i = 0; i < s.N; ++i) {
        if (s.tails[i]) throw SpecError("normal form shift: pre-existing tails unsupported");
        for (const auto& [m, c] : s.F[i].terms())
            if (m.x.kind == DerivKind::Second || m.y.kind == DerivKind::Second)
                throw SpecError("normal form shift: second derivatives unsupported");
    }
    // Wave-wave sources of the Klein-Gordon equations (index 1..N1).
    std::vector<QuadraticForm> W(s.N1);
    std::vector<Rational> minv2(s.N1);
    bool any = false;
    for (int i = 0; i < s.N1; ++i) {
        W[i] = split_form(s.F[i], s.N1).W;
        for (const auto& [m, c] : W[i].terms())
            if (m.x.kind != DerivKind::None || m.y.kind != DerivKind::None)
                throw SpecError("normal form shift: differentiated wave-wave sources unsupported");
        minv2[i] = Rational(1) / Rational(s.masses[i] * s.masses[i]);
        if (!W[i].empty()) any = true;
    }
    SystemSpec out;
    out.name = s.name + "_nf";
    out.N = s.N;
    out.N1 = s.N1;
    out.masses = s.masses;
    out.gamma = s.gamma;
    out.F.assign(s.N, {});
    out.tails.assign(s.N, std::nullopt);

    // New quadratic parts: unchanged except on shifted Klein-Gordon equations,
    // where W_i is removed and -2 m_i^{-2} Q0(w_j, w_k) enters per source term.
    for (int e = 0; e < s.N; ++e) {
        out.F[e] = s.F[e];
        if (e < s.N1 && !W[e].empty()) {
            out.F[e] = out.F[e] - W[e];
            for (const auto& [m, c] : W[e].terms())
                add_q0(out.F[e], m.x.component, m.y.component, -2 * minv2[e] * c);
        }
    }
    if (!any) return out;

    // Evaluable corrections. Given a sample of the shifted fields, reconstruct
    // the original fields: v_i = v~_i + m_i^{-2} W_i(w), first derivatives by
    // the product rule (W_i is undifferentiated, so only first derivatives of
    // w are needed).
    struct Shift {
        std::vector<QuadraticForm> W;
        std::vector<Rational> minv2;
        int N1;
        PointSample original(const PointSample& p) const {
            PointSample o;
            o.val = [this, p](int c) {
                double x = p.val(c);
                if (c <= N1 && !W[c - 1].empty())
                    x += to_double(minv2[c - 1]) *
                         W[c - 1].eval_d([&](const VarRef& v) { return p.val(v.component); });
                return x;
            };
            auto dshift = [this, p](int c, const std::function<double(int)>& d) {
                double x = d(c);
                if (c <= N1 && !W[c - 1].empty())
                    for (const auto& [m, co] : W[c - 1].terms())
                        x += to_double(minv2[c - 1] * co) *
                             (d(m.x.component) * p.val(m.y.component) +
                              p.val(m.x.component) * d(m.y.component));
                return x;
            };
            o.dt = [dshift, p](int c) { return dshift(c, p.dt); };
            o.dx = [dshift, p](int c, int k) {
                return dshift(c, [&](int j) { return p.dx(j, k); });
            };
            return o;
        }
    };
    auto shift = std::make_shared<Shift>(Shift{W, minv2, s.N1});

    auto eval_form = [](const QuadraticForm& F, const PointSample& p) {
        return F.eval_d([&](const VarRef& v) {
            if (v.kind == DerivKind::None) return p.val(v.component);
            return v.a == 0 ? p.dt(v.component) : p.dx(v.component, v.a);
        });
    };

    for (int e = 0; e < s.N; ++e) {
        // Exact remainder: total right-hand side of the shifted equation minus
        // its quadratic part, both evaluated on the shifted fields.
        QuadraticForm Fold = s.F[e], Fnew = out.F[e];
        std::vector<QuadraticForm> Fwave(s.F.begin() + s.N1, s.F.end());
        const bool shifted_kg = e < s.N1 && !W[e].empty();
        QuadraticForm We = shifted_kg ? W[e] : QuadraticForm{};
        const Rational mi2 = e < s.N1 ? minv2[e] : Rational(0);
        CubicTail tail;
        tail.name = s.name + "_nf_tail_" + std::to_string(e + 1);
        tail.eval = [shift, eval_form, Fold, Fnew, Fwave, shifted_kg, We, mi2,
                     N1 = s.N1](const PointSample& p) {
            const PointSample o = shift->original(p);
            double total = eval_form(Fold, o);
            if (shifted_kg) {
                const double c2 = to_double(mi2);
                for (const auto& [m, c] : We.terms()) {
                    const int j = m.x.component, k = m.y.component;
                    // -m^{-2} c (w_j box w_k + w_k box w_j + 2 Q0(w_j, w_k) + m^2 w_j w_k)
                    total -= c2 * to_double(c) *
                             (o.val(j) * eval_form(Fwave[k - N1 - 1], o) +
                              o.val(k) * eval_form(Fwave[j - N1 - 1], o));
                    double q0 = p.dt(j) * p.dt(k);
                    for (int l = 1; l <= 3; ++l) q0 -= p.dx(j, l) * p.dx(k, l);
                    total -= c2 * to_double(c) * 2.0 * q0;
                    total -= to_double(c) * p.val(j) * p.val(k);
                }
            }
            return total - eval_form(Fnew, p);
        };
        register_tail(tail.name, tail.eval);
        out.tails[e] = std::move(tail);
    }
    return out;
}

} // namespace wkg

#endif
