#ifndef WKG_NULL_ANALYZER_HPP
#define WKG_NULL_ANALYZER_HPP

#include "wkg/linear_span.hpp"
#include "wkg/null_forms.hpp"
#include "wkg/system_model.hpp"

#include <array>
#include <optional>
#include <random>
#include <set>
#include <vector>

namespace wkg {

// ---------------------------------------------------------------------------
// Evaluation on (null) data: xi_j -> lambda_j, xi'_{j,a} -> X_a mu_j,
// xi''_{j,k,a} -> X_k X_a nu_j.
// ---------------------------------------------------------------------------

struct NullData {
    std::map<int, Rational> lambda, mu, nu; // keyed by component
    std::array<Rational, 4> X{};

    Rational value(const VarRef& v) const {
        auto get = [](const std::map<int, Rational>& m, int c) {
            auto it = m.find(c);
            return it == m.end() ? Rational(0) : it->second;
        };
        switch (v.kind) {
            case DerivKind::None: return get(lambda, v.component);
            case DerivKind::First: return X[v.a] * get(mu, v.component);
            default: return X[v.k] * X[v.a] * get(nu, v.component);
        }
    }

    bool is_null_vector() const { return X[0] * X[0] - X[1] * X[1] - X[2] * X[2] - X[3] * X[3] == 0; }
};

inline Rational eval_on_null_data(const QuadraticForm& F, const NullData& d) {
    return F.eval([&](const VarRef& v) { return d.value(v); });
}

// ---------------------------------------------------------------------------
// Null-form basis, cached per canonical component pair.
//
// The basis consists of Q0(d^alpha w_j, d^beta w_k) and
// Q_ab(d^alpha w_j, d^beta w_k) with |alpha|, |beta| <= 1. Expansions are
// carried in an extended monomial algebra that keeps the formal d_t d_t
// symbol, so combinations whose time-time parts cancel are found exactly;
// a target form (which lives in the plain algebra) is in the span iff the
// cancellation works out.
// ---------------------------------------------------------------------------

struct NullBasisEntry {
    bool is_q0 = true;
    int a = 0, b = 0;    // Q_ab only
    int slot_j = 1;      // canonical component of the first factor (1 or 2)
    int slot_k = 1;
    SmallIndex alpha, beta;
};

struct NullBasis {
    LinearSpan span;
    std::vector<NullBasisEntry> entries;
};

namespace detail {

inline void add_entry(NullBasis& basis, NullBasisEntry e, const QuadraticForm& expansion) {
    basis.span.add(expansion);
    basis.entries.push_back(e);
}

inline NullBasis build_null_basis(bool distinct, bool qab_only) {
    NullBasis basis;
    const int c1 = 1, c2 = distinct ? 2 : 1;
    std::vector<SmallIndex> small = {{-1}, {0}, {1}, {2}, {3}};
    for (std::size_t ia = 0; ia < small.size(); ++ia)
        for (std::size_t ib = 0; ib < small.size(); ++ib) {
            if (!distinct && ib < ia) continue; // Q0 symmetric, same component
            const VarRef X = apply_small(c1, small[ia]);
            const VarRef Y = apply_small(c2, small[ib]);
            if (!qab_only) {
                if (auto q0 = expand_q0(X, Y); q0 && !q0->empty())
                    add_entry(basis, {true, 0, 0, 1, distinct ? 2 : 1, small[ia], small[ib]}, *q0);
            }
            if (!distinct && ib == ia) continue; // Q_ab(X, X) == 0
            for (int a = 0; a < 4; ++a)
                for (int b = a + 1; b < 4; ++b)
                    if (auto q = expand_qab(X, Y, a, b); q && !q->empty())
                        add_entry(basis, {false, a, b, 1, distinct ? 2 : 1, small[ia], small[ib]}, *q);
        }
    return basis;
}

inline const NullBasis& null_basis(bool distinct, bool qab_only) {
    static NullBasis full_d = build_null_basis(true, false);
    static NullBasis full_e = build_null_basis(false, false);
    static NullBasis qab_d = build_null_basis(true, true);
    static NullBasis qab_e = build_null_basis(false, true);
    if (qab_only) return distinct ? qab_d : qab_e;
    return distinct ? full_d : full_e;
}

/// Splits a form into buckets keyed by its (unordered) component pair.
inline std::map<std::pair<int, int>, QuadraticForm> component_buckets(const QuadraticForm& F) {
    std::map<std::pair<int, int>, QuadraticForm> out;
    for (const auto& [m, c] : F.terms()) {
        auto key = std::minmax(m.x.component, m.y.component);
        out[{key.first, key.second}].add(m, c);
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// check_null_condition / check_strong_null
// ---------------------------------------------------------------------------

/// One certified term A * Q0(d^alpha u_j, d^beta u_k) or
/// B * Q_ab(d^alpha u_j, d^beta u_k).
struct NullFormTerm {
    bool is_q0 = true;
    int a = 0, b = 0;
    int j = 0, k = 0; // component indices (original labels)
    SmallIndex alpha, beta;
    Rational coeff;

    /// Raw-monomial expansion of coeff * Q(d^alpha u_j, d^beta u_k).
    QuadraticForm expansion() const {
        const VarRef X = apply_small(j, alpha);
        const VarRef Y = apply_small(k, beta);
        auto q = is_q0 ? expand_q0(X, Y) : expand_qab(X, Y, a, b);
        QuadraticForm out;
        out.add_scaled(*q, coeff);
        return out;
    }
};

/// Constructive witness of condition (a') for one equation, or of its failure.
struct NullDecomposition {
    std::vector<NullFormTerm> terms;
    QuadraticForm residual; // zero iff the decomposition succeeded
};

struct FailureWitness {
    NullData data;
    Rational value; // nonzero evaluation of the quadratic part
};

/// Decomposes F into the Q0/Q_ab basis over the given variable set.
/// (Exact; the verdict is residual.empty().)
inline NullDecomposition decompose_in_null_basis(const QuadraticForm& F, bool qab_only) {
    NullDecomposition out;
    for (auto& [pair, bucket] : detail::component_buckets(F)) {
        const auto [p, q] = pair;
        const bool distinct = p != q;
        auto fwd = [&](int c) { return c == p ? 1 : 2; };
        auto bwd = [&](int c) { return c == 1 ? p : q; };
        const NullBasis& basis = detail::null_basis(distinct, qab_only);
        auto red = basis.span.reduce(bucket.relabel(fwd));
        for (const auto& [bi, coeff] : red.coeffs) {
            const NullBasisEntry& e = basis.entries[bi];
            NullFormTerm t;
            t.is_q0 = e.is_q0;
            t.a = e.a;
            t.b = e.b;
            t.j = bwd(e.slot_j);
            t.k = bwd(e.slot_k);
            t.alpha = e.alpha;
            t.beta = e.beta;
            t.coeff = coeff;
            out.terms.push_back(std::move(t));
        }
        out.residual += red.residual.relabel(bwd);
    }
    return out;
}

namespace detail {

inline Rational random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-6, 6);
    std::uniform_int_distribution<int> den(1, 3);
    return Rational(num(rng), den(rng));
}

/// Random rational null 4-vector via the stereographic parametrization
/// X = (|p|^2 + 1, 2 p1, 2 p2, |p|^2 - 1), with the axes permuted.
inline std::array<Rational, 4> random_null_vector(std::mt19937_64& rng) {
    Rational p1 = random_rational(rng), p2 = random_rational(rng);
    Rational s = p1 * p1 + p2 * p2;
    std::array<Rational, 4> X{s + 1, 2 * p1, 2 * p2, s - 1};
    std::uniform_int_distribution<int> perm(0, 2);
    int rot = perm(rng);
    for (int r = 0; r < rot; ++r) {
        Rational tmp = X[1];
        X[1] = X[2];
        X[2] = X[3];
        X[3] = tmp;
    }
    return X;
}

inline NullData random_null_data(std::mt19937_64& rng, const std::set<int>& comps, bool on_cone) {
    NullData d;
    if (on_cone) {
        d.X = random_null_vector(rng);
    } else {
        for (auto& x : d.X) x = random_rational(rng);
    }
    for (int c : comps) {
        d.lambda[c] = random_rational(rng);
        d.mu[c] = random_rational(rng);
        d.nu[c] = random_rational(rng);
    }
    return d;
}

inline std::optional<FailureWitness> search_witness(const QuadraticForm& F, bool on_cone,
                                                    std::uint64_t seed, int attempts = 10000) {
    std::mt19937_64 rng(seed);
    const auto comps = F.components();
    for (int it = 0; it < attempts; ++it) {
        NullData d = random_null_data(rng, comps, on_cone);
        Rational v = eval_on_null_data(F, d);
        if (v != 0) return FailureWitness{std::move(d), std::move(v)};
    }
    return std::nullopt;
}

} // namespace detail

struct NullConditionResult {
    int equation = 0; // component index of the wave equation
    bool ok = false;
    NullDecomposition decomposition;
    std::optional<FailureWitness> witness; // on failure, if the seeded search found one
};

/// Condition (a): for each wave equation, decides exactly whether the
/// wave-only restriction of the quadratic part is a combination of null forms,
/// returning the decomposition or a concrete failure witness.
inline std::vector<NullConditionResult> check_null_condition(const SystemSpec& s,
                                                             std::uint64_t seed = 20240901) {
    std::vector<NullConditionResult> out;
    for (int i = s.N1 + 1; i <= s.N; ++i) {
        NullConditionResult r;
        r.equation = i;
        const QuadraticForm FW = split_form(s.F[i - 1], s.N1).W;
        r.decomposition = decompose_in_null_basis(FW, false);
        r.ok = r.decomposition.residual.empty();
        if (!r.ok) r.witness = detail::search_witness(FW, true, seed + static_cast<std::uint64_t>(i));
        out.push_back(std::move(r));
    }
    return out;
}

struct StrongNullResult {
    int equation = 0;
    bool ok = false;
    NullDecomposition decomposition; // pure Q_ab combination when ok
    std::optional<FailureWitness> witness;
};

/// Strong null condition: every F_i^(2) (all equations, full form) must be a
/// linear combination of Q_ab(d^alpha u_j, d^beta u_k).
inline std::vector<StrongNullResult> check_strong_null(const SystemSpec& s,
                                                       std::uint64_t seed = 20240902) {
    std::vector<StrongNullResult> out;
    for (int i = 1; i <= s.N; ++i) {
        StrongNullResult r;
        r.equation = i;
        r.decomposition = decompose_in_null_basis(s.F[i - 1], true);
        r.ok = r.decomposition.residual.empty();
        if (!r.ok) r.witness = detail::search_witness(s.F[i - 1], false, seed + static_cast<std::uint64_t>(i));
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Condition (b-i)
// ---------------------------------------------------------------------------

struct BiResult {
    bool ok = true;
    int equation = 0;  // offending equation (component index), when !ok
    Monomial witness;  // offending term, when !ok
};

/// Condition (b-i) for wave index k: no quadratic part of any equation may
/// contain the undifferentiated wave component w_k.
inline BiResult check_b_i(const SystemSpec& s, int k) {
    const int comp = s.N1 + k;
    for (int i = 0; i < s.N; ++i)
        if (auto m = s.F[i].find_plain_factor(comp))
            return {false, i + 1, *m};
    return {};
}

// ---------------------------------------------------------------------------
// Divergence decomposition (condition (b-ii-1))
// ---------------------------------------------------------------------------

/// Witness G with F = sum_a d_a { G_a(phi, d phi) } + residual, as a formal
/// identity over the variable algebra (valid for every C^2 field).
struct DivergenceCertificate {
    std::array<QuadraticForm, 4> G;
    QuadraticForm residual;
};

namespace detail {

struct DivBasis {
    LinearSpan span;
    std::vector<std::pair<int, Monomial>> entries; // (a, G_a monomial)
};

inline DivBasis build_div_basis(bool distinct) {
    DivBasis basis;
    std::vector<VarRef> vars;
    for (int c = 1; c <= (distinct ? 2 : 1); ++c) {
        vars.push_back(VarRef::plain(c));
        for (int a = 0; a <= 3; ++a) vars.push_back(VarRef::first(c, a));
    }
    for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = i; j < vars.size(); ++j) {
            const Monomial m(vars[i], vars[j]);
            for (int a = 0; a <= 3; ++a)
                if (auto e = expand_da_of_monomial(m, a); e && !e->empty()) {
                    basis.span.add(*e);
                    basis.entries.emplace_back(a, m);
                }
        }
    return basis;
}

inline const DivBasis& div_basis(bool distinct) {
    static DivBasis d = build_div_basis(true);
    static DivBasis e = build_div_basis(false);
    return distinct ? d : e;
}

} // namespace detail

inline DivergenceCertificate divergence_decompose(const QuadraticForm& F) {
    DivergenceCertificate out;
    for (auto& [pair, bucket] : detail::component_buckets(F)) {
        const auto [p, q] = pair;
        const bool distinct = p != q;
        auto fwd = [&](int c) { return c == p ? 1 : 2; };
        auto bwd = [&](int c) { return c == 1 ? p : q; };
        const auto& basis = detail::div_basis(distinct);
        auto red = basis.span.reduce(bucket.relabel(fwd));
        for (const auto& [bi, coeff] : red.coeffs) {
            const auto& [a, mono] = basis.entries[bi];
            VarRef x = mono.x, y = mono.y;
            x.component = bwd(x.component);
            y.component = bwd(y.component);
            out.G[a].add(Monomial(x, y), coeff);
        }
        out.residual += red.residual.relabel(bwd);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Condition (b-ii-2)
// ---------------------------------------------------------------------------

struct BiiResult {
    bool ok = true;
    int a = 0;        // offending G slot, when !ok
    int l = 0;        // offending I1 index, when !ok
    Monomial witness;
};

/// For a certified G: no G_a may contain the undifferentiated wave component
/// w_l for any l in I1.
inline BiiResult check_b_ii_2(const DivergenceCertificate& cert, const std::set<int>& I1, int N1) {
    for (int a = 0; a <= 3; ++a)
        for (int l : I1)
            if (auto m = cert.G[a].find_plain_factor(N1 + l))
                return {false, a, l, *m};
    return {};
}

// ---------------------------------------------------------------------------
// Partition search (condition (b))
// ---------------------------------------------------------------------------

struct PartitionBlock {
    int k = 0;                 // wave index that cannot be placed
    std::string reason;        // human-readable blocking condition
};

struct PartitionCertificate {
    bool ok = false;
    std::set<int> I1, I2;                       // wave indices 1..N2
    std::map<int, DivergenceCertificate> div_certs; // for k in I2
    std::vector<PartitionBlock> blocks;         // populated on failure
    std::vector<std::string> tail_notes;        // tails recorded as user-asserted
};

/// Searches for a partition I1 (undifferentiated-free components) and I2
/// (divergence-form wave equations) satisfying condition (b). Eligibility is
/// decided exactly per index; among valid assignments the maximal I1 is
/// returned (deterministic: the returned I1 contains every I1 of any valid
/// partition for the computed certificates).
inline PartitionCertificate find_partition(const SystemSpec& s) {
    const int N2 = s.N2();
    if (N2 > 20) throw SpecError("partition enumeration bound exceeded (N2 > 20)");
    PartitionCertificate cert;

    std::set<int> i1_eligible;
    std::map<int, BiResult> bi_results;
    for (int k = 1; k <= N2; ++k) {
        bi_results[k] = check_b_i(s, k);
        if (bi_results[k].ok) i1_eligible.insert(k);
    }
    std::map<int, DivergenceCertificate> div;
    std::map<int, std::set<int>> bad; // k -> wave indices whose plain factor appears in G
    std::set<int> i2_eligible;
    for (int k = 1; k <= N2; ++k) {
        div[k] = divergence_decompose(s.F[s.N1 + k - 1]);
        if (!div[k].residual.empty()) continue;
        i2_eligible.insert(k);
        for (int a = 0; a <= 3; ++a)
            for (const auto& [m, c] : div[k].G[a].terms())
                for (const VarRef* v : {&m.x, &m.y})
                    if (v->kind == DerivKind::None && v->component > s.N1)
                        bad[k].insert(v->component - s.N1);
    }

    // Greatest fixed point: start from the maximal candidate I1 and remove
    // indices forced out by (b-ii-2) constraints of equations forced into I2.
    std::set<int> I1 = i1_eligible;
    for (;;) {
        std::set<int> I2;
        for (int k = 1; k <= N2; ++k)
            if (!I1.count(k)) I2.insert(k);
        for (int k : I2)
            if (!i2_eligible.count(k)) {
                cert.blocks.push_back(
                    {k, bi_results[k].ok
                            ? "divergence decomposition has nonzero residual and (b-ii-2) "
                              "constraints force this index out of I1"
                            : "undifferentiated factor " + bi_results[k].witness.str() +
                                  " in equation " + std::to_string(bi_results[k].equation) +
                                  " blocks I1; divergence decomposition has nonzero residual, "
                                  "blocking I2"});
                return cert; // every valid partition would need k in I2
            }
        std::set<int> remove;
        for (int k : I2)
            for (int l : bad[k])
                if (I1.count(l)) remove.insert(l);
        if (remove.empty()) {
            cert.ok = true;
            cert.I1 = I1;
            cert.I2 = I2;
            for (int k : I2) cert.div_certs[k] = div[k];
            for (int k : I2)
                if (s.tails[s.N1 + k - 1])
                    cert.tail_notes.push_back("equation " + std::to_string(s.N1 + k) + " tail '" +
                                              s.tails[s.N1 + k - 1]->name +
                                              "' assumed divergence-form (user-asserted)");
            return cert;
        }
        for (int l : remove) I1.erase(l);
    }
}

// ---------------------------------------------------------------------------
// Full analysis
// ---------------------------------------------------------------------------

struct AnalysisReport {
    std::string name;
    SymmetricityReport symmetricity;
    std::vector<NullConditionResult> null_condition; // wave equations
    std::vector<StrongNullResult> strong_null;        // informational
    PartitionCertificate partition;
    bool condition_a = false;
    bool strong = false;
    bool theorem_applies = false;
};

inline AnalysisReport analyze_system(const SystemSpec& s, std::uint64_t seed = 20240901) {
    AnalysisReport rep;
    rep.name = s.name;
    rep.symmetricity = validate_symmetricity(s);
    rep.null_condition = check_null_condition(s, seed);
    rep.strong_null = check_strong_null(s, seed + 1);
    rep.partition = find_partition(s);
    rep.condition_a = true;
    for (const auto& r : rep.null_condition) rep.condition_a = rep.condition_a && r.ok;
    rep.strong = true;
    for (const auto& r : rep.strong_null) rep.strong = rep.strong && r.ok;
    rep.theorem_applies = rep.symmetricity.ok && rep.condition_a && rep.partition.ok;
    return rep;
}

// ---------------------------------------------------------------------------
// JSON report
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json nulldata_to_json(const NullData& d) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json X = nlohmann::ordered_json::array();
    for (const auto& x : d.X) X.push_back(rational_to_string(x));
    j["X"] = std::move(X);
    auto dump = [](const std::map<int, Rational>& m) {
        nlohmann::ordered_json o;
        for (const auto& [c, v] : m) o[std::to_string(c)] = rational_to_string(v);
        return o;
    };
    j["lambda"] = dump(d.lambda);
    j["mu"] = dump(d.mu);
    j["nu"] = dump(d.nu);
    return j;
}

inline nlohmann::ordered_json decomposition_to_json(const NullDecomposition& d) {
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (const auto& t : d.terms) {
        nlohmann::ordered_json e;
        e["form"] = t.is_q0 ? "Q0" : ("Q" + std::to_string(t.a) + std::to_string(t.b));
        e["j"] = t.j;
        e["k"] = t.k;
        e["alpha"] = t.alpha.none() ? nlohmann::ordered_json(nullptr)
                                    : nlohmann::ordered_json(t.alpha.a);
        e["beta"] = t.beta.none() ? nlohmann::ordered_json(nullptr)
                                  : nlohmann::ordered_json(t.beta.a);
        e["coeff"] = rational_to_string(t.coeff);
        terms.push_back(std::move(e));
    }
    nlohmann::ordered_json j;
    j["terms"] = std::move(terms);
    j["residual"] = form_to_json(d.residual);
    return j;
}

inline nlohmann::ordered_json report_to_json(const AnalysisReport& rep) {
    nlohmann::ordered_json j;
    j["name"] = rep.name;
    j["theorem_applies"] = rep.theorem_applies;
    j["condition_a"] = rep.condition_a;
    j["strong_null"] = rep.strong;
    j["symmetricity_ok"] = rep.symmetricity.ok;
    j["symmetricity_vacuous"] = rep.symmetricity.gamma_absent;

    nlohmann::ordered_json nulls = nlohmann::ordered_json::array();
    for (const auto& r : rep.null_condition) {
        nlohmann::ordered_json e;
        e["equation"] = r.equation;
        e["ok"] = r.ok;
        e["decomposition"] = decomposition_to_json(r.decomposition);
        if (r.witness) {
            e["witness"] = nulldata_to_json(r.witness->data);
            e["witness_value"] = rational_to_string(r.witness->value);
        } else if (!r.ok) {
            e["witness"] = "residual nonzero, no explicit witness found";
        }
        nulls.push_back(std::move(e));
    }
    j["null_condition"] = std::move(nulls);

    nlohmann::ordered_json part;
    part["ok"] = rep.partition.ok;
    part["I1"] = rep.partition.I1;
    part["I2"] = rep.partition.I2;
    nlohmann::ordered_json certs;
    for (const auto& [k, c] : rep.partition.div_certs) {
        nlohmann::ordered_json g = nlohmann::ordered_json::array();
        for (int a = 0; a <= 3; ++a) g.push_back(form_to_json(c.G[a]));
        certs[std::to_string(k)] = std::move(g);
    }
    part["divergence_witnesses"] = std::move(certs);
    nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
    for (const auto& b : rep.partition.blocks) {
        nlohmann::ordered_json e;
        e["k"] = b.k;
        e["reason"] = b.reason;
        blocks.push_back(std::move(e));
    }
    part["blocks"] = std::move(blocks);
    part["tail_notes"] = rep.partition.tail_notes;
    j["partition"] = std::move(part);
    return j;
}

} // namespace wkg

#endif
