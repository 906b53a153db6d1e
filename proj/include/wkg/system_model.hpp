#ifndef WKG_SYSTEM_MODEL_HPP
#define WKG_SYSTEM_MODEL_HPP

#include "wkg/quadratic_form.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wkg {

struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Point sample of the fields handed to an evaluable cubic tail:
/// values, time derivatives, and spatial first derivatives by component.
struct PointSample {
    std::function<double(int)> val;      // u_j
    std::function<double(int)> dt;       // d_t u_j
    std::function<double(int, int)> dx;  // d_k u_j, k in 1..3
};

/// Named, evaluable (not symbolic) cubic-and-higher remainder of one equation.
struct CubicTail {
    std::string name;
    std::function<double(const PointSample&)> eval; // may be empty: declared but not evaluable
    bool assumed_divergence_form = false;           // user assertion recorded in certificates
};

/// Linear form in (xi, xi') with rational coefficients; used for the
/// quasilinear coefficient tables gamma^{ij}_{ka}.
using LinearForm = std::map<VarRef, Rational>;

struct GammaTable {
    // key: (i, j, k, a), all as in gamma^{ij}_{ka}; i,j 1-based, k in 1..3, a in 0..3
    std::map<std::array<int, 4>, LinearForm> entries;

    LinearForm get(int i, int j, int k, int a) const {
        auto it = entries.find({i, j, k, a});
        return it == entries.end() ? LinearForm{} : it->second;
    }
    bool empty() const { return entries.empty(); }
};

/// A coupled wave--Klein-Gordon system: components 1..N1 are Klein-Gordon
/// (positive mass), components N1+1..N are wave (zero mass). Each equation
/// carries the quadratic part of its nonlinearity as an exact sparse form,
/// plus an optional evaluable cubic tail.
struct SystemSpec {
    std::string name;
    int N = 0;
    int N1 = 0;
    std::vector<double> masses;          // size N
    std::vector<QuadraticForm> F;        // size N
    std::vector<std::optional<CubicTail>> tails; // size N
    GammaTable gamma;

    int N2() const { return N - N1; }
    bool is_wave(int comp) const { return comp > N1; }
    int wave_index(int comp) const { return comp - N1; } // 1..N2
};

inline void validate_varref(const VarRef& v, int N, const std::string& where) {
    if (v.component < 1 || v.component > N)
        throw SpecError(where + ": component " + std::to_string(v.component) + " out of range 1.." +
                        std::to_string(N));
    switch (v.kind) {
        case DerivKind::None: break;
        case DerivKind::First:
            if (v.a < 0 || v.a > 3) throw SpecError(where + ": derivative index out of range");
            break;
        case DerivKind::Second:
            if (v.k < 1 || v.k > 3 || v.a < 0 || v.a > 3)
                throw SpecError(where + ": second derivative must be d_k d_a with k in 1..3");
            break;
    }
}

inline void validate_spec(const SystemSpec& s) {
    if (s.N < 1) throw SpecError("N must be positive");
    if (s.N1 < 0 || s.N1 > s.N) throw SpecError("N1 must satisfy 0 <= N1 <= N");
    if (static_cast<int>(s.masses.size()) != s.N) throw SpecError("masses must have N entries");
    if (static_cast<int>(s.F.size()) != s.N) throw SpecError("equations must have N entries");
    for (int i = 0; i < s.N; ++i) {
        if (i < s.N1 && !(s.masses[i] > 0))
            throw SpecError("mass ordering violated: masses[" + std::to_string(i + 1) +
                            "] must be positive for a Klein-Gordon component");
        if (i >= s.N1 && s.masses[i] != 0)
            throw SpecError("mass ordering violated: masses[" + std::to_string(i + 1) +
                            "] must be zero for a wave component");
    }
    for (int i = 0; i < s.N; ++i)
        for (const auto& [m, c] : s.F[i].terms()) {
            const std::string where = "equation " + std::to_string(i + 1);
            validate_varref(m.x, s.N, where);
            validate_varref(m.y, s.N, where);
        }
    for (const auto& [key, form] : s.gamma.entries) {
        const auto [i, j, k, a] = key;
        if (i < 1 || i > s.N || j < 1 || j > s.N || k < 1 || k > 3 || a < 0 || a > 3)
            throw SpecError("gamma index out of range");
        for (const auto& [v, c] : form) {
            validate_varref(v, s.N, "gamma table");
            if (v.kind == DerivKind::Second)
                throw SpecError("gamma coefficients are linear forms in (xi, xi') only");
        }
    }
}

/// Symmetricity check for the quasilinear coefficient tables:
/// gamma^{ij}_{ka} == gamma^{ji}_{ka} and gamma^{ij}_{kl} == gamma^{ij}_{lk},
/// coefficient-wise as linear forms.
struct SymmetricityReport {
    bool ok = true;
    bool gamma_absent = false; // vacuous pass
    std::vector<std::array<int, 4>> violations; // offending (i, j, k, a)
};

inline SymmetricityReport validate_symmetricity(const SystemSpec& s) {
    SymmetricityReport rep;
    if (s.gamma.empty()) {
        rep.gamma_absent = true;
        return rep;
    }
    auto record = [&](int i, int j, int k, int a) {
        rep.ok = false;
        rep.violations.push_back({i, j, k, a});
    };
    for (int i = 1; i <= s.N; ++i)
        for (int j = i; j <= s.N; ++j)
            for (int k = 1; k <= 3; ++k)
                for (int a = 0; a <= 3; ++a)
                    if (s.gamma.get(i, j, k, a) != s.gamma.get(j, i, k, a)) record(i, j, k, a);
    for (int i = 1; i <= s.N; ++i)
        for (int j = 1; j <= s.N; ++j)
            for (int k = 1; k <= 3; ++k)
                for (int l = k + 1; l <= 3; ++l)
                    if (s.gamma.get(i, j, k, l) != s.gamma.get(i, j, l, k)) record(i, j, k, l);
    return rep;
}

/// Restriction of a quadratic form to wave-only (W), Klein-Gordon-only (K)
/// and mixed (KW) variable pairs; W + K + KW reconstructs the input exactly.
struct SplitForm {
    QuadraticForm W, K, KW;
};

inline SplitForm split_form(const QuadraticForm& F, int N1) {
    SplitForm out;
    for (const auto& [m, c] : F.terms()) {
        const bool xk = m.x.component <= N1;
        const bool yk = m.y.component <= N1;
        if (xk && yk) out.K.add(m, c);
        else if (!xk && !yk) out.W.add(m, c);
        else out.KW.add(m, c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cubic tail registry: JSON files carry tail names only; loaders resolve the
// names against functions registered here (built-in fixtures register theirs).
// ---------------------------------------------------------------------------

inline std::map<std::string, std::function<double(const PointSample&)>>& tail_registry() {
    static std::map<std::string, std::function<double(const PointSample&)>> reg;
    return reg;
}

inline void register_tail(const std::string& name,
                          std::function<double(const PointSample&)> fn) {
    tail_registry()[name] = std::move(fn);
}

// ---------------------------------------------------------------------------
// JSON serialization (schema fixed by the tool's file format)
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json varref_to_json(const VarRef& v) {
    nlohmann::ordered_json j;
    j["component"] = v.component;
    switch (v.kind) {
        case DerivKind::None: j["deriv"] = nullptr; break;
        case DerivKind::First: j["deriv"] = {v.a}; break;
        case DerivKind::Second: j["deriv"] = {v.k, v.a}; break;
    }
    return j;
}

inline VarRef varref_from_json(const nlohmann::json& j) {
    VarRef v;
    v.component = j.at("component").get<int>();
    const auto& d = j.at("deriv");
    if (d.is_null()) return v;
    if (!d.is_array()) throw SpecError("deriv must be null, [a], or [k, a]");
    if (d.size() == 1) return VarRef::first(v.component, d[0].get<int>());
    if (d.size() == 2) return VarRef::second(v.component, d[0].get<int>(), d[1].get<int>());
    throw SpecError("deriv must be null, [a], or [k, a]");
}

inline nlohmann::ordered_json form_to_json(const QuadraticForm& f) {
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (const auto& [m, c] : f.terms()) {
        nlohmann::ordered_json t;
        t["a"] = varref_to_json(m.x);
        t["b"] = varref_to_json(m.y);
        t["coeff"] = rational_to_string(c);
        terms.push_back(std::move(t));
    }
    return terms;
}

inline QuadraticForm form_from_json(const nlohmann::json& terms) {
    QuadraticForm f;
    for (const auto& t : terms)
        f.add(varref_from_json(t.at("a")), varref_from_json(t.at("b")),
              parse_rational(t.at("coeff").get<std::string>()));
    return f;
}

inline nlohmann::ordered_json spec_to_json(const SystemSpec& s) {
    nlohmann::ordered_json j;
    if (!s.name.empty()) j["name"] = s.name;
    j["N"] = s.N;
    j["N1"] = s.N1;
    j["masses"] = s.masses;
    nlohmann::ordered_json eqs = nlohmann::ordered_json::array();
    for (int i = 0; i < s.N; ++i) {
        nlohmann::ordered_json e;
        e["terms"] = form_to_json(s.F[i]);
        if (s.tails[i]) e["cubic_tail"] = s.tails[i]->name;
        else e["cubic_tail"] = nullptr;
        eqs.push_back(std::move(e));
    }
    j["equations"] = std::move(eqs);
    if (!s.gamma.empty()) {
        nlohmann::ordered_json g = nlohmann::ordered_json::array();
        for (const auto& [key, form] : s.gamma.entries) {
            nlohmann::ordered_json e;
            e["i"] = key[0];
            e["j"] = key[1];
            e["k"] = key[2];
            e["a"] = key[3];
            nlohmann::ordered_json terms = nlohmann::ordered_json::array();
            for (const auto& [v, c] : form) {
                nlohmann::ordered_json t;
                t["var"] = varref_to_json(v);
                t["coeff"] = rational_to_string(c);
                terms.push_back(std::move(t));
            }
            e["terms"] = std::move(terms);
            g.push_back(std::move(e));
        }
        j["gamma"] = std::move(g);
    }
    return j;
}

inline SystemSpec spec_from_json(const nlohmann::json& j) {
    SystemSpec s;
    if (j.contains("name")) s.name = j.at("name").get<std::string>();
    s.N = j.at("N").get<int>();
    s.N1 = j.at("N1").get<int>();
    s.masses = j.at("masses").get<std::vector<double>>();
    const auto& eqs = j.at("equations");
    if (!eqs.is_array()) throw SpecError("equations must be an array");
    for (const auto& e : eqs) {
        s.F.push_back(form_from_json(e.at("terms")));
        if (e.contains("cubic_tail") && !e.at("cubic_tail").is_null()) {
            CubicTail tail;
            tail.name = e.at("cubic_tail").get<std::string>();
            auto it = tail_registry().find(tail.name);
            if (it != tail_registry().end()) tail.eval = it->second;
            tail.assumed_divergence_form = true; // user-asserted; see certificates
            s.tails.emplace_back(std::move(tail));
        } else {
            s.tails.emplace_back(std::nullopt);
        }
    }
    if (j.contains("gamma") && !j.at("gamma").is_null())
        for (const auto& e : j.at("gamma")) {
            LinearForm form;
            for (const auto& t : e.at("terms"))
                form[varref_from_json(t.at("var"))] = parse_rational(t.at("coeff").get<std::string>());
            s.gamma.entries[{e.at("i").get<int>(), e.at("j").get<int>(), e.at("k").get<int>(),
                             e.at("a").get<int>()}] = std::move(form);
        }
    validate_spec(s);
    return s;
}

inline SystemSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open spec file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SpecError("malformed spec file " + path + ": " + e.what());
    }
    return spec_from_json(j);
}

inline void save_spec(const SystemSpec& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SpecError("cannot write spec file: " + path);
    out << spec_to_json(s).dump(2) << "\n";
}

} // namespace wkg

#endif
