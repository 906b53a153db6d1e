#ifndef WKG_QUADRATIC_FORM_HPP
#define WKG_QUADRATIC_FORM_HPP

#include "wkg/rational.hpp"
#include "wkg/varref.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>

namespace wkg {

/// Unordered product of two variable references, stored sorted.
struct Monomial {
    VarRef x, y; // x <= y

    Monomial() = default;
    Monomial(VarRef a, VarRef b) {
        if (b < a) std::swap(a, b);
        x = a;
        y = b;
    }
    auto tie() const { return std::make_pair(x.tie(), y.tie()); }
    bool operator==(const Monomial& o) const { return tie() == o.tie(); }
    bool operator<(const Monomial& o) const { return tie() < o.tie(); }
    std::string str() const { return "(" + x.str() + ")*(" + y.str() + ")"; }
};

/// Sparse symmetric quadratic form over the variables (xi, xi', xi'').
/// Keys are canonical monomials; zero coefficients are never stored.
class QuadraticForm {
public:
    using Terms = std::map<Monomial, Rational>;

    QuadraticForm() = default;

    void add(const VarRef& a, const VarRef& b, const Rational& c) { add(Monomial(a, b), c); }

    void add(const Monomial& m, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    void add_scaled(const QuadraticForm& f, const Rational& s) {
        if (s == 0) return;
        for (const auto& [m, c] : f.terms_) add(m, c * s);
    }

    QuadraticForm& operator+=(const QuadraticForm& f) {
        add_scaled(f, 1);
        return *this;
    }
    QuadraticForm& operator-=(const QuadraticForm& f) {
        add_scaled(f, -1);
        return *this;
    }
    friend QuadraticForm operator+(QuadraticForm a, const QuadraticForm& b) { return a += b; }
    friend QuadraticForm operator-(QuadraticForm a, const QuadraticForm& b) { return a -= b; }

    bool operator==(const QuadraticForm& o) const { return terms_ == o.terms_; }

    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const Terms& terms() const { return terms_; }

    Rational coeff(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    std::set<int> components() const {
        std::set<int> out;
        for (const auto& [m, c] : terms_) {
            out.insert(m.x.component);
            out.insert(m.y.component);
        }
        return out;
    }

    bool contains_component(int comp, DerivKind kind) const {
        for (const auto& [m, c] : terms_)
            if ((m.x.component == comp && m.x.kind == kind) ||
                (m.y.component == comp && m.y.kind == kind))
                return true;
        return false;
    }

    /// First monomial containing the given undifferentiated component, if any.
    std::optional<Monomial> find_plain_factor(int comp) const {
        for (const auto& [m, c] : terms_)
            if ((m.x.component == comp && m.x.kind == DerivKind::None) ||
                (m.y.component == comp && m.y.kind == DerivKind::None))
                return m;
        return std::nullopt;
    }

    /// Exact evaluation under a variable assignment.
    Rational eval(const std::function<Rational(const VarRef&)>& value) const {
        Rational sum = 0;
        for (const auto& [m, c] : terms_) sum += c * value(m.x) * value(m.y);
        return sum;
    }

    double eval_d(const std::function<double(const VarRef&)>& value) const {
        double sum = 0;
        for (const auto& [m, c] : terms_) sum += to_double(c) * value(m.x) * value(m.y);
        return sum;
    }

    /// Form with every component index replaced through `map`.
    QuadraticForm relabel(const std::function<int(int)>& map) const {
        QuadraticForm out;
        for (const auto& [m, c] : terms_) {
            VarRef x = m.x, y = m.y;
            x.component = map(x.component);
            y.component = map(y.component);
            out.add(x, y, c);
        }
        return out;
    }

private:
    Terms terms_;
};

} // namespace wkg

#endif
