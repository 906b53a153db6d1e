#ifndef WKG_LINEAR_SPAN_HPP
#define WKG_LINEAR_SPAN_HPP

#include "wkg/quadratic_form.hpp"

#include <map>
#include <vector>

namespace wkg {

/// Exact span membership over the monomial coordinate space.
///
/// Basis vectors are quadratic forms; rows are kept fully reduced (each pivot
/// monomial appears in exactly one row), so `reduce` is a straight pass.
/// Every row remembers how it was formed from the original basis vectors,
/// which lets `reduce` recover explicit decomposition coefficients.
class LinearSpan {
public:
    struct Reduction {
        std::map<int, Rational> coeffs; // basis index -> coefficient
        QuadraticForm residual;         // zero iff target lies in the span
    };

    /// Adds a basis vector; returns its index.
    int add(const QuadraticForm& v) {
        const int idx = static_cast<int>(count_++);
        Row row;
        row.vec = v;
        row.combo[idx] = 1;
        insert_reduced(std::move(row));
        return idx;
    }

    Reduction reduce(const QuadraticForm& target) const {
        Reduction out;
        out.residual = target;
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& [m, c] : out.residual.terms()) {
                auto it = rows_.find(m);
                if (it == rows_.end()) continue;
                const Rational factor = c; // pivot coefficient in row is 1
                out.residual.add_scaled(it->second.vec, -factor);
                for (const auto& [bi, bc] : it->second.combo) {
                    auto [cit, ins] = out.coeffs.emplace(bi, factor * bc);
                    if (!ins) {
                        cit->second += factor * bc;
                        if (cit->second == 0) out.coeffs.erase(cit);
                    }
                }
                changed = true;
                break;
            }
        }
        return out;
    }

    std::size_t rank() const { return rows_.size(); }

private:
    struct Row {
        QuadraticForm vec;              // pivot (first monomial) has coefficient 1
        std::map<int, Rational> combo;  // expression in original basis vectors
    };

    void insert_reduced(Row row) {
        // Forward-reduce against existing pivots.
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& [m, c] : row.vec.terms()) {
                auto it = rows_.find(m);
                if (it == rows_.end()) continue;
                axpy(row, it->second, -c);
                changed = true;
                break;
            }
        }
        if (row.vec.empty()) return; // linearly dependent
        const Monomial pivot = row.vec.terms().begin()->first;
        const Rational lead = row.vec.terms().begin()->second;
        scale(row, Rational(1) / lead);
        // Back-substitute into existing rows.
        for (auto& [p, r] : rows_) {
            const Rational c = r.vec.coeff(pivot);
            if (c != 0) axpy(r, row, -c);
        }
        rows_.emplace(pivot, std::move(row));
    }

    static void axpy(Row& dst, const Row& src, const Rational& s) {
        dst.vec.add_scaled(src.vec, s);
        for (const auto& [bi, bc] : src.combo) {
            auto [it, ins] = dst.combo.emplace(bi, s * bc);
            if (!ins) {
                it->second += s * bc;
                if (it->second == 0) dst.combo.erase(it);
            }
        }
    }

    static void scale(Row& r, const Rational& s) {
        QuadraticForm v;
        v.add_scaled(r.vec, s);
        r.vec = std::move(v);
        for (auto& [bi, bc] : r.combo) bc *= s;
    }

    std::map<Monomial, Row> rows_;
    std::size_t count_ = 0;
};

} // namespace wkg

#endif
