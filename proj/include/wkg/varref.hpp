#ifndef WKG_VARREF_HPP
#define WKG_VARREF_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <tuple>

namespace wkg {

/// Derivative descriptor attached to one unknown:
///   None        -> u_j itself
///   First(a)    -> d_a u_j,        a in 0..3 (0 = time)
///   Second(k,a) -> d_k d_a u_j,    k in 1..3 spatial, a in 0..3.
/// The analyzer additionally uses Second(0,0) internally for the
/// formal d_t d_t symbol that arises while matching null-form bases;
/// that variant is never accepted in a system spec and never serialized.
enum class DerivKind : std::uint8_t { None = 0, First = 1, Second = 2 };

struct VarRef {
    int component = 1; // 1-based
    DerivKind kind = DerivKind::None;
    int k = 0; // Second only: leading slot
    int a = 0; // First/Second: trailing slot

    static VarRef plain(int comp) { return {comp, DerivKind::None, 0, 0}; }
    static VarRef first(int comp, int a) { return {comp, DerivKind::First, 0, a}; }

    /// Canonicalized second derivative d_p d_q (unordered in p, q).
    /// Spatial pair is stored sorted; a mixed pair is stored spatial-first;
    /// (0,0) is the internal time-time symbol.
    static VarRef second(int comp, int p, int q) {
        VarRef v{comp, DerivKind::Second, 0, 0};
        if (p == 0 && q == 0) return v;
        if (p == 0) { v.k = q; v.a = 0; }
        else if (q == 0) { v.k = p; v.a = 0; }
        else { v.k = std::min(p, q); v.a = std::max(p, q); }
        return v;
    }

    bool is_time_time() const { return kind == DerivKind::Second && k == 0; }

    /// Total derivative order (0, 1, or 2).
    int order() const { return static_cast<int>(kind); }

    auto tie() const { return std::make_tuple(component, static_cast<int>(kind), k, a); }
    bool operator==(const VarRef& o) const { return tie() == o.tie(); }
    bool operator<(const VarRef& o) const { return tie() < o.tie(); }

    std::string str() const {
        switch (kind) {
            case DerivKind::None: return "u" + std::to_string(component);
            case DerivKind::First: return "d" + std::to_string(a) + " u" + std::to_string(component);
            default: return "d" + std::to_string(k) + " d" + std::to_string(a) + " u" + std::to_string(component);
        }
    }
};

} // namespace wkg

#endif
