#ifndef WKG_WEIGHTS_HPP
#define WKG_WEIGHTS_HPP

#include <algorithm>
#include <cmath>

namespace wkg {

/// Japanese bracket <z> = sqrt(1 + z^2).
inline double jb(double z) { return std::sqrt(1.0 + z * z); }

/// Decay weight used in the weighted sup-norm estimates for waves:
///   rho < 0 : <t+r>^rho
///   rho = 0 : 1 / log(2 + <t+r>/<t-r>)
///   rho > 0 : <t-r>^rho
inline double weight_W(double rho, double t, double r) {
    if (rho < 0) return std::pow(jb(t + r), rho);
    if (rho > 0) return std::pow(jb(t - r), rho);
    return 1.0 / std::log(2.0 + jb(t + r) / jb(t - r));
}

/// Weak weight W_-(t, r) = min(<r>, <t-r>).
inline double weight_Wminus(double t, double r) { return std::min(jb(r), jb(t - r)); }

/// Sharp constant in <t+r> <= C <x> <t-r> / W_-(t,r)^{-1} ... stated as
///   <x>^{-1} <t-r>^{-1} <= C <t+r>^{-1} W_-(t,r)^{-1},
/// i.e. <t+r> W_-(t,r) <= C <r> <t-r>. The constant 3 is sharp: along t = 2r,
/// r -> infinity the ratio tends to 3 (and <t+r> <= 3 <t-r> when r <= |t-r|,
/// <t+r> <= 3 <r> when |t-r| <= r, for t, r >= 0).
inline constexpr double weight_comparison_constant = 3.0;

} // namespace wkg

#endif
