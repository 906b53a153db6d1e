#ifndef WKG_RATIONAL_HPP
#define WKG_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace wkg {

/// Exact rational scalar used by the symbolic layer. All analyzer verdicts
/// (null condition, divergence decomposition, partitions) are decided in
/// exact arithmetic; doubles appear only in the numerical solver.
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p", "-p" or "p/q" (q > 0 after normalization).
inline Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
        boost::multiprecision::cpp_int num(s.substr(0, slash));
        boost::multiprecision::cpp_int den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational: '" + s + "'");
    }
}

inline std::string rational_to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

} // namespace wkg

#endif
