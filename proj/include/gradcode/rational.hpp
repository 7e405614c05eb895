#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace gradcode {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& x) { return x.convert_to<double>(); }

/// Canonical "p/q" rendering: lowest terms, q > 0, integers as "n/1".
inline std::string rat_string(const Rat& x) {
    return numerator(x).str() + "/" + denominator(x).str();
}

}  // namespace gradcode
