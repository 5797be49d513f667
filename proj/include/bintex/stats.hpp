#pragma once

#include <cmath>
#include <span>

namespace bintex {

/// -sum p*log2(p), with 0*log2(0) := 0. Input is expected to be a normalized
/// distribution; result is in bits.
inline double shannon_entropy_bits(std::span<const double> dist) {
    double h = 0.0;
    for (double p : dist)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

inline double sum_of_squares(std::span<const double> dist) {
    double s = 0.0;
    for (double p : dist) s += p * p;
    return s;
}

} // namespace bintex
