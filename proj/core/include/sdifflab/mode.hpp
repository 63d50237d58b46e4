#pragma once

#include <array>
#include <cassert>
#include <compare>
#include <cstdint>
#include <string>

#include "sdifflab/vec.hpp"

namespace sdifflab {

enum class Parity : uint8_t { cos = 0, sin = 1 };

inline const char* to_string(Parity p) { return p == Parity::cos ? "cos" : "sin"; }

/// One real trigonometric torus mode: integer wavevector k, cos/sin parity and,
/// for divergence-free basis elements, the polarization index j spanning k-perp.
///
/// Fields only ever store canonical wavevectors (first nonzero entry positive,
/// or k = 0 with cos parity); products and derivatives canonicalize on the fly.
struct Mode {
    std::array<int, 3> k{0, 0, 0};
    Parity parity = Parity::cos;
    int pol = 0;  // polarization j in {0,...,d-2}; 0 for scalar modes

    Mode() = default;
    Mode(std::array<int, 3> kk, Parity p, int j = 0) : k(kk), parity(p), pol(j) {}

    int norm2() const { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2]; }
    int norm_inf() const {
        int m = 0;
        for (int v : k) m = std::max(m, std::abs(v));
        return m;
    }
    bool is_zero() const { return k[0] == 0 && k[1] == 0 && k[2] == 0; }

    double phase(const Vec& theta) const {
        double s = 0.0;
        for (int i = 0; i < theta.dim; ++i) s += k[i] * theta[i];
        return s;
    }

    /// Lexicographic in (|k|^2, k, pol, parity); the serialization order.
    friend std::strong_ordering operator<=>(const Mode& a, const Mode& b) {
        if (auto c = a.norm2() <=> b.norm2(); c != 0) return c;
        if (auto c = a.k <=> b.k; c != 0) return c;
        if (auto c = a.pol <=> b.pol; c != 0) return c;
        return static_cast<int>(a.parity) <=> static_cast<int>(b.parity);
    }
    friend bool operator==(const Mode& a, const Mode& b) = default;
};

/// Sign of the canonical representative of +-k: +1 if k is already canonical,
/// -1 if -k is, 0 for k = 0.
inline int canonical_sign(const std::array<int, 3>& k) {
    for (int v : k) {
        if (v > 0) return 1;
        if (v < 0) return -1;
    }
    return 0;
}

inline std::array<int, 3> negated(const std::array<int, 3>& k) {
    return {-k[0], -k[1], -k[2]};
}

inline bool is_canonical(const Mode& m) {
    if (m.is_zero()) return m.parity == Parity::cos;
    return canonical_sign(m.k) > 0;
}

}  // namespace sdifflab
