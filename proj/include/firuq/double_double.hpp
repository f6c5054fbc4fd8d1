#pragma once

// Unevaluated-sum (hi + lo) arithmetic built from error-free transformations.
// Everything here uses Dekker splitting rather than fma so results are the same
// on hardware with and without fused multiply-add.

#include <cmath>

namespace firuq {

namespace eft {

// s + e == a + b exactly
inline void two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    const double bb = s - a;
    e = (a - (s - bb)) + (b - bb);
}

// requires |a| >= |b|
inline void fast_two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    e = b - (s - a);
}

inline void split(double a, double& hi, double& lo) {
    constexpr double splitter = 134217729.0;  // 2^27 + 1
    const double t = splitter * a;
    hi = t - (t - a);
    lo = a - hi;
}

// p + e == a * b exactly (barring overflow/underflow)
inline void two_prod(double a, double b, double& p, double& e) {
    p = a * b;
    double ah, al, bh, bl;
    split(a, ah, al);
    split(b, bh, bl);
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
}

}  // namespace eft

/// About 106 bits of significand carried as a normalized pair.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DoubleDouble() = default;
    constexpr DoubleDouble(double h) : hi(h), lo(0.0) {}  // NOLINT(google-explicit-constructor)
    constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

    [[nodiscard]] constexpr double to_double() const { return hi + lo; }
    [[nodiscard]] constexpr bool is_zero() const { return hi == 0.0 && lo == 0.0; }
    [[nodiscard]] constexpr DoubleDouble operator-() const { return {-hi, -lo}; }
};

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
    double s, e, t, f;
    eft::two_sum(a.hi, b.hi, s, e);
    eft::two_sum(a.lo, b.lo, t, f);
    e += t;
    eft::fast_two_sum(s, e, s, e);
    e += f;
    eft::fast_two_sum(s, e, s, e);
    return {s, e};
}

inline DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }

inline DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
    double p, e;
    eft::two_prod(a.hi, b.hi, p, e);
    e += a.hi * b.lo + a.lo * b.hi;
    eft::fast_two_sum(p, e, p, e);
    return {p, e};
}

inline DoubleDouble& operator+=(DoubleDouble& a, DoubleDouble b) { return a = a + b; }
inline DoubleDouble& operator*=(DoubleDouble& a, DoubleDouble b) { return a = a * b; }

/// Exact comparison on the represented value (both operands normalized).
inline bool operator<(DoubleDouble a, DoubleDouble b) {
    return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator==(DoubleDouble a, DoubleDouble b) { return a.hi == b.hi && a.lo == b.lo; }

/// x^n by binary powering; n == 0 gives 1 (including 0^0).
inline DoubleDouble pow(DoubleDouble x, unsigned n) {
    DoubleDouble result{1.0};
    while (n != 0) {
        if (n & 1u) result *= x;
        n >>= 1u;
        if (n != 0) x *= x;
    }
    return result;
}

inline DoubleDouble abs(DoubleDouble x) { return x.hi < 0.0 ? -x : x; }

}  // namespace firuq
