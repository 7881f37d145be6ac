#pragma once

#include <cmath>

namespace simpcert {

// Value and first four derivatives of a function at a point, propagated
// through arithmetic (truncated Taylor arithmetic of order 4).
//
// Convention: components are plain derivative values f, f', f'', f''', f''''
// -- NOT Taylor coefficients, i.e. no 1/k! scaling. The value component of
// every operation is computed with exactly the arithmetic a scalar evaluation
// would use, so v0 stays bit-identical to a plain double evaluation.
//
// Domain preconditions (enforced by the expression evaluator, not here):
// division requires a nonzero denominator value, log/sqrt a positive value.
struct Jet4 {
    double v0 = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
    double v3 = 0.0;
    double v4 = 0.0;

    Jet4() = default;
    // A constant: value c, all derivatives zero.
    explicit Jet4(double c) : v0(c) {}
    Jet4(double a0, double a1, double a2, double a3, double a4)
        : v0(a0), v1(a1), v2(a2), v3(a3), v4(a4) {}

    static Jet4 constant(double c) { return Jet4(c); }
    // The identity function at x: value x, first derivative 1.
    static Jet4 variable(double x) { return Jet4(x, 1.0, 0.0, 0.0, 0.0); }

    double deriv(int order) const {
        switch (order) {
            case 0: return v0;
            case 1: return v1;
            case 2: return v2;
            case 3: return v3;
            default: return v4;
        }
    }
};

inline Jet4 operator-(const Jet4& u) { return {-u.v0, -u.v1, -u.v2, -u.v3, -u.v4}; }

inline Jet4 operator+(const Jet4& u, const Jet4& w) {
    return {u.v0 + w.v0, u.v1 + w.v1, u.v2 + w.v2, u.v3 + w.v3, u.v4 + w.v4};
}

inline Jet4 operator-(const Jet4& u, const Jet4& w) {
    return {u.v0 - w.v0, u.v1 - w.v1, u.v2 - w.v2, u.v3 - w.v3, u.v4 - w.v4};
}

// Leibniz rule with binomial weights 1,4,6,4,1.
inline Jet4 operator*(const Jet4& u, const Jet4& w) {
    return {u.v0 * w.v0,
            u.v1 * w.v0 + u.v0 * w.v1,
            u.v2 * w.v0 + 2.0 * u.v1 * w.v1 + u.v0 * w.v2,
            u.v3 * w.v0 + 3.0 * u.v2 * w.v1 + 3.0 * u.v1 * w.v2 + u.v0 * w.v3,
            u.v4 * w.v0 + 4.0 * u.v3 * w.v1 + 6.0 * u.v2 * w.v2 + 4.0 * u.v1 * w.v3 +
                u.v0 * w.v4};
}

// Quotient rule, solved from u = (u/w) * w level by level. The value entry is
// the plain quotient u.v0 / w.v0.
inline Jet4 operator/(const Jet4& u, const Jet4& w) {
    Jet4 q;
    q.v0 = u.v0 / w.v0;
    q.v1 = (u.v1 - q.v0 * w.v1) / w.v0;
    q.v2 = (u.v2 - q.v0 * w.v2 - 2.0 * q.v1 * w.v1) / w.v0;
    q.v3 = (u.v3 - q.v0 * w.v3 - 3.0 * q.v1 * w.v2 - 3.0 * q.v2 * w.v1) / w.v0;
    q.v4 = (u.v4 - q.v0 * w.v4 - 4.0 * q.v1 * w.v3 - 6.0 * q.v2 * w.v2 - 4.0 * q.v3 * w.v1) /
           w.v0;
    return q;
}

inline Jet4 operator+(const Jet4& u, double s) { return {u.v0 + s, u.v1, u.v2, u.v3, u.v4}; }
inline Jet4 operator+(double s, const Jet4& u) { return {s + u.v0, u.v1, u.v2, u.v3, u.v4}; }
inline Jet4 operator-(const Jet4& u, double s) { return {u.v0 - s, u.v1, u.v2, u.v3, u.v4}; }
inline Jet4 operator-(double s, const Jet4& u) {
    return {s - u.v0, -u.v1, -u.v2, -u.v3, -u.v4};
}
inline Jet4 operator*(const Jet4& u, double s) {
    return {u.v0 * s, u.v1 * s, u.v2 * s, u.v3 * s, u.v4 * s};
}
inline Jet4 operator*(double s, const Jet4& u) {
    return {s * u.v0, s * u.v1, s * u.v2, s * u.v3, s * u.v4};
}
inline Jet4 operator/(const Jet4& u, double s) {
    return {u.v0 / s, u.v1 / s, u.v2 / s, u.v3 / s, u.v4 / s};
}
inline Jet4 operator/(double s, const Jet4& u) { return Jet4(s) / u; }

namespace detail {

// Chain rule to order 4 (Faa di Bruno): g = F(u) given the outer derivatives
// F, F', F'', F''', F'''' evaluated at u.v0.
//   g'    = F' u'
//   g''   = F'' u'^2 + F' u''
//   g'''  = F''' u'^3 + 3 F'' u' u'' + F' u'''
//   g'''' = F'''' u'^4 + 6 F''' u'^2 u'' + F'' (4 u' u''' + 3 u''^2) + F' u''''
inline Jet4 compose(double f0, double f1, double f2, double f3, double f4, const Jet4& u) {
    const double u1 = u.v1, u2 = u.v2, u3 = u.v3, u4 = u.v4;
    const double u1s = u1 * u1;
    Jet4 g;
    g.v0 = f0;
    g.v1 = f1 * u1;
    g.v2 = f2 * u1s + f1 * u2;
    g.v3 = f3 * u1s * u1 + 3.0 * f2 * u1 * u2 + f1 * u3;
    g.v4 = f4 * u1s * u1s + 6.0 * f3 * u1s * u2 + f2 * (4.0 * u1 * u3 + 3.0 * u2 * u2) +
           f1 * u4;
    return g;
}

} // namespace detail

inline Jet4 sin(const Jet4& u) {
    const double s = std::sin(u.v0), c = std::cos(u.v0);
    return detail::compose(s, c, -s, -c, s, u);
}

inline Jet4 cos(const Jet4& u) {
    const double s = std::sin(u.v0), c = std::cos(u.v0);
    return detail::compose(c, -s, -c, s, c, u);
}

inline Jet4 exp(const Jet4& u) {
    const double e = std::exp(u.v0);
    return detail::compose(e, e, e, e, e, u);
}

inline Jet4 log(const Jet4& u) {
    const double inv = 1.0 / u.v0;
    const double inv2 = inv * inv;
    return detail::compose(std::log(u.v0), inv, -inv2, 2.0 * inv2 * inv, -6.0 * inv2 * inv2,
                           u);
}

inline Jet4 sqrt(const Jet4& u) {
    // Outer derivatives of x^(1/2): (1/2)x^(-1/2), -(1/4)x^(-3/2),
    // (3/8)x^(-5/2), -(15/16)x^(-7/2).
    const double s = std::sqrt(u.v0);
    const double inv = 1.0 / u.v0;
    return detail::compose(s, 0.5 / s, -0.25 / (s * u.v0), 0.375 * inv * inv / s,
                           -0.9375 * inv * inv * inv / s, u);
}

} // namespace simpcert
