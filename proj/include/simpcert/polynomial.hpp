#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "simpcert/interval.hpp"

namespace simpcert {

namespace detail {

// Accumulator type used inside definite integration. Doubles go through
// long double: the antiderivative difference of a node polynomial cancels
// almost completely and plain double accumulation loses too many digits to
// honor the error-term identities. Exact scalars accumulate as themselves.
template <class T>
struct WideAccum {
    using type = T;
};
template <>
struct WideAccum<double> {
    using type = long double;
};

} // namespace detail

// Dense real-coefficient polynomial, coeffs[i] multiplying x^i. Normalized
// form has a nonzero trailing coefficient; the zero polynomial is the single
// coefficient {0}. Immutable in practice: every operation returns a new value.
//
// T is double for the default path or Rational for the exact path.
template <class T>
class Polynomial {
public:
    Polynomial() : coeffs_{T(0)} {}

    explicit Polynomial(std::vector<T> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_.push_back(T(0));
        normalize();
    }

    static Polynomial constant(T c) { return Polynomial(std::vector<T>{std::move(c)}); }

    // The monomial x.
    static Polynomial variable() { return Polynomial(std::vector<T>{T(0), T(1)}); }

    const std::vector<T>& coefficients() const noexcept { return coeffs_; }

    // Highest stored index; 0 for constants and for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }

    bool is_zero() const noexcept { return coeffs_.size() == 1 && coeffs_[0] == T(0); }

    T coefficient(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : T(0); }

    // Horner evaluation.
    T operator()(const T& x) const {
        T acc = coeffs_.back();
        for (std::size_t i = coeffs_.size(); i-- > 1;) acc = acc * x + coeffs_[i - 1];
        return acc;
    }

    Polynomial operator-() const {
        std::vector<T> c = coeffs_;
        for (T& v : c) v = -v;
        return Polynomial(std::move(c));
    }

    friend Polynomial operator+(const Polynomial& p, const Polynomial& q) {
        std::vector<T> c(std::max(p.coeffs_.size(), q.coeffs_.size()), T(0));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = p.coefficient(i) + q.coefficient(i);
        return Polynomial(std::move(c));
    }

    friend Polynomial operator-(const Polynomial& p, const Polynomial& q) {
        std::vector<T> c(std::max(p.coeffs_.size(), q.coeffs_.size()), T(0));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = p.coefficient(i) - q.coefficient(i);
        return Polynomial(std::move(c));
    }

    friend Polynomial operator*(const Polynomial& p, const Polynomial& q) {
        if (p.is_zero() || q.is_zero()) return Polynomial();
        std::vector<T> c(p.coeffs_.size() + q.coeffs_.size() - 1, T(0));
        for (std::size_t i = 0; i < p.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < q.coeffs_.size(); ++j)
                c[i + j] += p.coeffs_[i] * q.coeffs_[j];
        return Polynomial(std::move(c));
    }

    friend Polynomial operator*(const Polynomial& p, const T& s) {
        std::vector<T> c = p.coeffs_;
        for (T& v : c) v = v * s;
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(const T& s, const Polynomial& p) { return p * s; }

    bool operator==(const Polynomial& other) const { return coeffs_ == other.coeffs_; }
    bool operator!=(const Polynomial& other) const { return !(*this == other); }

    // Formal derivative.
    Polynomial derivative() const {
        if (coeffs_.size() == 1) return Polynomial();
        std::vector<T> c(coeffs_.size() - 1);
        for (std::size_t i = 1; i < coeffs_.size(); ++i) c[i - 1] = coeffs_[i] * T(static_cast<int>(i));
        return Polynomial(std::move(c));
    }

    // Antiderivative with zero constant term.
    Polynomial antiderivative() const {
        std::vector<T> c(coeffs_.size() + 1, T(0));
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            c[i + 1] = coeffs_[i] / T(static_cast<int>(i) + 1);
        return Polynomial(std::move(c));
    }

    // Definite integral over [lo, hi], via the antiderivative difference in
    // factored form:  (hi-lo) * sum_k c_k/(k+1) * sum_{j<=k} lo^j hi^{k-j}.
    T integrate(const T& lo, const T& hi) const {
        using W = typename detail::WideAccum<T>::type;
        const W wlo = static_cast<W>(lo);
        const W whi = static_cast<W>(hi);
        W acc = W(0);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            // power_sum = lo^0 hi^k + lo^1 hi^(k-1) + ... + lo^k hi^0
            W power_sum = W(0);
            W lo_pow = W(1);
            std::vector<W> hi_pows(k + 1);
            hi_pows[0] = W(1);
            for (std::size_t j = 1; j <= k; ++j) hi_pows[j] = hi_pows[j - 1] * whi;
            for (std::size_t j = 0; j <= k; ++j) {
                power_sum += lo_pow * hi_pows[k - j];
                lo_pow = lo_pow * wlo;
            }
            acc += static_cast<W>(coeffs_[k]) * power_sum / W(static_cast<int>(k) + 1);
        }
        return static_cast<T>((whi - wlo) * acc);
    }

private:
    void normalize() {
        while (coeffs_.size() > 1 && coeffs_.back() == T(0)) coeffs_.pop_back();
    }

    std::vector<T> coeffs_;
};

// (x - root) as a polynomial.
template <class T>
Polynomial<T> linear_factor(const T& root) {
    return Polynomial<T>(std::vector<T>{-root, T(1)});
}

// The node cubic p(x) = (x-a)(x-c)(x-b) with c the midpoint. Monic, vanishes
// at the three Simpson nodes, and is odd about c; its key identities are
// int_a^b p = 0 and int_a^b x p = -(b-a)^5/120.
template <class T>
Polynomial<T> node_polynomial(const T& a, const T& b) {
    const T c = (a + b) / T(2);
    return linear_factor(a) * linear_factor(c) * linear_factor(b);
}

namespace detail {

// Assembling in long double and rounding once gives coefficients correct to
// half an ulp, which the node-agreement and error-identity tolerances need.
inline Polynomial<double> round_coefficients(const Polynomial<long double>& p) {
    std::vector<double> c;
    c.reserve(p.coefficients().size());
    for (long double v : p.coefficients()) c.push_back(static_cast<double>(v));
    return Polynomial<double>(std::move(c));
}

} // namespace detail

inline Polynomial<double> node_polynomial(const Interval& iv) {
    return detail::round_coefficients(
        node_polynomial<long double>(iv.a(), iv.b()));
}

// Quadratic through (a,fa), (c,fc), (b,fb) with c the midpoint, assembled in
// the Lagrange basis (closed form, no linear solve).
template <class T>
Polynomial<T> interpolate_quadratic(const T& a, const T& b, const T& fa, const T& fc,
                                    const T& fb) {
    const T c = (a + b) / T(2);
    const Polynomial<T> la = linear_factor(c) * linear_factor(b);
    const Polynomial<T> lc = linear_factor(a) * linear_factor(b);
    const Polynomial<T> lb = linear_factor(a) * linear_factor(c);
    return la * (fa / ((a - c) * (a - b))) + lc * (fc / ((c - a) * (c - b))) +
           lb * (fb / ((b - a) * (b - c)));
}

inline Polynomial<double> interpolate_quadratic(const Interval& iv, double fa, double fc,
                                                double fb) {
    return detail::round_coefficients(
        interpolate_quadratic<long double>(iv.a(), iv.b(), fa, fc, fb));
}

template <class T>
T integrate_poly(const Polynomial<T>& poly, const T& lo, const T& hi) {
    return poly.integrate(lo, hi);
}

template <class T>
Polynomial<T> differentiate_poly(const Polynomial<T>& poly, int order = 1) {
    Polynomial<T> result = poly;
    for (int i = 0; i < order; ++i) result = result.derivative();
    return result;
}

} // namespace simpcert
