#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "simpcert/config.hpp"
#include "simpcert/errors.hpp"
#include "simpcert/interval.hpp"
#include "simpcert/polynomial.hpp"

namespace simpcert {

namespace detail {

// Neumaier compensated accumulator: panel sums stay reproducible and nearly
// error-free at high panel counts.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

// One Simpson panel; every rule in this header funnels through this exact
// expression, so a one-panel composite is bit-identical to the single rule.
inline double simpson_panel(double fa, double fc, double fb, double width) {
    return width * (fa + 4.0 * fc + fb) / 6.0;
}

} // namespace detail

enum class RefMethod { ExactPolynomial, Extrapolated, UserSupplied };

inline const char* to_cstring(RefMethod m) {
    switch (m) {
        case RefMethod::ExactPolynomial: return "exact-polynomial";
        case RefMethod::Extrapolated: return "extrapolated";
        default: return "user-supplied";
    }
}

// High-accuracy value of the integral, used as ground truth when measuring
// the rule's error.
struct ReferenceIntegral {
    double value = 0.0;
    RefMethod method = RefMethod::UserSupplied;
    double est_accuracy = 0.0;
};

struct SimpsonResult {
    double approx = 0.0;     // composite Simpson value
    double reference = 0.0;  // high-accuracy integral
    double error_E = 0.0;    // reference - approx
    int panels = 1;
    std::optional<double> a_priori_bound;
};

// (b-a)/6 * (f(a) + 4 f(c) + f(b)).
template <class F>
double simpson_single(F&& f, const Interval& iv) {
    return detail::simpson_panel(f(iv.a()), f(iv.midpoint()), f(iv.b()), iv.width());
}

// Composite rule over `panels` equal panels. Shared panel endpoints are
// evaluated once (2*panels + 1 evaluations in total) and panel sums are
// accumulated with compensation.
template <class F>
double simpson_composite(F&& f, const Interval& iv, int panels) {
    if (panels < 1) throw NumericError("simpson_composite: panels must be >= 1");
    const double a = iv.a(), b = iv.b();
    const double h = iv.width() / static_cast<double>(panels);
    detail::CompensatedSum acc;
    double x_left = a;
    double f_left = f(a);
    for (int i = 0; i < panels; ++i) {
        const double x_right = (i + 1 == panels) ? b : a + static_cast<double>(i + 1) * h;
        const double x_mid = 0.5 * (x_left + x_right);
        const double f_mid = f(x_mid);
        const double f_right = f(x_right);
        acc.add(detail::simpson_panel(f_left, f_mid, f_right, x_right - x_left));
        x_left = x_right;
        f_left = f_right;
    }
    return acc.value();
}

// Error of the composite rule against a reference integral. E is always
// computed as reference minus approximation, never from an error formula.
template <class F>
SimpsonResult true_error(F&& f, const Interval& iv, int panels, const ReferenceIntegral& ref) {
    SimpsonResult r;
    r.approx = simpson_composite(f, iv, panels);
    r.reference = ref.value;
    r.error_E = ref.value - r.approx;
    r.panels = panels;
    return r;
}

// |E| <= M4 (b-a)^5 / (2880 n^4) for any f with |f''''| <= M4.
inline double a_priori_bound(double M4, const Interval& iv, int panels) {
    if (M4 < 0.0) throw NumericError("a_priori_bound: M4 must be >= 0");
    if (panels < 1) throw NumericError("a_priori_bound: panels must be >= 1");
    const double w = iv.width();
    const double w5 = w * w * w * w * w;
    const double n = static_cast<double>(panels);
    const double n4 = n * n * n * n;
    return M4 * w5 / (2880.0 * n4);
}

// Richardson extrapolation of the composite rule itself: panel counts double
// per row, each extrapolation column removes the next even-order error term
// (divisors 15, 63, 255, ...). Converges when two successive diagonal values
// agree to target_acc * (1 + |value|); exhausting the panel budget is an
// explicit failure, never a silent result.
template <class F>
ReferenceIntegral reference_integral(F&& f, const Interval& iv, double target_acc,
                                     const Config& cfg = Config{}) {
    if (!(target_acc > 0.0)) throw NumericError("reference_integral: target_acc must be > 0");
    if (cfg.max_panel_exponent < 1 || cfg.max_panel_exponent > 30)
        throw NumericError("reference_integral: max_panel_exponent must be in [1, 30]");
    std::vector<std::vector<double>> table;
    int panels = 1;
    for (int level = 0; level <= cfg.max_panel_exponent; ++level) {
        std::vector<double> row(static_cast<std::size_t>(level) + 1);
        row[0] = simpson_composite(f, iv, panels);
        double factor = 1.0;
        for (int j = 1; j <= level; ++j) {
            factor *= 4.0;
            const double divisor = 4.0 * factor - 1.0;  // 4^(j+1) - 1
            row[j] = row[j - 1] + (row[j - 1] - table[level - 1][j - 1]) / divisor;
        }
        if (level >= 1) {
            const double diff = std::abs(row[level] - table[level - 1][level - 1]);
            if (diff <= target_acc * (1.0 + std::abs(row[level])))
                return {row[level], RefMethod::Extrapolated, diff};
        }
        table.push_back(std::move(row));
        if (panels > (1 << (cfg.max_panel_exponent - 1))) break;
        panels *= 2;
    }
    throw NumericError(
        "reference_integral: extrapolation did not reach the requested accuracy within " +
        std::to_string(1 << cfg.max_panel_exponent) + " panels");
}

// Exact path for polynomial integrands: the antiderivative difference, no
// quadrature at all. Serves as the independent route the extrapolated path
// is cross-checked against.
inline ReferenceIntegral reference_integral(const Polynomial<double>& poly,
                                            const Interval& iv) {
    return {integrate_poly(poly, iv.a(), iv.b()), RefMethod::ExactPolynomial, 0.0};
}

namespace detail {

template <class F>
struct AdaptiveState {
    F& f;
    double tol;
    int max_depth;
    CompensatedSum plain;      // sum of accepted leaf panel values
    CompensatedSum corrected;  // leaf values plus the 1/15 Richardson term
    int leaf_panels = 0;

    void recurse(double a, double b, double fa, double fc, double fb, double whole,
                 double local_tol, int depth) {
        const double c = 0.5 * (a + b);
        const double lc = 0.5 * (a + c);
        const double rc = 0.5 * (c + b);
        const double flc = f(lc);
        const double frc = f(rc);
        const double left = simpson_panel(fa, flc, fc, c - a);
        const double right = simpson_panel(fc, frc, fb, b - c);
        // Accepting at the plain local budget (not the classic 15x) keeps
        // the uncorrected sum itself within tol; the /15 correction then
        // only sharpens the reference estimate.
        const double diff = left + right - whole;
        if (std::abs(diff) <= local_tol) {
            plain.add(left);
            plain.add(right);
            corrected.add(left);
            corrected.add(right);
            corrected.add(diff / 15.0);
            leaf_panels += 2;
            return;
        }
        if (depth >= max_depth)
            throw NumericError("adaptive_simpson: recursion depth cap (" +
                               std::to_string(max_depth) + ") exceeded on subinterval [" +
                               std::to_string(a) + ", " + std::to_string(b) + "]");
        recurse(a, c, fa, flc, fc, left, 0.5 * local_tol, depth + 1);
        recurse(c, b, fc, frc, fb, right, 0.5 * local_tol, depth + 1);
    }
};

} // namespace detail

// Recursive bisection with the classic (S_fine - S_coarse)/15 correction as
// error estimate. `approx` is the plain composite value over the final leaf
// mesh, `reference` the corrected estimate, `panels` the leaf count. The
// estimate is a heuristic; tests cross-check it against reference_integral.
template <class F>
SimpsonResult adaptive_simpson(F&& f, const Interval& iv, double tol,
                               const Config& cfg = Config{}) {
    if (!(tol > 0.0)) throw NumericError("adaptive_simpson: tol must be > 0");
    const double a = iv.a(), b = iv.b(), c = iv.midpoint();
    const double fa = f(a), fc = f(c), fb = f(b);
    const double whole = detail::simpson_panel(fa, fc, fb, iv.width());
    detail::AdaptiveState<F> state{f, tol, cfg.adaptive_max_depth, {}, {}, 0};
    state.recurse(a, b, fa, fc, fb, whole, tol, 0);
    SimpsonResult r;
    r.approx = state.plain.value();
    r.reference = state.corrected.value();
    r.error_E = r.reference - r.approx;
    r.panels = state.leaf_panels;
    return r;
}

} // namespace simpcert
