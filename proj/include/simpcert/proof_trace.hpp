#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "simpcert/certificate.hpp"
#include "simpcert/config.hpp"
#include "simpcert/errors.hpp"
#include "simpcert/expr.hpp"
#include "simpcert/interval.hpp"
#include "simpcert/jet.hpp"
#include "simpcert/polynomial.hpp"
#include "simpcert/quadrature.hpp"
#include "simpcert/rootscan.hpp"

namespace simpcert {

// The auxiliary function
//
//   phi(x) = f(x) - q(x) - k p(x) - lambda x p(x),   lambda = E / int_a^b xp,
//
// with k chosen so that int_a^c phi = 0. It vanishes at a, c, b by
// interpolation, and its integral vanishes over [a,c], [c,b], [a,b], which
// forces two more zeros u, v and feeds the Rolle cascade. The polynomial part
// q + k p + lambda x p is differentiated formally; only f goes through jets.
struct PhiFunction {
    Expr f;
    Polynomial<double> q;
    Polynomial<double> p;
    double k = 0.0;
    double lambda = 0.0;
    Interval interval;

    std::array<Polynomial<double>, 5> poly_derivs;  // q + k p + lambda x p, orders 0..4
    std::optional<Polynomial<double>> phi_poly;     // exact phi when f is polynomial
    double node_scale = 1.0;                        // max |f| at the nodes, plus 1
    bool identically_zero = false;

    double value(double x) const { return eval(f, x) - poly_derivs[0](x); }

    Jet4 jet(double x) const {
        const Jet4 fj = eval_jet4(f, x);
        return fj - Jet4(poly_derivs[0](x), poly_derivs[1](x), poly_derivs[2](x),
                         poly_derivs[3](x), poly_derivs[4](x));
    }

    double derivative(int order, double x) const {
        if (order == 0) return value(x);
        return eval_jet4(f, x).deriv(order) - poly_derivs[static_cast<std::size_t>(order)](x);
    }
};

struct MeanValueZeros {
    double u = 0.0;
    double v = 0.0;
    bool u_degenerate = false;  // phi flat below tolerance, midpoint convention
    bool v_degenerate = false;
};

struct ProofTrace {
    Interval interval;
    double error_E = 0.0;
    double k = 0.0;
    double lambda = 0.0;
    double u = 0.0;
    double v = 0.0;
    std::array<double, 3> vanishing{0.0, 0.0, 0.0};   // int phi over [a,c], [c,b], [a,b]
    std::array<std::vector<double>, 4> rolle_levels;  // roots of phi^(1..4)
    double xi = 0.0;
    double final_residual = 0.0;
    bool phi_identically_zero = false;
    bool zeros_degenerate = false;
    std::array<bool, 4> level_degenerate{false, false, false, false};
};

namespace detail {

template <class Fn>
auto trace_stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const TraceError&) {
        throw;
    } catch (const NumericError& err) {
        throw TraceError(name, err.what());
    } catch (const DomainError& err) {
        throw TraceError(name, err.what());
    }
}

} // namespace detail

// Build phi for a given E. q comes from quadratic interpolation at the
// nodes, lambda = E / int_a^b xp, and k is the unique solution of
// int_a^c phi = 0:
//
//   k = ( int_a^c (f - q) - lambda int_a^c xp ) / int_a^c p.
//
// int_a^c (f - q) uses the exact antiderivative when f is a recognizable
// polynomial and the Richardson reference otherwise; the polynomial
// integrals are always exact. int_a^c p = (b-a)^4/64 > 0, so the division is
// well posed (guarded anyway).
inline PhiFunction build_phi(const Expr& e, const Interval& iv, double E,
                             const Config& cfg = Config{}) {
    const double a = iv.a(), b = iv.b(), c = iv.midpoint();
    const double fa = eval(e, a), fc = eval(e, c), fb = eval(e, b);

    PhiFunction phi{e,
                    interpolate_quadratic(iv, fa, fc, fb),
                    node_polynomial(iv),
                    0.0,
                    0.0,
                    iv,
                    {},
                    std::nullopt,
                    1.0,
                    false};

    const Polynomial<double> xp = Polynomial<double>::variable() * phi.p;
    phi.lambda = E / integrate_poly(xp, a, b);

    const std::optional<Polynomial<double>> f_poly = to_polynomial(e);
    double int_fq_ac;
    if (f_poly) {
        int_fq_ac = integrate_poly(*f_poly - phi.q, a, c);
    } else {
        auto fq = [&](double x) { return eval(e, x) - phi.q(x); };
        int_fq_ac = reference_integral(fq, Interval(a, c), cfg.reference_acc, cfg).value;
    }

    const double int_p_ac = integrate_poly(phi.p, a, c);
    const double w4 = iv.width() * iv.width() * iv.width() * iv.width();
    if (std::abs(int_p_ac) < w4 / 100.0)
        throw NumericError("build_phi: int_a^c p unexpectedly small (" +
                           std::to_string(int_p_ac) + "), expected (b-a)^4/64");
    const double int_xp_ac = integrate_poly(xp, a, c);
    phi.k = (int_fq_ac - phi.lambda * int_xp_ac) / int_p_ac;

    phi.poly_derivs[0] = phi.q + phi.k * phi.p + phi.lambda * xp;
    for (std::size_t m = 1; m < 5; ++m)
        phi.poly_derivs[m] = phi.poly_derivs[m - 1].derivative();
    if (f_poly) phi.phi_poly = *f_poly - phi.poly_derivs[0];

    phi.node_scale = 1.0 + std::max({std::abs(fa), std::abs(fc), std::abs(fb)});
    double max_abs = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double x = a + iv.width() * static_cast<double>(i) / 1000.0;
        max_abs = std::max(max_abs, std::abs(phi.value(x)));
    }
    phi.identically_zero = max_abs <= cfg.phi_zero_rel * phi.node_scale;
    return phi;
}

// Integrals of phi over [a,c], [c,b], [a,b]; all three should vanish by
// construction. Exact antiderivatives when phi is a polynomial, Richardson
// references otherwise.
inline std::array<double, 3> verify_vanishing(const PhiFunction& phi,
                                              const Config& cfg = Config{}) {
    const double a = phi.interval.a(), b = phi.interval.b(), c = phi.interval.midpoint();
    std::array<double, 3> out{};
    if (phi.phi_poly) {
        out[0] = integrate_poly(*phi.phi_poly, a, c);
        out[1] = integrate_poly(*phi.phi_poly, c, b);
        out[2] = integrate_poly(*phi.phi_poly, a, b);
        return out;
    }
    auto f = [&](double x) { return phi.value(x); };
    out[0] = reference_integral(f, Interval(a, c), cfg.reference_acc, cfg).value;
    out[1] = reference_integral(f, Interval(c, b), cfg.reference_acc, cfg).value;
    out[2] = reference_integral(f, Interval(a, b), cfg.reference_acc, cfg).value;
    return out;
}

// The two interior zeros u in (a,c) and v in (c,b) that the vanishing
// integrals force. Leftmost zero in each half; if phi is flat below
// tolerance on a half, the half midpoint is returned and flagged.
inline MeanValueZeros find_mean_value_zeros(const PhiFunction& phi,
                                            const Config& cfg = Config{}) {
    const double a = phi.interval.a(), b = phi.interval.b(), c = phi.interval.midpoint();
    MeanValueZeros out;
    if (phi.identically_zero) {
        out.u = 0.5 * (a + c);
        out.v = 0.5 * (c + b);
        out.u_degenerate = out.v_degenerate = true;
        return out;
    }
    const double zero_tol = cfg.phi_zero_rel * phi.node_scale;
    auto g = [&](double x) { return phi.value(x); };
    auto locate = [&](double lo, double hi, bool& degenerate) {
        const ScanResult scan = scan_leftmost_zero(g, lo, hi, cfg.half_zero_samples, zero_tol);
        switch (scan.kind) {
            case ScanResult::Kind::AllBelowTol:
                degenerate = true;
                return 0.5 * (lo + hi);
            case ScanResult::Kind::PointHit: return scan.lo;
            case ScanResult::Kind::Bracket: return bisect(g, scan.lo, scan.hi);
            case ScanResult::Kind::NoSignChange:
            default:
                throw TraceError("mean-value-zeros",
                                 "no interior zero of phi in (" + std::to_string(lo) + ", " +
                                     std::to_string(hi) + "); sampled phi range [" +
                                     std::to_string(scan.min_value) + ", " +
                                     std::to_string(scan.max_value) +
                                     "] contradicts the vanishing integral -- tolerance "
                                     "mis-set or E inconsistent");
        }
    };
    out.u = locate(a, c, out.u_degenerate);
    out.v = locate(c, b, out.v_degenerate);
    return out;
}

// Repeated Rolle: five zeros of phi give four of phi', three of phi'', two
// of phi''', one of phi''''. Each level scans every gap between consecutive
// roots of the previous level (endpoints excluded by one grid cell), so the
// returned roots strictly interlace by construction. The final root xi
// satisfies f''''(xi) == 24 lambda up to final_residual.
inline ProofTrace rolle_cascade(const PhiFunction& phi, const std::array<double, 5>& zeros,
                                const Config& cfg = Config{}) {
    for (std::size_t i = 0; i + 1 < zeros.size(); ++i)
        if (!(zeros[i] < zeros[i + 1]))
            throw TraceError("rolle-cascade", "the five zeros must be strictly increasing");

    ProofTrace trace{phi.interval, 0.0,   phi.k, phi.lambda, zeros[1], zeros[3],
                     {},           {},    0.0,   0.0,        phi.identically_zero,
                     false,        {}};

    std::vector<double> prev(zeros.begin(), zeros.end());
    for (int level = 1; level <= 4; ++level) {
        auto g = [&](double x) { return phi.derivative(level, x); };
        // Tolerance scale for "this derivative is zero here": global sample
        // of phi^(level), interior points only (derivatives may be
        // unbounded at the endpoints, e.g. sqrt on [0,1]).
        double scale = 0.0;
        if (!phi.identically_zero) {
            for (int i = 1; i < 512; ++i) {
                const double x = phi.interval.a() +
                                 phi.interval.width() * static_cast<double>(i) / 512.0;
                scale = std::max(scale, std::abs(g(x)));
            }
        }
        const double zero_tol = cfg.phi_zero_rel * (1.0 + scale);

        std::vector<double> roots;
        roots.reserve(prev.size() - 1);
        for (std::size_t gap = 0; gap + 1 < prev.size(); ++gap) {
            const double lo = prev[gap], hi = prev[gap + 1];
            if (phi.identically_zero) {
                roots.push_back(0.5 * (lo + hi));
                trace.level_degenerate[static_cast<std::size_t>(level - 1)] = true;
                continue;
            }
            const ScanResult scan = scan_leftmost_zero(g, lo, hi, cfg.gap_samples, zero_tol);
            switch (scan.kind) {
                case ScanResult::Kind::AllBelowTol:
                    roots.push_back(0.5 * (lo + hi));
                    trace.level_degenerate[static_cast<std::size_t>(level - 1)] = true;
                    break;
                case ScanResult::Kind::PointHit: roots.push_back(scan.lo); break;
                case ScanResult::Kind::Bracket:
                    roots.push_back(bisect(g, scan.lo, scan.hi));
                    break;
                case ScanResult::Kind::NoSignChange:
                default:
                    throw TraceError(
                        "rolle-cascade",
                        "level " + std::to_string(level) + ", gap [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + "]: no sign change of phi^(" +
                            std::to_string(level) +
                            ") (derivative noise? raise the gap sample count)");
            }
        }
        trace.rolle_levels[static_cast<std::size_t>(level - 1)] = roots;
        prev = std::move(roots);
    }

    trace.xi = trace.rolle_levels[3][0];
    const double target = 24.0 * phi.lambda;  // == 4! E / int_a^b xp
    trace.final_residual = std::abs(eval_jet4(phi.f, trace.xi).v4 - target);
    trace.zeros_degenerate = phi.identically_zero;
    return trace;
}

// Full pipeline: single-panel E, phi, vanishing integrals, interior zeros,
// cascade. Every stage failure is labeled with the stage name.
inline ProofTrace run_trace(const Expr& e, const Interval& iv, const Config& cfg = Config{}) {
    const ReferenceIntegral ref = detail::trace_stage(
        "reference", [&] { return detail::expr_reference(e, iv, cfg); });
    auto f = [&](double x) { return eval(e, x); };
    const SimpsonResult quad =
        detail::trace_stage("true-error", [&] { return true_error(f, iv, 1, ref); });

    const PhiFunction phi = detail::trace_stage(
        "build-phi", [&] { return build_phi(e, iv, quad.error_E, cfg); });

    const std::array<double, 3> vanishing =
        detail::trace_stage("verify-vanishing", [&] { return verify_vanishing(phi, cfg); });
    const double vanish_gate = 1e-8 * iv.width() * phi.node_scale;
    for (double r : vanishing)
        if (std::abs(r) > vanish_gate)
            throw TraceError("verify-vanishing",
                             "integral of phi did not vanish: residual " + std::to_string(r) +
                                 " exceeds gate " + std::to_string(vanish_gate));

    const MeanValueZeros zeros = detail::trace_stage(
        "mean-value-zeros", [&] { return find_mean_value_zeros(phi, cfg); });

    ProofTrace trace = detail::trace_stage("rolle-cascade", [&] {
        return rolle_cascade(
            phi, std::array<double, 5>{iv.a(), zeros.u, iv.midpoint(), zeros.v, iv.b()}, cfg);
    });
    trace.error_E = quad.error_E;
    trace.vanishing = vanishing;
    trace.zeros_degenerate = zeros.u_degenerate || zeros.v_degenerate;
    return trace;
}

} // namespace simpcert
