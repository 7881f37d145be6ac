#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "simpcert/config.hpp"
#include "simpcert/errors.hpp"
#include "simpcert/expr.hpp"
#include "simpcert/interval.hpp"
#include "simpcert/polynomial.hpp"
#include "simpcert/quadrature.hpp"
#include "simpcert/rootscan.hpp"

namespace simpcert {

// A mean-value point for the quadrature error: xi in (a,b) with
// f''''(xi) == target, where target = 24 E / int_a^b x p(x) dx. `residual`
// is |f''''(xi) - target| re-evaluated at the returned point. `degenerate`
// marks the case where the identity holds everywhere sampled (constant
// f''''); by convention xi is then the midpoint.
struct ErrorCertificate {
    double xi;
    double target;
    double residual;
    Interval interval;
    bool degenerate;
};

struct SingleCertification {
    ErrorCertificate certificate;
    SimpsonResult quadrature;
};

// Per-panel certificates plus one global mean-value point against the mean
// of the panel targets (the intermediate-value step of the composite error
// formula).
struct CompositeCertificate {
    std::vector<ErrorCertificate> per_panel;
    ErrorCertificate global;

    double global_xi() const { return global.xi; }
    double mean_target() const { return global.target; }
};

struct CompositeCertification {
    CompositeCertificate certificate;
    SimpsonResult quadrature;
};

// The fourth-derivative value the error E demands: 4! E / int_a^b x p dx.
// Cross-checked against the closed form -2880 E / (b-a)^5; the denominator
// int x p = -(b-a)^5/120 is never zero for a valid interval.
inline double xi_target(double E, const Interval& iv) {
    const Polynomial<double> xp = Polynomial<double>::variable() * node_polynomial(iv);
    const double denom = integrate_poly(xp, iv.a(), iv.b());
    const double via_poly = 24.0 * E / denom;
    const double w = iv.width();
    const double via_closed = -2880.0 * E / (w * w * w * w * w);
    const double scale = std::max({std::abs(via_poly), std::abs(via_closed), 1e-300});
    if (std::abs(via_poly - via_closed) > 1e-12 * scale)
        throw NumericError("xi_target: 4!E/int(xp) and -2880E/(b-a)^5 disagree: " +
                           std::to_string(via_poly) + " vs " + std::to_string(via_closed));
    return via_poly;
}

// Locate xi with f4(xi) == target: uniform scan over interior samples for a
// direct hit or a sign change of f4 - target, then bisection. Ties break to
// the leftmost qualifying point; a degenerate (constant-f4) certificate uses
// the midpoint. No bracket at all means E is inconsistent with f, usually a
// bad reference integral, and is an explicit failure.
template <class F4>
ErrorCertificate find_xi(F4&& f4, double target, const Interval& iv, double tol,
                         const Config& cfg = Config{}) {
    if (!(tol > 0.0)) throw NumericError("find_xi: tol must be > 0");
    const double zero_tol = tol * (1.0 + std::abs(target));
    auto g = [&](double x) { return f4(x) - target; };
    const ScanResult scan =
        scan_leftmost_zero(g, iv.a(), iv.b(), cfg.xi_grid_samples, zero_tol);

    ErrorCertificate cert{iv.midpoint(), target, 0.0, iv, false};
    switch (scan.kind) {
        case ScanResult::Kind::AllBelowTol:
            cert.degenerate = true;
            cert.xi = iv.midpoint();
            break;
        case ScanResult::Kind::PointHit:
            cert.xi = scan.lo;
            break;
        case ScanResult::Kind::Bracket:
            cert.xi = bisect(g, scan.lo, scan.hi);
            break;
        case ScanResult::Kind::NoSignChange:
        default:
            throw NumericError(
                "find_xi: no point with f'''' == target in (" + std::to_string(iv.a()) +
                ", " + std::to_string(iv.b()) + "); target " + std::to_string(target) +
                ", sampled f'''' range [" + std::to_string(scan.min_value + target) + ", " +
                std::to_string(scan.max_value + target) +
                "] (E inconsistent with f? check the reference integral)");
    }
    cert.residual = std::abs(f4(cert.xi) - target);
    return cert;
}

namespace detail {

// Reference integral for an expression: the exact antiderivative when the
// expression is a recognizable polynomial, Richardson extrapolation
// otherwise.
inline ReferenceIntegral expr_reference(const Expr& e, const Interval& iv,
                                        const Config& cfg) {
    if (auto poly = to_polynomial(e)) return reference_integral(*poly, iv);
    auto f = [&](double x) { return eval(e, x); };
    return reference_integral(f, iv, cfg.reference_acc, cfg);
}

template <class Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const NumericError& err) {
        throw NumericError(std::string(name) + ": " + err.what());
    }
}

} // namespace detail

// Full single-panel pipeline: reference integral, true error, target,
// mean-value point.
inline SingleCertification certify_single(const Expr& e, const Interval& iv, double tol,
                                          const Config& cfg = Config{}) {
    const ReferenceIntegral ref =
        detail::stage("reference", [&] { return detail::expr_reference(e, iv, cfg); });
    auto f = [&](double x) { return eval(e, x); };
    SimpsonResult quad =
        detail::stage("true-error", [&] { return true_error(f, iv, 1, ref); });
    const double target = detail::stage("xi-target", [&] { return xi_target(quad.error_E, iv); });
    auto f4 = [&](double x) { return eval_jet4(e, x).v4; };
    ErrorCertificate cert =
        detail::stage("find-xi", [&] { return find_xi(f4, target, iv, tol, cfg); });
    return {cert, quad};
}

// Composite certification: one certificate per panel, then one global
// mean-value point against the equal-width mean of the panel targets.
inline CompositeCertification certify_composite(const Expr& e, const Interval& iv, int panels,
                                                double tol, const Config& cfg = Config{}) {
    if (panels < 1) throw NumericError("certify_composite: panels must be >= 1");
    auto f = [&](double x) { return eval(e, x); };
    auto f4 = [&](double x) { return eval_jet4(e, x).v4; };

    const double a = iv.a(), b = iv.b();
    const double h = iv.width() / static_cast<double>(panels);

    CompositeCertification out{
        CompositeCertificate{{}, ErrorCertificate{iv.midpoint(), 0.0, 0.0, iv, false}},
        SimpsonResult{}};
    out.certificate.per_panel.reserve(static_cast<std::size_t>(panels));

    double target_sum = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = (i == 0) ? a : a + static_cast<double>(i) * h;
        const double hi = (i + 1 == panels) ? b : a + static_cast<double>(i + 1) * h;
        const Interval panel_iv(lo, hi);
        const std::string label = "panel " + std::to_string(i + 1);
        const ReferenceIntegral ref = detail::stage(
            label.c_str(), [&] { return detail::expr_reference(e, panel_iv, cfg); });
        const SimpsonResult panel_quad = true_error(f, panel_iv, 1, ref);
        const double target = xi_target(panel_quad.error_E, panel_iv);
        target_sum += target;
        out.certificate.per_panel.push_back(detail::stage(
            label.c_str(), [&] { return find_xi(f4, target, panel_iv, tol, cfg); }));
    }

    const double mean_target = target_sum / static_cast<double>(panels);
    out.certificate.global = detail::stage(
        "global", [&] { return find_xi(f4, mean_target, iv, tol, cfg); });

    const ReferenceIntegral ref =
        detail::stage("reference", [&] { return detail::expr_reference(e, iv, cfg); });
    out.quadrature = true_error(f, iv, panels, ref);
    return out;
}

} // namespace simpcert
