#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace simpcert {

// Result of a left-to-right scan for a zero of g on (lo, hi). Samples sit at
// lo + i*(hi-lo)/(n+1), i = 1..n, so the endpoints are excluded by one grid
// cell. Events are reported leftmost-first: a sample with |g| <= zero_tol
// counts as a direct hit; otherwise a sign change between consecutive
// samples yields a bracket.
struct ScanResult {
    enum class Kind { Bracket, PointHit, AllBelowTol, NoSignChange };
    Kind kind = Kind::NoSignChange;
    double lo = 0.0;        // bracket left end, or the hit point
    double hi = 0.0;        // bracket right end
    double min_value = 0.0; // sampled min/max of g, for diagnostics
    double max_value = 0.0;
    double max_abs = 0.0;
};

template <class G>
ScanResult scan_leftmost_zero(G&& g, double lo, double hi, std::size_t samples,
                              double zero_tol) {
    const double step = (hi - lo) / static_cast<double>(samples + 1);
    std::vector<double> xs(samples), gs(samples);
    ScanResult r;
    r.min_value = std::numeric_limits<double>::infinity();
    r.max_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples; ++i) {
        xs[i] = lo + static_cast<double>(i + 1) * step;
        gs[i] = g(xs[i]);
        r.min_value = std::min(r.min_value, gs[i]);
        r.max_value = std::max(r.max_value, gs[i]);
        r.max_abs = std::max(r.max_abs, std::abs(gs[i]));
    }
    if (r.max_abs <= zero_tol) {
        r.kind = ScanResult::Kind::AllBelowTol;
        return r;
    }
    for (std::size_t i = 0; i < samples; ++i) {
        if (std::abs(gs[i]) <= zero_tol) {
            r.kind = ScanResult::Kind::PointHit;
            r.lo = r.hi = xs[i];
            return r;
        }
        if (i + 1 < samples && std::signbit(gs[i]) != std::signbit(gs[i + 1])) {
            r.kind = ScanResult::Kind::Bracket;
            r.lo = xs[i];
            r.hi = xs[i + 1];
            return r;
        }
    }
    r.kind = ScanResult::Kind::NoSignChange;
    return r;
}

// Bisection inside a bracket with a strict sign change. Runs the bracket
// down to a few ulps and returns the midpoint; unconditionally convergent.
template <class G>
double bisect(G&& g, double lo, double hi) {
    double glo = g(lo);
    if (glo == 0.0) return lo;
    const bool lo_neg = std::signbit(glo);
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval no longer splittable
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if (std::signbit(gm) == lo_neg)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace simpcert
