#pragma once

#include <cstddef>

namespace simpcert {

// Tuning knobs shared by the certificate and proof-trace pipelines. All
// tolerances are relative scales; the consuming code multiplies them by the
// magnitude of whatever it compares (interval width, function size, target).
struct Config {
    // Richardson-extrapolated reference integrals stop when two successive
    // diagonal extrapolants agree to reference_acc * (1 + |value|).
    double reference_acc = 1e-13;
    // Panel budget for extrapolation: at most 2^max_panel_exponent panels.
    int max_panel_exponent = 20;
    // Adaptive Simpson recursion depth cap.
    int adaptive_max_depth = 50;
    // Certificate residual target: |f''''(xi) - target| <= tol*(1+|target|).
    double certificate_tol = 1e-10;
    // Grid sizes for the bracket scans.
    std::size_t xi_grid_samples = 1024;    // find_xi over the whole interval
    std::size_t half_zero_samples = 4096;  // phi zeros on (a,c) and (c,b)
    std::size_t gap_samples = 4096;        // per gap, each Rolle level
    // "phi is zero here" threshold, relative to the function's node scale.
    double phi_zero_rel = 1e-11;
};

} // namespace simpcert
