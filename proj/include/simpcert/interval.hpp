#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace simpcert {

// Interval [a,b] with a < b strictly. The midpoint must itself be strictly
// interior, which rejects spans so narrow that (a+b)/2 collapses onto an
// endpoint in floating point.
class Interval {
public:
    Interval(double a, double b) : a_(a), b_(b) {
        if (!std::isfinite(a) || !std::isfinite(b))
            throw std::invalid_argument("interval endpoints must be finite");
        const double c = midpoint();
        if (!(a < b) || !(a < c) || !(c < b))
            throw std::invalid_argument("invalid interval [" + std::to_string(a) + ", " +
                                        std::to_string(b) + "]: need a < (a+b)/2 < b");
    }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double midpoint() const noexcept { return 0.5 * (a_ + b_); }
    double width() const noexcept { return b_ - a_; }

    bool contains_strictly(double x) const noexcept { return a_ < x && x < b_; }

private:
    double a_;
    double b_;
};

} // namespace simpcert
