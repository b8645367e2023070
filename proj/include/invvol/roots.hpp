#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace invvol {

struct BrentResult {
    double root = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Brent's method: inverse-quadratic / secant steps with a bisection fallback.
// Requires f(lo) and f(hi) to straddle zero.  Stops when the bracket shrinks
// below `xtol` (plus a floating-point floor) or |f| falls below `ftol`.
template <class F>
inline BrentResult brent(F&& f, double lo, double hi, double xtol, double ftol,
                         int max_iter) {
    double a = lo, b = hi;
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return {a, 0, true};
    if (fb == 0.0) return {b, 0, true};
    if ((fa > 0.0) == (fb > 0.0))
        throw std::invalid_argument("brent: root is not bracketed");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int it = 1; it <= max_iter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 =
            2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) +
            0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || std::fabs(fb) <= ftol)
            return {b, it, true};

        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p <
                std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if (std::fabs(d) > tol1)
            b += d;
        else
            b += (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return {b, max_iter, false};
}

}  // namespace invvol
