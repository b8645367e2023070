#pragma once

#include <cmath>
#include <stdexcept>

#include "invvol/errors.hpp"
#include "invvol/inverse_bs.hpp"
#include "invvol/roots.hpp"

namespace invvol {

// The ATM inverse-option price m(y), y = sigma*sqrt(T), is not monotone in y:
// it rises from 0, peaks, then decays.  Only the rising branch is invertible.
// The solver caps the search at kTurningSafety * y_peak so the bracket
// endpoint keeps a strictly positive slope.
inline constexpr double kTurningSafety = 0.95;

// Location of the price peak: the unique positive root of the ATM vega g(y).
// Computed once and cached (magic statics make this race-free).
inline double turning_point() {
    static const double y_star = [] {
        auto g = [](double y) { return atm_vega_of_y(y); };
        const BrentResult r = brent(g, 1e-8, 4.0, 1e-15, 0.0, 200);
        if (!r.converged)
            throw NoConvergence("turning_point: vega root search failed");
        return r.root;
    }();
    return y_star;
}

// Largest ATM price the solver accepts (price at kTurningSafety * y_peak).
inline double max_invertible_price() {
    static const double cap =
        atm_price_of_y(kTurningSafety * turning_point());
    return cap;
}

// Invert the ATM price for sigma at maturity T.  Throws DomainError when the
// price lies outside (0, max_invertible_price()) and NoConvergence when the
// bracketed search fails to settle.
inline double implied_vol_atm(double price, double T) {
    if (!std::isfinite(T) || T <= 0.0)
        throw std::invalid_argument("implied_vol_atm: T must be positive");
    if (!std::isfinite(price))
        throw std::invalid_argument("implied_vol_atm: price must be finite");
    if (price <= 0.0)
        throw DomainError("implied_vol_atm: price must be positive");
    if (price >= max_invertible_price())
        throw DomainError(
            "implied_vol_atm: price at or above the invertible cap");

    const double sqrt_T = std::sqrt(T);
    const double hi = kTurningSafety * turning_point() / sqrt_T;
    auto fn = [&](double s) { return atm_price(T, s) - price; };

    // Below the default floor the model price can still exceed a tiny target;
    // push the floor down geometrically until it brackets.
    double lo = 1e-8;
    double flo = fn(lo);
    for (int guard = 0; flo > 0.0 && guard < 5; ++guard) {
        lo *= 1e-4;
        flo = fn(lo);
    }
    if (flo > 0.0)
        throw DomainError("implied_vol_atm: price below representable range");
    if (flo == 0.0) return lo;

    const BrentResult r = brent(fn, lo, hi, 1e-12, 1e-14, 200);
    if (!r.converged)
        throw NoConvergence("implied_vol_atm: root search did not converge");
    return r.root;
}

}  // namespace invvol
