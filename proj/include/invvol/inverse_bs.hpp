#pragma once

#include <cmath>
#include <stdexcept>

#include "invvol/special.hpp"

// Closed forms for the inverse European call: payoff ((S_T - K)/S_T)+ settled
// in units of the underlying, so every price lives in [0, 1]. With zero rates,
//
//   BS(t, x, k, sigma) = N(d2) - e^{sigma^2 (T-t)} e^{k-x} N(d1),
//   d2 = (x-k)/(sigma sqrt(T-t)) - sigma sqrt(T-t)/2,   d1 = d2 - sigma sqrt(T-t),
//
// with x the log-spot and k the log-strike. ATM (k = x) everything reduces to
// functions of the single variable y = sigma*sqrt(T).
namespace invvol {

namespace detail {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2 pi)
constexpr double kHalfInvSqrt2 = 0.3535533905932737622;  // 1/(2 sqrt 2)
constexpr double kThreeHalfInvSqrt2 = 1.0606601717798212866;  // 3/(2 sqrt 2)
constexpr double kThreeQuarterInvSqrt2 = 0.5303300858899106433;  // 3/(4 sqrt 2)
}  // namespace detail

struct BsPoint {
    double tau;    // time to maturity T - t, years, >= 0
    double x;      // log-spot
    double k;      // log-strike
    double sigma;  // volatility, > 0
};

// ATM price as a function of y = sigma*sqrt(tau):
//   m(y) = 1/2 ( erfc(y/(2 sqrt2)) - e^{y^2} erfc(3y/(2 sqrt2)) ).
// The second term is evaluated as e^{-y^2/8} erfcx(3y/(2 sqrt2)) so it stays
// bounded for any y.
inline double atm_price_of_y(double y) {
    if (!(y >= 0.0)) throw std::invalid_argument("atm_price_of_y: y must be >= 0");
    const double t1 = 0.5 * std::erfc(y * detail::kHalfInvSqrt2);
    const double t2 = 0.5 * std::exp(-y * y / 8.0) * erfcx(y * detail::kThreeHalfInvSqrt2);
    return t1 - t2;
}

// g(y) = -y e^{y^2} erfc(3y/(2 sqrt2)) + e^{-y^2/8}/sqrt(2 pi)
//      = e^{-y^2/8} ( 1/sqrt(2 pi) - y erfcx(3y/(2 sqrt2)) ).
// m'(y) = g(y); g has a single positive root y* beyond which m turns over.
inline double atm_vega_of_y(double y) {
    return std::exp(-y * y / 8.0) *
           (detail::kInvSqrt2Pi - y * erfcx(y * detail::kThreeHalfInvSqrt2));
}

inline void validate(const BsPoint& p) {
    if (!(std::isfinite(p.tau) && std::isfinite(p.x) && std::isfinite(p.k) &&
          std::isfinite(p.sigma)))
        throw std::invalid_argument("bs_price: non-finite input");
    if (p.tau < 0.0) throw std::invalid_argument("bs_price: tau must be >= 0");
    if (!(p.sigma > 0.0)) throw std::invalid_argument("bs_price: sigma must be > 0");
}

// Inverse-call price, valid on the whole admissible domain. tau = 0 is a
// branch returning the payoff (1 - e^{k-x})+, not a limit of the formula.
//
// For tau > 0, with w = k - x, a = sigma^2 tau and z_i = -d_i/sqrt(2):
//   z2 = (2w + a) / (2 sqrt2 sigma sqrt(tau)),  z1 = (2w + 3a) / (2 sqrt2 sigma sqrt(tau)),
//   BS = 1/2 erfc(z2) - 1/2 e^{a+w} erfc(z1).
// The identity a + w - z1^2 = -z2^2 lets the second term be computed as
// 1/2 erfcx(z1) e^{-z2^2} whenever z1 >= 0, which removes the e^{a+w} overflow
// for large a; for z1 < 0 one has a + w < -a/2, so the direct product is safe.
inline double bs_price(const BsPoint& p) {
    validate(p);
    if (p.tau == 0.0) {
        const double payoff = 1.0 - std::exp(p.k - p.x);
        return payoff > 0.0 ? payoff : 0.0;
    }
    const double st = p.sigma * std::sqrt(p.tau);
    const double w = p.k - p.x;
    const double a = p.sigma * p.sigma * p.tau;
    const double denom = 2.0 * st * 1.4142135623730950488;  // 2 sqrt2 sigma sqrt(tau)
    const double z2 = (2.0 * w + a) / denom;
    const double z1 = (2.0 * w + 3.0 * a) / denom;
    const double t1 = 0.5 * std::erfc(z2);
    double t2;
    if (z1 >= 0.0) {
        t2 = 0.5 * erfcx(z1) * std::exp(-z2 * z2);
    } else {
        t2 = 0.5 * std::exp(a + w) * std::erfc(z1);
    }
    return t1 - t2;
}

// ATM price with k = x; equals bs_price on ATM inputs up to rounding.
inline double atm_price(double T, double sigma) {
    if (!(T >= 0.0)) throw std::invalid_argument("atm_price: T must be >= 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("atm_price: sigma must be > 0");
    return atm_price_of_y(sigma * std::sqrt(T));
}

// ATM vega dBS/dsigma = g(sigma sqrt T) sqrt(T); positive below the turning point.
inline double atm_vega(double T, double sigma) {
    if (!(T > 0.0)) throw std::invalid_argument("atm_vega: T must be > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("atm_vega: sigma must be > 0");
    return atm_vega_of_y(sigma * std::sqrt(T)) * std::sqrt(T);
}

// ATM strike sensitivity dBS/dk at k = x. Algebraically
//   atm_dk = atm_price - 1/2 erfc(y/(2 sqrt2)) = -1/2 e^{-y^2/8} erfcx(3y/(2 sqrt2)),
// and the single-term form is used so that it cancels the constant-vol digital
// expectation E[e^{k-X_T} 1{X_T >= k}] = -atm_dk identically, not just to rounding.
inline double atm_dk(double T, double sigma) {
    if (!(T > 0.0)) throw std::invalid_argument("atm_dk: T must be > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("atm_dk: sigma must be > 0");
    const double y = sigma * std::sqrt(T);
    return -0.5 * std::exp(-y * y / 8.0) * erfcx(y * detail::kThreeHalfInvSqrt2);
}

// d(atm_dk)/dsigma; used by the delta-method error propagation of the skew
// estimator. With z = 3y/(2 sqrt2):
//   d/dy [ -1/2 e^{-y^2/8} erfcx(z) ] = e^{-y^2/8} ( y/8 erfcx(z) - 3/(4 sqrt2) erfcx'(z) ).
inline double atm_dk_dsigma(double T, double sigma) {
    const double sqT = std::sqrt(T);
    const double y = sigma * sqT;
    const double z = y * detail::kThreeHalfInvSqrt2;
    const double ddy = std::exp(-y * y / 8.0) *
                       (y / 8.0 * erfcx(z) - detail::kThreeQuarterInvSqrt2 * erfcx_prime(z));
    return ddy * sqT;
}

// d(atm_vega)/dsigma = T g'(y), with
//   g'(y) = e^{-y^2/8} ( -(y/4)(1/sqrt(2 pi) - y erfcx(z)) - erfcx(z) - y erfcx'(z) 3/(2 sqrt2) ).
inline double atm_vega_dsigma(double T, double sigma) {
    const double y = sigma * std::sqrt(T);
    const double z = y * detail::kThreeHalfInvSqrt2;
    const double gp = std::exp(-y * y / 8.0) *
                      (-(y / 4.0) * (detail::kInvSqrt2Pi - y * erfcx(z)) - erfcx(z) -
                       y * erfcx_prime(z) * detail::kThreeHalfInvSqrt2);
    return gp * T;
}

}  // namespace invvol
