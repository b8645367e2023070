#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <variant>

#include "invvol/models.hpp"
#include "invvol/quadrature.hpp"

namespace invvol {

// Short-maturity ATM implied-vol limits.  The skew either converges to a
// constant (exponent 0) or diverges like T^{H-1/2}; scaling_exponent is the
// power of T that renormalizes it:  T^{scaling_exponent} * skew -> value.
struct SkewLimit {
    double value = 0.0;
    double scaling_exponent = 0.0;
};

// The ATM implied vol collapses onto the spot vol as T -> 0 in all three
// models.
inline double atm_level_limit(const ModelParams& m) {
    validate(m);
    return sigma0_of(m);
}

inline SkewLimit skew_limit(const ModelParams& m) {
    validate(m);
    if (std::holds_alternative<ConstVolParams>(m)) return {0.0, 0.0};
    if (const auto* s = std::get_if<SabrParams>(&m))
        return {0.5 * s->rho * s->alpha, 0.0};
    const auto& b = std::get<BergomiParams>(m);
    const double h = b.hurst;
    if (h > 0.5) return {0.0, 0.0};
    if (h == 0.5) return {b.rho * b.v / 4.0, 0.0};
    const double value =
        2.0 * b.rho * b.v * std::sqrt(2.0 * h) / (3.0 + 4.0 * h * (2.0 + h));
    return {value, 0.5 - h};
}

// Finite-maturity skew approximation:
//   (rho / (sigma0 T^2)) * int_0^T int_r^T E[D_r sigma_u] du dr,
// evaluated by nested 64-node Gauss-Legendre.  Two power substitutions make
// the integrand smooth: the inner u = r + (T-r) s^{1/(H+1/2)} absorbs the
// (u-r)^{H-1/2} endpoint singularity of the rough kernel, and the outer
// T - r = T q^{1/(H+3/2)} absorbs the resulting (T-r)^{H+1/2} profile.  The
// Brownian-vol model is the H = 1/2 case (both maps turn linear, and the
// rule is exact for its constant kernel).
inline double skew_integral(const ModelParams& m, double T) {
    validate(m);
    if (!std::isfinite(T) || T <= 0.0)
        throw std::invalid_argument("skew_integral: T must be positive");
    const double rho = rho_of(m);
    if (std::holds_alternative<ConstVolParams>(m) || rho == 0.0) return 0.0;

    const double h = std::holds_alternative<BergomiParams>(m)
                         ? std::get<BergomiParams>(m).hurst
                         : 0.5;
    const double p_in = 1.0 / (h + 0.5);
    const double p_out = 1.0 / (h + 1.5);

    const GaussLegendre& gl = gauss_legendre_64();
    const std::size_t nq = gl.nodes.size();
    double total = 0.0;
    for (std::size_t i = 0; i < nq; ++i) {
        const double q = 0.5 * (1.0 + gl.nodes[i]);
        const double wq = 0.5 * gl.weights[i];
        const double t_minus_r = T * std::pow(q, p_out);
        const double r = T - t_minus_r;
        double inner = 0.0;
        for (std::size_t j = 0; j < nq; ++j) {
            const double s = 0.5 * (1.0 + gl.nodes[j]);
            const double ws = 0.5 * gl.weights[j];
            const double u = r + t_minus_r * std::pow(s, p_in);
            inner += ws * malliavin_kernel(m, r, u) * std::pow(s, p_in - 1.0);
        }
        inner *= t_minus_r * p_in;
        total += wq * inner * T * p_out * std::pow(q, p_out - 1.0);
    }
    return rho / (sigma0_of(m) * T * T) * total;
}

// First-order Taylor smile around the ATM point:
//   I(k) ~ level + skew * (k - k_star).
// A non-positive extrapolation is reported on stderr but still returned --
// it only means the linearization left its validity range.
inline double approx_smile(double level, double skew, double k_star,
                           double k) {
    const double iv = level + skew * (k - k_star);
    if (iv <= 0.0)
        std::fprintf(stderr,
                     "approx_smile: warning: extrapolated vol %.6g <= 0 at "
                     "k - k_star = %.6g\n",
                     iv, k - k_star);
    return iv;
}

}  // namespace invvol
