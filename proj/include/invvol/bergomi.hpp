#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "invvol/errors.hpp"
#include "invvol/models.hpp"
#include "invvol/quadrature.hpp"

namespace invvol {
namespace detail {

// Cov(Z_ti, Z_tj) = int_0^{min} w^{H-1/2} (|ti-tj| + w)^{H-1/2} dw.
// The substitution w = z^p with p = 1/(H+1/2) flattens the endpoint power so
// the integrand is bounded; dyadic panels toward z = 0 mop up the remaining
// derivative singularity.  The diagonal reduces to the exact t^{2H}/(2H).
inline double fractional_cov(double ti, double tj, double h) {
    const double tm = std::min(ti, tj);
    if (tm == 0.0) return 0.0;
    const double delta = std::fabs(ti - tj);
    if (delta == 0.0) return std::pow(tm, 2.0 * h) / (2.0 * h);

    const double p = 1.0 / (h + 0.5);
    const double z_top = std::pow(tm, h + 0.5);  // tm^{1/p}
    const GaussLegendre& gl = gauss_legendre_64();
    auto f = [&](double z) {
        return p * std::pow(delta + std::pow(z, p), h - 0.5);
    };
    double total = 0.0;
    double hi = z_top;
    for (int panel = 0; panel < 60; ++panel) {
        const double lo = 0.5 * hi;
        total += integrate(gl, lo, hi, f);
        hi = lo;
    }
    // dropped tail [0, z_top * 2^-60] is below double precision relative to total
    return total;
}

// Cov(Z_ti, W'_tb - W'_ta) for an increment [ta, tb], closed form.
inline double fractional_cross_cov(double ti, double ta, double tb, double h) {
    if (ta >= ti) return 0.0;
    const double e = h + 0.5;
    const double upper = std::pow(ti - ta, e);
    const double cut = std::min(tb, ti);
    const double lower = std::pow(ti - cut, e);
    return (upper - lower) / e;
}

}  // namespace detail

// Joint covariance of (Z_{t_1..t_n}, dW'_{1..n}) on a uniform grid, as a flat
// row-major symmetric matrix of dimension 2n.  Z is the fractional driver of
// the rough model; dW' are the increments of the Brownian motion under the
// integral sign, needed to correlate the spot shocks.
inline std::vector<double> bergomi_joint_covariance(const BergomiParams& p,
                                                    const TimeGrid& grid) {
    validate(p);
    const int n = grid.n_steps;
    const std::size_t dim = 2 * static_cast<std::size_t>(n);
    std::vector<double> a(dim * dim, 0.0);
    const double h = p.hurst;
    const double dt = grid.dt();

    for (int i = 1; i <= n; ++i) {
        for (int j = i; j <= n; ++j) {
            const double c = detail::fractional_cov(grid.t(i), grid.t(j), h);
            a[(i - 1) * dim + (j - 1)] = c;
            a[(j - 1) * dim + (i - 1)] = c;
        }
    }
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            const double c = detail::fractional_cross_cov(
                grid.t(i), grid.t(j - 1), grid.t(j), h);
            a[(i - 1) * dim + (n + j - 1)] = c;
            a[(n + j - 1) * dim + (i - 1)] = c;
        }
    }
    for (int j = 1; j <= n; ++j)
        a[(n + j - 1) * dim + (n + j - 1)] = dt;
    return a;
}

namespace detail {

inline bool try_semidefinite_cholesky(const std::vector<double>& a,
                                      std::size_t n, double tol,
                                      std::vector<double>& lower) {
    lower.assign(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= lower[j * n + k] * lower[j * n + k];
        if (d < -tol) return false;
        if (d <= tol) continue;  // dependent direction: leave the column zero
        const double ljj = std::sqrt(d);
        lower[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k)
                s -= lower[i * n + k] * lower[j * n + k];
            lower[i * n + j] = s / ljj;
        }
    }
    return true;
}

}  // namespace detail

// Lower-triangular L with L L^T ~ A for symmetric positive SEMIdefinite A.
// Joint covariances here are legitimately rank-deficient (at H = 1/2 the
// fractional driver IS the Brownian motion), so near-zero pivots are clamped
// to zero columns instead of failing.  A clearly negative pivot gets one
// jittered retry before FactorizationError.
inline std::vector<double> semidefinite_cholesky(const std::vector<double>& a,
                                                 std::size_t dim) {
    if (a.size() != dim * dim)
        throw std::invalid_argument("semidefinite_cholesky: size mismatch");
    double max_diag = 0.0, trace = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        max_diag = std::max(max_diag, std::fabs(a[j * dim + j]));
        trace += a[j * dim + j];
    }
    const double tol = 1e-12 * std::max(max_diag, 1e-300);
    std::vector<double> lower;
    if (detail::try_semidefinite_cholesky(a, dim, tol, lower)) return lower;

    std::vector<double> jittered = a;
    const double jitter = 1e-12 * trace / static_cast<double>(dim);
    for (std::size_t j = 0; j < dim; ++j) jittered[j * dim + j] += jitter;
    if (detail::try_semidefinite_cholesky(jittered, dim, tol, lower))
        return lower;
    throw FactorizationError(
        "semidefinite_cholesky: matrix is not positive semidefinite");
}

}  // namespace invvol
