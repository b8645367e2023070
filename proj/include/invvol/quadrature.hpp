#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace invvol {

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Nodes are Legendre roots found by Newton iteration from the Chebyshev-like
// initial guess; weights follow from the derivative.  Exact for polynomials
// of degree <= 2n-1.
inline GaussLegendre compute_gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("compute_gauss_legendre: n >= 1");
    GaussLegendre r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return r;
}

// The rule used throughout: computed once, cached.
inline const GaussLegendre& gauss_legendre_64() {
    static const GaussLegendre g = compute_gauss_legendre(64);
    return g;
}

// Integrate f over [a, b] with an affine map onto the reference interval.
template <class F>
inline double integrate(const GaussLegendre& gl, double a, double b, F&& f) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i)
        sum += gl.weights[i] * f(mid + half * gl.nodes[i]);
    return half * sum;
}

}  // namespace invvol
