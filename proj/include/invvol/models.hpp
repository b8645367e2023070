#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include "invvol/errors.hpp"

namespace invvol {

// Flat volatility: sigma_t = sigma0.
struct ConstVolParams {
    double sigma0 = 0.3;
};

// Lognormal vol driven by a Brownian motion:
//   sigma_t = sigma0 * exp(alpha * W'_t - alpha^2 t / 2).
struct SabrParams {
    double sigma0 = 0.3;
    double alpha = 0.3;
    double rho = -0.3;
};

// Rough lognormal variance driven by a Riemann-Liouville fractional kernel:
//   sigma_t^2 = sigma0^2 * exp(v * sqrt(2H) * Z_t - v^2 t^{2H} / 2),
//   Z_t = int_0^t (t-s)^{H-1/2} dW'_s.
struct BergomiParams {
    double sigma0 = 0.3;
    double v = 0.5;
    double rho = -0.3;
    double hurst = 0.3;
};

using ModelParams = std::variant<ConstVolParams, SabrParams, BergomiParams>;

inline void validate(const ConstVolParams& p) {
    if (!std::isfinite(p.sigma0) || p.sigma0 <= 0.0)
        throw ValidationError("constvol: sigma0 must be positive");
}

inline void validate(const SabrParams& p) {
    if (!std::isfinite(p.sigma0) || p.sigma0 <= 0.0)
        throw ValidationError("sabr: sigma0 must be positive");
    if (!std::isfinite(p.alpha) || p.alpha < 0.0)
        throw ValidationError("sabr: alpha must be non-negative");
    if (!std::isfinite(p.rho) || p.rho < -1.0 || p.rho > 1.0)
        throw ValidationError("sabr: rho must lie in [-1, 1]");
}

inline void validate(const BergomiParams& p) {
    if (!std::isfinite(p.sigma0) || p.sigma0 <= 0.0)
        throw ValidationError("bergomi: sigma0 must be positive");
    if (!std::isfinite(p.v) || p.v < 0.0)
        throw ValidationError("bergomi: v must be non-negative");
    if (!std::isfinite(p.rho) || p.rho < -1.0 || p.rho > 1.0)
        throw ValidationError("bergomi: rho must lie in [-1, 1]");
    if (!std::isfinite(p.hurst) || p.hurst <= 0.0 || p.hurst >= 1.0)
        throw ValidationError("bergomi: hurst must lie in (0, 1)");
}

inline void validate(const ModelParams& p) {
    std::visit([](const auto& m) { validate(m); }, p);
}

inline double sigma0_of(const ModelParams& p) {
    return std::visit([](const auto& m) { return m.sigma0; }, p);
}

inline double rho_of(const ModelParams& p) {
    if (const auto* s = std::get_if<SabrParams>(&p)) return s->rho;
    if (const auto* b = std::get_if<BergomiParams>(&p)) return b->rho;
    return 0.0;
}

inline std::string model_name(const ModelParams& p) {
    if (std::holds_alternative<ConstVolParams>(p)) return "constvol";
    if (std::holds_alternative<SabrParams>(p)) return "sabr";
    return "bergomi";
}

// Uniform grid 0 = t_0 < t_1 < ... < t_n = T.
struct TimeGrid {
    double T = 0.0;
    int n_steps = 0;

    TimeGrid(double maturity, int steps) : T(maturity), n_steps(steps) {
        if (!std::isfinite(T) || T <= 0.0)
            throw ValidationError("time grid: maturity must be positive");
        if (steps < 1) throw ValidationError("time grid: steps must be >= 1");
    }
    double dt() const { return T / n_steps; }
    double t(int i) const { return T * i / n_steps; }
};

// Expected Malliavin derivative of spot vol, E[D_r sigma_u] for r <= u.
// This is the forward-smile ingredient: constvol has none, the Brownian
// model's is flat, the rough model's blows up like (u-r)^{H-1/2} at r = u.
inline double malliavin_kernel(const ModelParams& p, double r, double u) {
    if (!(r >= 0.0) || !(u > 0.0) || r > u)
        throw std::invalid_argument("malliavin_kernel: need 0 <= r <= u, u > 0");
    if (std::holds_alternative<ConstVolParams>(p)) return 0.0;
    if (const auto* s = std::get_if<SabrParams>(&p))
        return s->alpha * s->sigma0;
    const auto& b = std::get<BergomiParams>(p);
    const double h = b.hurst;
    const double damp = std::exp(-b.v * b.v * std::pow(u, 2.0 * h) / 8.0);
    return 0.5 * b.sigma0 * b.v * std::sqrt(2.0 * h) *
           std::pow(u - r, h - 0.5) * damp;
}

// Standard normals one simulated path consumes: the vol-and-noise block
// first, then one spot shock per step.
inline int vol_gaussians_per_path(const ModelParams& p, int n_steps) {
    if (std::holds_alternative<ConstVolParams>(p)) return 0;
    if (std::holds_alternative<SabrParams>(p)) return n_steps;
    return 2 * n_steps;
}

inline int gaussians_per_path(const ModelParams& p, int n_steps) {
    return vol_gaussians_per_path(p, n_steps) + n_steps;
}

}  // namespace invvol
