#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "invvol/errors.hpp"
#include "invvol/inverse_bs.hpp"
#include "invvol/iv_solver.hpp"
#include "invvol/models.hpp"
#include "invvol/parallel.hpp"
#include "invvol/paths.hpp"
#include "invvol/rng.hpp"

namespace invvol {

enum class PayoffKind { Inverse, QuantoInverse };

// Inverse European call: pays ((S_T - K)/S_T)+ units of domestic currency,
// i.e. the payoff is measured in the asset itself.  The quanto variant pays
// the same number multiplied by a fixed conversion rate R.
struct OptionSpec {
    double spot = 100.0;
    double strike = 100.0;
    double maturity = 0.001;
    double rate_R = 1.0;
    PayoffKind kind = PayoffKind::Inverse;
};

inline void validate(const OptionSpec& o) {
    if (!std::isfinite(o.spot) || o.spot <= 0.0)
        throw ValidationError("option: spot must be positive");
    if (!std::isfinite(o.strike) || o.strike <= 0.0)
        throw ValidationError("option: strike must be positive");
    if (!std::isfinite(o.maturity) || o.maturity <= 0.0)
        throw ValidationError("option: maturity must be positive");
    if (!std::isfinite(o.rate_R) || o.rate_R <= 0.0)
        throw ValidationError("option: conversion rate must be positive");
}

struct SimConfig {
    std::size_t n_paths = 200000;  // total trajectories (pairs count as two)
    int n_steps = 50;
    std::uint64_t seed = 0;
    bool antithetic = true;
};

inline void validate(const SimConfig& s) {
    if (s.n_paths < 2)
        throw ValidationError("sim: need at least two paths");
    if (s.antithetic && (s.n_paths % 2) != 0)
        throw ValidationError("sim: antithetic pairing needs an even path count");
    if (s.n_steps < 1) throw ValidationError("sim: steps must be >= 1");
}

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;  // independent samples (pairs when antithetic)
};

// Terminal log-prices.  x[i] and x_anti[i] share every gaussian up to sign,
// forming an antithetic pair; x_anti is empty when pairing is disabled.
struct TerminalPaths {
    std::vector<double> x;
    std::vector<double> x_anti;
};

inline double inverse_payoff(double x, double log_strike) {
    const double w = log_strike - x;
    return w < 0.0 ? -std::expm1(w) : 0.0;  // (1 - e^{k-x})+
}

// Exponential digital e^{k - X_T} 1{X_T >= k}: the payoff whose expectation
// is the strike-derivative term of the inverse price.
inline double digital_payoff(double x, double log_strike) {
    const double w = log_strike - x;
    return w <= 0.0 ? std::exp(w) : 0.0;
}

// Closed-form ATM digital under flat volatility.  Algebraically identical to
// -atm_dk, and implemented that way so the identity is exact in floating
// point, not just to rounding.
inline double atm_digital_const_vol(double T, double sigma) {
    return -atm_dk(T, sigma);
}

// Euler scheme on X = log S with left-endpoint vol:
//   X_{i+1} = X_i - sigma_i^2 dt / 2 + sigma_i (rho dW'_i + rhobar dB_i).
// Path p draws from the counter-based stream keyed {seed, p}; the antithetic
// partner re-reads the same stream with every gaussian negated, so pairs are
// exact mirrors.  Slots are written at disjoint indices by a static
// partition: the result is bit-identical for any worker count.
inline TerminalPaths simulate_terminal_logprice(const ModelParams& model,
                                                const OptionSpec& opt,
                                                const SimConfig& sim) {
    validate(model);
    validate(opt);
    validate(sim);
    const TimeGrid grid(opt.maturity, sim.n_steps);
    const VolModelSim vol_sim(model, grid);
    const std::size_t n_streams =
        sim.antithetic ? sim.n_paths / 2 : sim.n_paths;

    TerminalPaths out;
    out.x.resize(n_streams);
    if (sim.antithetic) out.x_anti.resize(n_streams);

    const double x0 = std::log(opt.spot);
    const double rho = rho_of(model);
    const double rho_bar = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    const double dt = grid.dt();
    const double sq_dt = std::sqrt(dt);
    const int n = sim.n_steps;

    parallel_chunks(n_streams, [&](std::size_t begin, std::size_t end) {
        std::vector<double> sigma, dwp, scratch;
        auto one_path = [&](std::uint64_t p, double sign) {
            NormalStream stream(sim.seed, p);
            vol_sim.vol_and_noise(stream, sign, sigma, dwp, scratch);
            double x = x0;
            for (int i = 0; i < n; ++i) {
                const double s = sigma[i];
                const double db = sq_dt * (sign * stream.next());
                x += -0.5 * s * s * dt + s * (rho * dwp[i] + rho_bar * db);
            }
            return x;
        };
        for (std::size_t p = begin; p < end; ++p) {
            out.x[p] = one_path(p, 1.0);
            if (sim.antithetic) out.x_anti[p] = one_path(p, -1.0);
        }
    });
    return out;
}

namespace detail {

// Compensated (Neumaier) accumulator: path sums stay exact enough that the
// final statistics do not depend on summation order drift.
struct NeumaierSum {
    double s = 0.0, c = 0.0;
    void add(double v) {
        const double t = s + v;
        if (std::fabs(s) >= std::fabs(v))
            c += (s - t) + v;
        else
            c += (v - t) + s;
        s = t;
    }
    double get() const { return s + c; }
};

// Payoff and digital statistics from one shared simulation: means, standard
// errors, and the covariance of the two sample means (the skew estimator
// needs it).  Everything downstream -- price, digital, implied vol, skew --
// is assembled from this single pass, so a fixed seed prices all of them on
// the same paths.
struct AtmRunStats {
    double price_mean = 0.0;
    double price_se = 0.0;
    double digital_mean = 0.0;
    double digital_se = 0.0;
    double cov_means = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_paths = 0;
};

inline AtmRunStats run_stats(const ModelParams& model, const OptionSpec& opt,
                             const SimConfig& sim) {
    const TerminalPaths tp = simulate_terminal_logprice(model, opt, sim);
    const double k = std::log(opt.strike);
    const bool anti = !tp.x_anti.empty();
    const std::size_t m = tp.x.size();

    NeumaierSum sv, svv, sd, sdd, svd;
    for (std::size_t i = 0; i < m; ++i) {
        double v = inverse_payoff(tp.x[i], k);
        double d = digital_payoff(tp.x[i], k);
        if (anti) {
            v = 0.5 * (v + inverse_payoff(tp.x_anti[i], k));
            d = 0.5 * (d + digital_payoff(tp.x_anti[i], k));
        }
        sv.add(v);
        svv.add(v * v);
        sd.add(d);
        sdd.add(d * d);
        svd.add(v * d);
    }
    const double dm = static_cast<double>(m);
    const double bessel = m > 1 ? dm / (dm - 1.0) : 0.0;
    AtmRunStats r;
    r.n_samples = m;
    r.n_paths = sim.n_paths;
    r.price_mean = sv.get() / dm;
    r.digital_mean = sd.get() / dm;
    const double var_v =
        std::max(0.0, (svv.get() / dm - r.price_mean * r.price_mean) * bessel);
    const double var_d = std::max(
        0.0, (sdd.get() / dm - r.digital_mean * r.digital_mean) * bessel);
    r.price_se = std::sqrt(var_v / dm);
    r.digital_se = std::sqrt(var_d / dm);
    r.cov_means =
        (svd.get() / dm - r.price_mean * r.digital_mean) * bessel / dm;
    return r;
}

inline void require_atm(const OptionSpec& opt, const char* who) {
    if (std::fabs(std::log(opt.strike / opt.spot)) > 1e-12)
        throw std::invalid_argument(std::string(who) +
                                    ": requires strike == spot");
}

}  // namespace detail

// Monte Carlo price.  The quanto variant is the plain inverse price times
// the conversion rate, applied once at the end, so a shared seed gives an
// exact multiple.
inline McEstimate price_option(const ModelParams& model, const OptionSpec& opt,
                               const SimConfig& sim) {
    const detail::AtmRunStats r = detail::run_stats(model, opt, sim);
    const double factor =
        opt.kind == PayoffKind::QuantoInverse ? opt.rate_R : 1.0;
    return {factor * r.price_mean, factor * r.price_se, r.n_samples};
}

// Monte Carlo estimate of the exponential digital on the underlying
// (conversion-rate free: it is an estimator ingredient, not a claim).
inline McEstimate digital_term(const ModelParams& model, const OptionSpec& opt,
                               const SimConfig& sim) {
    const detail::AtmRunStats r = detail::run_stats(model, opt, sim);
    return {r.digital_mean, r.digital_se, r.n_samples};
}

// ATM implied vol of the simulated price, stderr by the delta method.
inline McEstimate atm_iv_mc(const ModelParams& model, const OptionSpec& opt,
                            const SimConfig& sim) {
    detail::require_atm(opt, "atm_iv_mc");
    const detail::AtmRunStats r = detail::run_stats(model, opt, sim);
    const double iv = implied_vol_atm(r.price_mean, opt.maturity);
    const double vega = atm_vega(opt.maturity, iv);
    if (vega < 1e-14)
        throw DegenerateVega("atm_iv_mc: vega too small to invert the price");
    return {iv, r.price_se / vega, r.n_samples};
}

// Deterministic assembly of the ATM skew estimator from an implied vol and a
// digital value:  (-atm_dk - digital) / vega.  When the digital equals the
// flat-vol closed form -atm_dk bitwise, the numerator cancels exactly and
// the skew is exactly zero.
inline double assemble_atm_skew(double T, double iv, double digital) {
    const double vega = atm_vega(T, iv);
    if (vega < 1e-14)
        throw DegenerateVega("assemble_atm_skew: vega too small");
    return (-atm_dk(T, iv) - digital) / vega;
}

struct AtmSkewResult {
    McEstimate skew;      // estimator value and delta-method stderr
    McEstimate price;     // underlying ATM price from the same paths
    McEstimate digital;   // underlying digital from the same paths
    double implied_vol = 0.0;
    std::size_t n_paths = 0;
};

// ATM implied-vol skew estimator: one simulation prices the option, inverts
// it to an implied vol, and combines it with the digital from the very same
// paths.  The stderr propagates both sample means and their covariance
// through the assembly map.
inline AtmSkewResult atm_skew_mc(const ModelParams& model,
                                 const OptionSpec& opt, const SimConfig& sim) {
    detail::require_atm(opt, "atm_skew_mc");
    const detail::AtmRunStats r = detail::run_stats(model, opt, sim);
    const double T = opt.maturity;
    const double iv = implied_vol_atm(r.price_mean, T);
    const double vega = atm_vega(T, iv);
    if (vega < 1e-14)
        throw DegenerateVega("atm_skew_mc: vega too small to invert the price");

    const double skew = (-atm_dk(T, iv) - r.digital_mean) / vega;
    // gradient of skew(P, D) with dI/dP = 1/vega
    const double g_p =
        (-atm_dk_dsigma(T, iv) - skew * atm_vega_dsigma(T, iv)) / (vega * vega);
    const double g_d = -1.0 / vega;
    const double var =
        g_p * g_p * r.price_se * r.price_se +
        g_d * g_d * r.digital_se * r.digital_se +
        2.0 * g_p * g_d * r.cov_means;
    AtmSkewResult out;
    out.skew = {skew, std::sqrt(std::max(0.0, var)), r.n_samples};
    out.price = {r.price_mean, r.price_se, r.n_samples};
    out.digital = {r.digital_mean, r.digital_se, r.n_samples};
    out.implied_vol = iv;
    out.n_paths = r.n_paths;
    return out;
}

}  // namespace invvol
