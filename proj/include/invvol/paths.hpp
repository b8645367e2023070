#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "invvol/bergomi.hpp"
#include "invvol/models.hpp"
#include "invvol/rng.hpp"

namespace invvol {

// Per-model simulator of the vol path and its driving noise, prepared once
// per (model, grid) and then stamped out path by path.  For the rough model
// the joint factor L is the expensive part; everything per-path is O(n^2).
class VolModelSim {
  public:
    VolModelSim(const ModelParams& params, const TimeGrid& grid)
        : params_(params), grid_(grid) {
        validate(params_);
        const int n = grid_.n_steps;
        if (const auto* b = std::get_if<BergomiParams>(&params_)) {
            lower_ = semidefinite_cholesky(bergomi_joint_covariance(*b, grid_),
                                           2 * static_cast<std::size_t>(n));
            vol_scale_ = 0.5 * b->v * std::sqrt(2.0 * b->hurst);
            drift_.resize(n);
            for (int i = 0; i < n; ++i)
                drift_[i] =
                    0.25 * b->v * b->v * std::pow(grid_.t(i), 2.0 * b->hurst);
        } else if (const auto* s = std::get_if<SabrParams>(&params_)) {
            drift_.resize(n);
            for (int i = 0; i < n; ++i)
                drift_[i] = 0.5 * s->alpha * s->alpha * grid_.t(i);
        }
    }

    const TimeGrid& grid() const { return grid_; }
    const ModelParams& params() const { return params_; }

    // Number of standard normals one call to vol_and_noise consumes.
    int noise_draws() const {
        return vol_gaussians_per_path(params_, grid_.n_steps);
    }

    // Fill sigma_left[i] = spot vol at the left endpoint t_i (i = 0..n-1) and
    // dwp[i] = increment of the vol-driving Brownian over (t_i, t_{i+1}].
    // Every gaussian drawn is multiplied by `sign` (-1 gives the antithetic
    // path).  `scratch` only needs capacity; it is resized as required.
    void vol_and_noise(NormalStream& stream, double sign,
                       std::vector<double>& sigma_left,
                       std::vector<double>& dwp,
                       std::vector<double>& scratch) const {
        const int n = grid_.n_steps;
        sigma_left.resize(n);
        dwp.resize(n);
        if (const auto* c = std::get_if<ConstVolParams>(&params_)) {
            for (int i = 0; i < n; ++i) {
                sigma_left[i] = c->sigma0;
                dwp[i] = 0.0;
            }
            return;
        }
        if (const auto* s = std::get_if<SabrParams>(&params_)) {
            const double sq_dt = std::sqrt(grid_.dt());
            double wp = 0.0;
            for (int i = 0; i < n; ++i) {
                sigma_left[i] = s->sigma0 * std::exp(s->alpha * wp - drift_[i]);
                dwp[i] = sq_dt * (sign * stream.next());
                wp += dwp[i];
            }
            return;
        }
        const auto& b = std::get<BergomiParams>(params_);
        const std::size_t dim = 2 * static_cast<std::size_t>(n);
        scratch.resize(dim);
        for (std::size_t k = 0; k < dim; ++k)
            scratch[k] = sign * stream.next();
        // y = L g, lower-triangular rows; first n rows are Z at t_1..t_n,
        // last n rows are the dW' increments
        sigma_left[0] = b.sigma0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double* row = lower_.data() + i * dim;
            double acc = 0.0;
            for (std::size_t k = 0; k <= i; ++k) acc += row[k] * scratch[k];
            if (i < static_cast<std::size_t>(n)) {
                // Z_{t_{i+1}} sets the vol at left endpoint t_{i+1}
                if (i + 1 < static_cast<std::size_t>(n))
                    sigma_left[i + 1] =
                        b.sigma0 *
                        std::exp(vol_scale_ * acc - drift_[i + 1]);
            } else {
                dwp[i - n] = acc;
            }
        }
    }

  private:
    ModelParams params_;
    TimeGrid grid_;
    std::vector<double> lower_;   // joint factor (rough model only)
    std::vector<double> drift_;   // log-vol drift at grid times
    double vol_scale_ = 0.0;
};

// One-shot convenience wrapper around VolModelSim.
inline std::pair<std::vector<double>, std::vector<double>>
simulate_vol_and_noise(const ModelParams& params, const TimeGrid& grid,
                       NormalStream& stream, double sign = 1.0) {
    VolModelSim sim(params, grid);
    std::vector<double> sigma_left, dwp, scratch;
    sim.vol_and_noise(stream, sign, sigma_left, dwp, scratch);
    return {std::move(sigma_left), std::move(dwp)};
}

}  // namespace invvol
