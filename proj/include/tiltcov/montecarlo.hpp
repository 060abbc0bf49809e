// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "tiltcov/geometry.hpp"
#include "tiltcov/rng.hpp"

namespace tiltcov {

/// SIR reported for a realization without interferers; exceeds every finite threshold.
inline constexpr double kNoInterferenceSir = std::numeric_limits<double>::infinity();

struct McCampaign {
    std::uint64_t trials = 200'000;
    std::uint64_t seed = 1;
    std::optional<double> window_radius; ///< m; unset means 10 / sqrt(pi * lambda)
    bool record_sir = false;

    void validate(const NetworkConfig &cfg) const;
    double window_radius_m(const NetworkConfig &cfg) const;
};

struct McEstimate {
    double tau_db = 0.0;
    double p_cov_hat = 0.0;
    double ci_halfwidth_95 = 0.0;
    std::vector<double> sir_samples_db; ///< filled only when the campaign records SIR
};

struct TrialOutcome {
    double sir = 0.0;
    std::uint64_t interferers = 0;
};

struct Interferer {
    double r = 0.0; ///< horizontal distance to the serving BS, m
    double h = 0.0; ///< effective height, m
};

/// SIR of a typical user at distance x for a fixed interferer layout;
/// kNoInterferenceSir when the layout is empty.
double sir_of(const NetworkConfig &cfg, double x, std::span<const Interferer> interferers);

/// One realization: serving distance from the nearest-BS law, a Poisson
/// number of pilot-sharing interferers uniform in the annulus
/// [R_e, window_radius] around the serving BS, each with an independent
/// effective height. Received powers include the path-loss constant C,
/// which cancels in the ratio up to rounding.
TrialOutcome realize_trial(const NetworkConfig &cfg, RandomStream &rng, double window_radius);

inline double realize_sir(const NetworkConfig &cfg, RandomStream &rng, double window_radius)
{
    return realize_trial(cfg, rng, window_radius).sir;
}

/// Trial i uses RandomStream(seed, i), so estimates are identical for any `jobs`.
/// SIR samples are shared across the threshold grid.
std::vector<McEstimate> estimate_coverage(const NetworkConfig &cfg, const McCampaign &campaign,
                                          std::span<const double> tau_grid_db, int jobs = 1);

/// 1.96 * sqrt(p (1 - p) / trials).
double ci_halfwidth_95(double p_hat, std::uint64_t trials);

} // namespace tiltcov
