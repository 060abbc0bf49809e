// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------

#pragma once

#include <span>
#include <string>
#include <vector>

#include "tiltcov/analytic.hpp"
#include "tiltcov/geometry.hpp"
#include "tiltcov/montecarlo.hpp"

namespace tiltcov {

enum class Evaluator { analytic, montecarlo };

std::string to_string(Evaluator e);

struct TiltSearchSpec {
    double grid_step_deg = 0.5;
    bool refine = true;
    double refine_tol_deg = 0.05;
    Evaluator evaluator = Evaluator::analytic;
    /// Explicit tilt grid in degrees; empty means 0, step, ..., 90.
    std::vector<double> betas_deg;
    QuadratureSpec quad{};
    McCampaign campaign{};
    int jobs = 1;

    void validate() const;

    /// Sorted, de-duplicated grid actually searched.
    std::vector<double> grid() const;
};

struct TiltProfile {
    std::vector<double> betas_deg;
    std::vector<double> p_cov;
    double beta_star_deg = 0.0;
    double p_star = 0.0;
};

struct TiltOptimum {
    double beta_star_deg = 0.0;
    double p_star = 0.0;
};

struct ThresholdOptimum {
    double tau_db = 0.0;
    double beta_star_deg = 0.0;
    double p_star = 0.0;
};

/// Coverage of `cfg` at its own tilt under the chosen evaluator.
/// The Monte Carlo evaluator reuses the campaign seed at every tilt.
double evaluate_coverage(const NetworkConfig &cfg, const TiltSearchSpec &spec);

/// Coverage at every grid tilt, all else fixed. Numerical failures are
/// rethrown with the offending tilt in the message.
TiltProfile sweep_tilt(const NetworkConfig &cfg, const TiltSearchSpec &spec);

/// Grid argmax, then (if enabled) golden-section search on the bracketing
/// grid interval. Ties go to the smaller tilt; refinement never lowers p_star.
TiltOptimum optimize_tilt(const NetworkConfig &cfg, const TiltSearchSpec &spec);

/// The refinement step of optimize_tilt on a profile sweep_tilt produced
/// for the same cfg and spec.
TiltOptimum refine_tilt(const NetworkConfig &cfg, const TiltSearchSpec &spec,
                        const TiltProfile &prof);

/// Optimal tilt at each SIR threshold in dB. The analytic evaluator tabulates
/// the interference exponent once per grid tilt and reuses it across
/// thresholds; Monte Carlo runs optimize_tilt per threshold.
std::vector<ThresholdOptimum> optimize_tilt_per_threshold(const NetworkConfig &cfg,
                                                          const TiltSearchSpec &spec,
                                                          std::span<const double> tau_grid_db);

} // namespace tiltcov
