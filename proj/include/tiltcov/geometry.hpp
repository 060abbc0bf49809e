// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------

#pragma once

#include <optional>

#include "tiltcov/rng.hpp"

namespace tiltcov {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }
double db_to_linear(double db);
double linear_to_db(double lin);

/// Vertical radiation pattern of the BS array (3GPP elevation cut).
///
/// The side-lobe level is a positive attenuation magnitude in dB. With
/// `enabled == false` the pattern is omni-directional in elevation (gain 1),
/// which is the conventional 2D-beamforming baseline.
struct AntennaPattern {
    double tilt_deg = 0.0;
    double theta3db_deg = 10.0;
    double sll_el_db = 20.0;
    bool enabled = true;

    void validate() const;
};

/// L(d) = C * d^-v. C cancels in every SIR ratio.
struct PathLossModel {
    double exponent_v = 3.6;
    double scale_c = 1.0;

    void validate() const;
};

struct HeightDensity {
    double continuous = 0.0; ///< density of the linear part at h (1/m)
    double atom = 0.0;       ///< probability mass located exactly at h
};

/// Effective-height law: weight a on a linear density b*h + c over
/// [h_min, h_max], weight (1 - a) on a point mass at h_atom.
///
/// The linear part is renormalized to unit mass; the raw integral only has
/// to be within 0.02 of one (the stock b, c integrate to 0.98756).
struct HeightModel {
    double a = 1.0;
    double b = 0.0047;
    double c = -0.047;
    double h_min = 10.0;
    double h_max = 30.5;
    double h_atom = 30.5;

    void validate() const;

    /// Raw integral of b*h + c over the continuous support.
    double raw_mass() const;

    HeightDensity pdf(double h) const;

    /// P(H <= h), including the atom.
    double cdf(double h) const;

    /// Inverse CDF of the renormalized linear part, u in [0, 1].
    double continuous_quantile(double u) const;

    double mean() const;

    double sample(RandomStream &rng) const;
};

/// Deployment and evaluation parameters of the typical-user analysis.
struct NetworkConfig {
    double lambda_bs = 1e-6;     ///< BS density, 1/m^2
    double h_bs = 32.0;          ///< BS height, m (reporting only; heights below are effective)
    AntennaPattern pattern{};
    PathLossModel path_loss{};
    HeightModel height_model{};
    double h0 = 30.5;            ///< typical-user effective height, m
    std::optional<double> exclusion_radius; ///< m; unset means sqrt(1 / (pi * lambda))
    double sir_threshold_db = 4.0;
    int approx_order = 5;

    void validate() const;

    double exclusion_radius_m() const;
    double sir_threshold_linear() const { return db_to_linear(sir_threshold_db); }
};

/// Mean cell radius of a PPP of density lambda, sqrt(1 / (pi * lambda)).
double mean_cell_radius(double lambda_bs);

/// Linear gain in (0, 1]. Exactly 1 for a disabled pattern.
double vertical_gain(const AntennaPattern &pattern, double theta_deg);

/// vertical_gain for a pattern the caller has already validated.
double vertical_gain_unchecked(const AntennaPattern &pattern, double theta_deg);

/// atan(h_eff / r) in degrees; 90 at r == 0.
double elevation_angle(double h_eff, double r);

double path_loss(const PathLossModel &model, double d);

inline HeightDensity height_pdf(const HeightModel &model, double h) { return model.pdf(h); }
inline double height_sample(const HeightModel &model, RandomStream &rng) { return model.sample(rng); }

/// Density of the distance to the nearest point of a PPP of density lambda.
double nearest_bs_pdf(double lambda_bs, double x);
double nearest_bs_cdf(double lambda_bs, double x);
/// Inverse CDF for u in [0, 1).
double nearest_bs_quantile(double lambda_bs, double u);

} // namespace tiltcov
