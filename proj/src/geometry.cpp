// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------

#include "tiltcov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tiltcov/errors.hpp"

namespace tiltcov {

namespace {

void require(bool ok, const std::string &msg)
{
    if (!ok) {
        throw ConfigError(msg);
    }
}

bool finite(double v) { return std::isfinite(v); }

} // namespace

double db_to_linear(double db) { return std::pow(10.0, 0.1 * db); }

double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

void AntennaPattern::validate() const
{
    if (!(tilt_deg >= 0.0 && tilt_deg <= 90.0)) {
        throw ConfigError("antenna.tilt_deg must lie in [0, 90], got " + std::to_string(tilt_deg));
    }
    if (!(finite(theta3db_deg) && theta3db_deg > 0.0)) {
        throw ConfigError("antenna.theta3db_deg must be > 0");
    }
    if (!(finite(sll_el_db) && sll_el_db > 0.0)) {
        throw ConfigError("antenna.sll_el_db must be a positive attenuation in dB");
    }
}

void PathLossModel::validate() const
{
    require(finite(exponent_v) && exponent_v > 2.0, "path_loss.exponent must be > 2");
    require(finite(scale_c) && scale_c > 0.0, "path_loss.scale must be > 0");
}

void HeightModel::validate() const
{
    require(finite(a) && a >= 0.0 && a <= 1.0, "height_model.a must lie in [0, 1]");
    require(finite(b) && finite(c), "height_model.b and height_model.c must be finite");
    require(finite(h_min) && finite(h_max) && h_min >= 0.0 && h_min < h_max,
            "height_model requires 0 <= h_min < h_max");
    require(finite(h_atom) && h_atom >= 0.0, "height_model.h_atom must be >= 0");
    // Linear density: non-negativity at both edges covers the whole support.
    constexpr double slack = 1e-12;
    require(b * h_min + c >= -slack && b * h_max + c >= -slack,
            "height_model: b*h + c must be non-negative on [h_min, h_max]");
    require(std::abs(raw_mass() - 1.0) <= 0.02,
            "height_model: linear density integrates to " + std::to_string(raw_mass()) +
                ", more than 0.02 away from 1");
}

double HeightModel::raw_mass() const
{
    return 0.5 * b * (h_max * h_max - h_min * h_min) + c * (h_max - h_min);
}

HeightDensity HeightModel::pdf(double h) const
{
    HeightDensity out;
    if (h >= h_min && h <= h_max) {
        out.continuous = a * std::max(0.0, b * h + c) / raw_mass();
    }
    if (h == h_atom) {
        out.atom = 1.0 - a;
    }
    return out;
}

double HeightModel::cdf(double h) const
{
    double lin = 0.0;
    if (h >= h_max) {
        lin = 1.0;
    } else if (h > h_min) {
        const double y = h - h_min;
        lin = (0.5 * b * y * y + (b * h_min + c) * y) / raw_mass();
    }
    return a * lin + (h >= h_atom ? 1.0 - a : 0.0);
}

double HeightModel::continuous_quantile(double u) const
{
    // Solve b/2 y^2 + p y = u Z for y = h - h_min with p the density at h_min.
    // The rationalized root stays accurate for p == 0 and for b -> 0.
    const double z = raw_mass();
    const double p = std::max(0.0, b * h_min + c);
    const double rhs = std::clamp(u, 0.0, 1.0) * z;
    const double disc = std::max(0.0, p * p + 2.0 * b * rhs);
    const double denom = p + std::sqrt(disc);
    const double y = denom > 0.0 ? 2.0 * rhs / denom : 0.0;
    return std::clamp(h_min + y, h_min, h_max);
}

double HeightModel::mean() const
{
    const double m2 = (h_max * h_max - h_min * h_min) / 2.0;
    const double m3 = (h_max * h_max * h_max - h_min * h_min * h_min) / 3.0;
    const double lin_mean = (b * m3 + c * m2) / raw_mass();
    return a * lin_mean + (1.0 - a) * h_atom;
}

double HeightModel::sample(RandomStream &rng) const
{
    const double pick = rng.uniform();
    if (pick >= a) {
        return h_atom;
    }
    return continuous_quantile(rng.uniform());
}

void NetworkConfig::validate() const
{
    require(finite(lambda_bs) && lambda_bs > 0.0, "network.lambda_bs must be > 0");
    require(finite(h_bs) && h_bs > 0.0, "network.h_bs must be > 0");
    pattern.validate();
    path_loss.validate();
    height_model.validate();
    require(finite(h0) && h0 >= height_model.h_min && h0 <= height_model.h_atom,
            "network.h0 must lie in [h_min, h_atom] = [" + std::to_string(height_model.h_min) +
                ", " + std::to_string(height_model.h_atom) + "]");
    if (exclusion_radius) {
        require(finite(*exclusion_radius) && *exclusion_radius >= 0.0,
                "network.exclusion_radius must be >= 0");
    }
    require(finite(sir_threshold_db), "network.sir_threshold_db must be finite");
    require(approx_order >= 1, "network.approx_order must be >= 1");
}

double NetworkConfig::exclusion_radius_m() const
{
    return exclusion_radius.value_or(mean_cell_radius(lambda_bs));
}

double mean_cell_radius(double lambda_bs) { return std::sqrt(1.0 / (kPi * lambda_bs)); }

double vertical_gain(const AntennaPattern &pattern, double theta_deg)
{
    if (!pattern.enabled) {
        return 1.0;
    }
    pattern.validate();
    return vertical_gain_unchecked(pattern, theta_deg);
}

double vertical_gain_unchecked(const AntennaPattern &pattern, double theta_deg)
{
    if (!pattern.enabled) {
        return 1.0;
    }
    constexpr double tenth_ln10 = 0.23025850929940456840;
    const double off = (theta_deg - pattern.tilt_deg) / pattern.theta3db_deg;
    return std::exp(-tenth_ln10 * std::min(12.0 * off * off, pattern.sll_el_db));
}

double elevation_angle(double h_eff, double r)
{
    if (r <= 0.0) {
        return 90.0;
    }
    return rad_to_deg(std::atan(h_eff / r));
}

double path_loss(const PathLossModel &model, double d)
{
    if (!(d > 0.0)) {
        throw DomainError("path_loss: distance must be > 0");
    }
    return model.scale_c * std::pow(d, -model.exponent_v);
}

double nearest_bs_pdf(double lambda_bs, double x)
{
    if (x < 0.0) {
        return 0.0;
    }
    return 2.0 * kPi * lambda_bs * x * std::exp(-kPi * lambda_bs * x * x);
}

double nearest_bs_cdf(double lambda_bs, double x)
{
    if (x <= 0.0) {
        return 0.0;
    }
    return -std::expm1(-kPi * lambda_bs * x * x);
}

double nearest_bs_quantile(double lambda_bs, double u)
{
    return std::sqrt(-std::log1p(-u) / (kPi * lambda_bs));
}

} // namespace tiltcov
