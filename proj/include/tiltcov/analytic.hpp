// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "tiltcov/geometry.hpp"

namespace tiltcov {

/// Tolerances for the nested coverage quadrature.
struct QuadratureSpec {
    double rel_tol = 1e-6;
    double abs_tol = 1e-9;
    double outer_trunc_mass = 1e-6;   ///< f_R mass dropped beyond the outer limit
    double radial_trunc_factor = 2.0; ///< growth factor of successive radial segments

    void validate() const;
};

struct CoverageResult {
    double p_cov = 0.0;
    std::vector<double> terms; ///< (-1)^(n+1) C(N,n) E_n for n = 1..N
    double err_estimate = 0.0;
    std::size_t evals = 0;
};

/// N (N!)^(-1/N), evaluated through lgamma.
double eta(int n_order);

/// C(n, k) as a double.
double binomial(int n, int k);

/// Signed alternating-sum terms (-1)^(n+1) C(N,n) e_n from the
/// per-order expectations e_1..e_N.
std::vector<double> alternating_terms(std::span<const double> expectations);

/// G_l / G_0 = gain toward an interferer at (h, r) over gain toward the
/// typical user at (h0, x), both under the common tilt.
double gain_ratio(const NetworkConfig &cfg, double h, double r, double h0, double x);

/// E_h[exp(-n eta tau (G_l/G_0) (sqrt(r^2+h^2)/sqrt(x^2+h0^2))^-v)] over the
/// interferer effective-height law.
double inner_expectation_F(const NetworkConfig &cfg, double h0, double r, double x, int n,
                           double tau_lin);

/// 2 pi lambda * integral over r in [R_e, inf) of r (1 - F(h0, r, x, n, tau)) dr.
/// Throws NumericalError when the panel budget is exhausted.
double pgfl_exponent(const NetworkConfig &cfg, double x, int n, double tau_lin,
                     const QuadratureSpec &quad = {});

/// Coverage probability by nested quadrature over serving distance,
/// interferer radius and interferer height.
CoverageResult coverage_probability(const NetworkConfig &cfg, const QuadratureSpec &quad = {});

/// Precomputed geometry of the PGFL exponent for one configuration.
///
/// For fixed tilt, pattern and height law, the exponent depends on
/// (x, n, tau) only through t = n * eta * tau * (x^2 + h0^2)^(v/2) / G_0(x).
/// The kernel evaluates Psi(t_1..t_m) = 2 pi lambda int r (1 - E_h[e^(-t_i q_h(r))]) dr
/// for a batch of t values in one radial pass.
class PgflKernel {
public:
    PgflKernel(const NetworkConfig &cfg, const QuadratureSpec &quad);

    /// Scale s(x) with n and tau factored in: t_n = n * s.
    double scale(double x, double tau_lin) const;

    struct Batch {
        std::vector<double> psi;
        std::vector<double> error;
        std::size_t evals = 0;
    };

    /// Psi at t = n * s for n = 1..count. `radial_floor` is a lower bound on
    /// the first radial segment length (the typical-user distance scale).
    Batch exponents(double s, int count, double radial_floor) const;

    /// Psi at arbitrary t values, each to the relative tolerance alone.
    Batch exponents_at(std::span<const double> ts, double radial_floor) const;

    const NetworkConfig &config() const { return cfg_; }
    double eta_value() const { return eta_; }

private:
    /// q_h(r) for every height node, written to `out`.
    void path_gains(double r, std::span<double> out) const;
    std::span<const double> cached_path_gains(double r) const;

    using RadialFill = std::function<void(std::span<const double>, std::span<double>)>;
    /// Integrates 2 pi lambda r * fill(q(r)) over [R_e, inf) in growing segments.
    Batch integrate_radial(const RadialFill &fill, std::size_t dim, double radial_floor,
                           bool relative_only) const;

    NetworkConfig cfg_;
    QuadratureSpec quad_;
    double eta_;
    double exclusion_;
    std::vector<double> heights_;
    std::vector<double> weights_;
    // Radial node -> offset into gain_store_. Makes exponents() non-reentrant
    // on a shared kernel; use one kernel per thread.
    mutable std::unordered_map<double, std::size_t> gain_index_;
    mutable std::vector<double> gain_store_;
};

/// Coverage at many SIR thresholds for one configuration (tilt included).
///
/// Psi(t) is tabulated once as a Chebyshev interpolant of ln Psi against
/// ln t over the t range the thresholds need, so each threshold then costs
/// only the serving-distance integral.
class ThresholdCoverage {
public:
    ThresholdCoverage(const NetworkConfig &cfg, double tau_min_db, double tau_max_db,
                      const QuadratureSpec &quad = {});

    /// Throws ConfigError for a threshold outside [tau_min_db, tau_max_db].
    CoverageResult coverage(double tau_db) const;

    /// Interpolated Psi(t); +inf once Psi is past the point where exp(-Psi)
    /// no longer matters.
    double psi(double t) const;

    std::size_t table_nodes() const { return ln_psi_.size(); }
    bool converged() const { return converged_; }
    /// Relative error bound on an interpolated Psi.
    double relative_error() const;

private:
    double node(std::size_t k, std::size_t m) const;
    double ln_psi(double u) const;
    static double chebyshev_tail(std::span<const double> values);

    NetworkConfig cfg_;
    QuadratureSpec quad_;
    double tau_min_db_;
    double tau_max_db_;
    double u_lo_ = 0.0;
    double u_hi_ = 0.0;
    double psi_lo_ = 0.0;
    bool saturated_ = false;
    bool converged_ = true;
    double table_err_ = 0.0;
    double quad_err_ = 0.0;
    std::vector<double> ln_psi_;
};

} // namespace tiltcov
