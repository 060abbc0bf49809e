// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------

#include "tiltcov/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "tiltcov/errors.hpp"
#include "tiltcov/quadrature.hpp"

namespace tiltcov {

namespace {

constexpr int kHeightNodes = 64;
constexpr std::size_t kRadialPanelCap = 1'000'000;
constexpr std::size_t kOuterPanelCap = 100'000;
// Panel rule for the radial and serving-distance integrals.
constexpr int kPanelOrder = 8;

double serving_gain(const NetworkConfig &cfg, double h0, double x)
{
    return vertical_gain_unchecked(cfg.pattern, elevation_angle(h0, x));
}

} // namespace

void QuadratureSpec::validate() const
{
    if (!(rel_tol > 0.0 && rel_tol < 1.0) || !(abs_tol > 0.0 && abs_tol < 1.0)) {
        throw ConfigError("quadrature: tolerances must lie in (0, 1)");
    }
    if (!(outer_trunc_mass > 0.0 && outer_trunc_mass <= 1e-4)) {
        throw ConfigError("quadrature.outer_trunc_mass must lie in (0, 1e-4]");
    }
    if (!(radial_trunc_factor > 1.0) || !std::isfinite(radial_trunc_factor)) {
        throw ConfigError("quadrature.radial_trunc_factor must be > 1");
    }
}

double eta(int n_order)
{
    if (n_order < 1) {
        throw DomainError("eta: approximation order must be >= 1");
    }
    const double n = n_order;
    return n * std::exp(-std::lgamma(n + 1.0) / n);
}

double binomial(int n, int k)
{
    if (k < 0 || k > n) {
        return 0.0;
    }
    k = std::min(k, n - k);
    double out = 1.0;
    for (int i = 1; i <= k; ++i) {
        out = out * (n - k + i) / i;
    }
    return std::round(out);
}

std::vector<double> alternating_terms(std::span<const double> expectations)
{
    const int order = static_cast<int>(expectations.size());
    std::vector<double> terms(expectations.size());
    for (int n = 1; n <= order; ++n) {
        const double sign = (n % 2 == 1) ? 1.0 : -1.0;
        terms[n - 1] = sign * binomial(order, n) * expectations[n - 1];
    }
    return terms;
}

double gain_ratio(const NetworkConfig &cfg, double h, double r, double h0, double x)
{
    return vertical_gain_unchecked(cfg.pattern, elevation_angle(h, r)) / serving_gain(cfg, h0, x);
}

// ---------------------------------------------------------------- kernel

PgflKernel::PgflKernel(const NetworkConfig &cfg, const QuadratureSpec &quad)
    : cfg_(cfg), quad_(quad), eta_(eta(cfg.approx_order)), exclusion_(cfg.exclusion_radius_m())
{
    const HeightModel &hm = cfg.height_model;
    if (hm.a > 0.0) {
        const GaussLegendreRule &rule = GaussLegendreRule::cached(kHeightNodes);
        const double half = 0.5 * (hm.h_max - hm.h_min);
        const double mid = 0.5 * (hm.h_max + hm.h_min);
        const double z = hm.raw_mass();
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double h = mid + half * rule.nodes[i];
            heights_.push_back(h);
            weights_.push_back(hm.a * rule.weights[i] * half * std::max(0.0, hm.b * h + hm.c) / z);
        }
    }
    if (hm.a < 1.0) {
        heights_.push_back(hm.h_atom);
        weights_.push_back(1.0 - hm.a);
    }
}

double PgflKernel::scale(double x, double tau_lin) const
{
    const double d0_sq = x * x + cfg_.h0 * cfg_.h0;
    return eta_ * tau_lin * std::pow(d0_sq, 0.5 * cfg_.path_loss.exponent_v) /
           (cfg_.path_loss.scale_c * serving_gain(cfg_, cfg_.h0, x));
}

void PgflKernel::path_gains(double r, std::span<double> out) const
{
    const double half_v = 0.5 * cfg_.path_loss.exponent_v;
    for (std::size_t j = 0; j < heights_.size(); ++j) {
        const double h = heights_[j];
        const double g = vertical_gain_unchecked(cfg_.pattern, elevation_angle(h, r));
        out[j] = cfg_.path_loss.scale_c * g * std::exp(-half_v * std::log(r * r + h * h));
    }
}

std::span<const double> PgflKernel::cached_path_gains(double r) const
{
    const std::size_t nodes = heights_.size();
    auto [it, inserted] = gain_index_.try_emplace(r, gain_store_.size());
    if (inserted) {
        gain_store_.resize(gain_store_.size() + nodes);
        path_gains(r, std::span<double>(gain_store_).subspan(it->second, nodes));
    }
    return std::span<const double>(gain_store_).subspan(it->second, nodes);
}

PgflKernel::Batch PgflKernel::integrate_radial(const RadialFill &fill, std::size_t dim,
                                               double radial_floor, bool relative_only) const
{
    const double two_pi_lambda = 2.0 * kPi * cfg_.lambda_bs;
    auto integrand = [&](double r, std::span<double> out) {
        fill(cached_path_gains(r), out);
        for (auto &v : out) {
            v *= two_pi_lambda * r;
        }
    };

    AdaptiveOptions opt;
    opt.abs_tol = relative_only ? 0.0 : quad_.abs_tol;
    opt.rel_tol = quad_.rel_tol;
    opt.order = kPanelOrder;

    const double factor = quad_.radial_trunc_factor;
    // Segment edges do not depend on t, so radial nodes repeat across calls
    // and their path gains come from the cache.
    const double geometry_scale =
        std::max({cfg_.height_model.h_max, cfg_.height_model.h_atom, 1.0});
    // Beyond this radius every interferer sits within a fraction of a degree
    // of the horizon, so segment contributions decay like r^(2 - v).
    const double min_reach = exclusion_ + 100.0 * std::max(geometry_scale, radial_floor);
    const double rho = std::pow(factor, 2.0 - cfg_.path_loss.exponent_v);

    Batch out;
    out.psi.assign(dim, 0.0);
    out.error.assign(dim, 0.0);
    std::size_t panels = 0;
    double lo = exclusion_;
    double hi = std::max(exclusion_ * factor, exclusion_ + geometry_scale);
    for (;;) {
        AdaptiveOptions seg_opt = opt;
        seg_opt.max_panels = kRadialPanelCap - std::min(panels, kRadialPanelCap - 1);
        AdaptiveResult seg = integrate_adaptive(integrand, lo, hi, dim, seg_opt);
        panels += seg.panels;
        out.evals += seg.evals;
        bool negligible = true;
        for (std::size_t k = 0; k < dim; ++k) {
            out.psi[k] += seg.value[k];
            out.error[k] += seg.error[k];
            const double cut = relative_only ? quad_.rel_tol * out.psi[k] : quad_.abs_tol;
            negligible = negligible && std::abs(seg.value[k]) <= cut;
        }
        if (!seg.converged || panels >= kRadialPanelCap) {
            throw NumericalError("pgfl radial integral exceeded its panel budget at r = " +
                                     std::to_string(hi),
                                 out.psi.empty() ? 0.0 : out.psi.back());
        }
        if (hi >= min_reach && negligible) {
            // Geometric bound on the neglected tail.
            for (std::size_t k = 0; k < dim; ++k) {
                out.error[k] += std::abs(seg.value[k]) * rho / (1.0 - rho);
            }
            break;
        }
        lo = hi;
        hi *= factor;
    }
    return out;
}

PgflKernel::Batch PgflKernel::exponents(double s, int count, double radial_floor) const
{
    const auto dim = static_cast<std::size_t>(count);
    const std::size_t nodes = heights_.size();
    auto fill = [&](std::span<const double> q, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t j = 0; j < nodes; ++j) {
            // 1 - e^n = (1 - e) (1 + e + ... + e^(n-1)) keeps full relative
            // precision when s q is tiny.
            const double om = -std::expm1(-s * q[j]);
            const double e = 1.0 - om;
            double geom = 1.0;
            for (std::size_t n = 0; n < dim; ++n) {
                out[n] += weights_[j] * om * geom;
                geom = 1.0 + e * geom;
            }
        }
    };
    return integrate_radial(fill, dim, radial_floor, false);
}

PgflKernel::Batch PgflKernel::exponents_at(std::span<const double> ts, double radial_floor) const
{
    const std::size_t nodes = heights_.size();
    auto fill = [&](std::span<const double> q, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t j = 0; j < nodes; ++j) {
            for (std::size_t k = 0; k < ts.size(); ++k) {
                out[k] -= weights_[j] * std::expm1(-ts[k] * q[j]);
            }
        }
    };
    return integrate_radial(fill, ts.size(), radial_floor, true);
}

// ---------------------------------------------------------------- public ops

double inner_expectation_F(const NetworkConfig &cfg, double h0, double r, double x, int n,
                           double tau_lin)
{
    const HeightModel &hm = cfg.height_model;
    const double v = cfg.path_loss.exponent_v;
    const double g0 = serving_gain(cfg, h0, x);
    const double d0_sq = x * x + h0 * h0;
    const double rate = n * eta(cfg.approx_order) * tau_lin;

    auto term = [&](double h) {
        const double ratio = vertical_gain_unchecked(cfg.pattern, elevation_angle(h, r)) / g0;
        const double dist = std::pow((r * r + h * h) / d0_sq, -0.5 * v);
        return std::exp(-rate * ratio * dist);
    };

    double f = 0.0;
    if (hm.a > 0.0) {
        const GaussLegendreRule &rule = GaussLegendreRule::cached(kHeightNodes);
        const double half = 0.5 * (hm.h_max - hm.h_min);
        const double mid = 0.5 * (hm.h_max + hm.h_min);
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double h = mid + half * rule.nodes[i];
            acc += rule.weights[i] * half * std::max(0.0, hm.b * h + hm.c) * term(h);
        }
        f += hm.a * acc / hm.raw_mass();
    }
    if (hm.a < 1.0) {
        f += (1.0 - hm.a) * term(hm.h_atom);
    }
    return f;
}

double pgfl_exponent(const NetworkConfig &cfg, double x, int n, double tau_lin,
                     const QuadratureSpec &quad)
{
    PgflKernel kernel(cfg, quad);
    const double s = n * kernel.scale(x, tau_lin);
    return kernel.exponents(s, 1, std::sqrt(x * x + cfg.h0 * cfg.h0)).psi[0];
}

namespace {

double outer_limit(const NetworkConfig &cfg, const QuadratureSpec &quad)
{
    return std::sqrt(-std::log(quad.outer_trunc_mass) / (kPi * cfg.lambda_bs));
}

// Fills psi[n-1] and its error bound for n = 1..N at serving distance x;
// returns the number of integrand evaluations spent.
using ExponentFn = std::function<std::size_t(double, std::span<double>, std::span<double>)>;

// Outer integral over the serving distance, shared by the direct and the
// tabulated evaluation of Psi.
CoverageResult outer_coverage(const NetworkConfig &cfg, const QuadratureSpec &quad,
                              const ExponentFn &exponents)
{
    const int order = cfg.approx_order;
    const auto dim = static_cast<std::size_t>(order);
    const double lambda = cfg.lambda_bs;
    const double x_up = outer_limit(cfg, quad);

    std::vector<double> mid_err(dim, 0.0);
    std::vector<double> psi(dim);
    std::vector<double> psi_err(dim);
    std::size_t evals = 0;
    auto outer = [&](double x, std::span<double> out) {
        const double fr = nearest_bs_pdf(lambda, x);
        evals += exponents(x, psi, psi_err);
        for (std::size_t n = 0; n < dim; ++n) {
            const double e = std::exp(-psi[n]);
            out[n] = e * fr;
            // |d exp(-psi)| <= exp(-psi) |d psi|
            mid_err[n] = std::max(mid_err[n], e * psi_err[n]);
        }
    };

    AdaptiveOptions opt;
    opt.abs_tol = quad.abs_tol;
    opt.rel_tol = quad.rel_tol;
    opt.order = kPanelOrder;
    opt.max_panels = kOuterPanelCap;
    // G_0(x) has kinks where the serving angle crosses the side-lobe clip.
    std::vector<double> edges{0.0, x_up};
    if (cfg.pattern.enabled) {
        const double reach =
            cfg.pattern.theta3db_deg * std::sqrt(cfg.pattern.sll_el_db / 12.0);
        for (double theta : {cfg.pattern.tilt_deg - reach, cfg.pattern.tilt_deg + reach}) {
            if (theta > 0.0 && theta < 90.0) {
                const double x = cfg.h0 / std::tan(deg_to_rad(theta));
                if (x > 0.0 && x < x_up) {
                    edges.push_back(x);
                }
            }
        }
    }
    std::sort(edges.begin(), edges.end());
    AdaptiveResult res = integrate_adaptive_panels(outer, edges, dim, opt);

    CoverageResult cr;
    cr.terms = alternating_terms(res.value);
    cr.evals = evals;
    double sum = 0.0;
    for (double t : cr.terms) {
        sum += t;
    }
    double err = 0.0;
    for (int n = 1; n <= order; ++n) {
        const std::size_t k = static_cast<std::size_t>(n - 1);
        err += binomial(order, n) * (res.error[k] + mid_err[k] + quad.outer_trunc_mass);
    }
    cr.err_estimate = err;
    cr.p_cov = std::clamp(sum, 0.0, 1.0);
    if (!res.converged) {
        throw NumericalError("coverage outer integral exceeded its panel budget", cr.p_cov);
    }
    return cr;
}

} // namespace

CoverageResult coverage_probability(const NetworkConfig &cfg, const QuadratureSpec &quad)
{
    cfg.validate();
    quad.validate();
    const double tau = cfg.sir_threshold_linear();
    PgflKernel kernel(cfg, quad);
    auto exponents = [&](double x, std::span<double> psi, std::span<double> err) {
        const double s = kernel.scale(x, tau);
        PgflKernel::Batch b = kernel.exponents(s, cfg.approx_order,
                                               std::sqrt(x * x + cfg.h0 * cfg.h0));
        std::copy(b.psi.begin(), b.psi.end(), psi.begin());
        std::copy(b.error.begin(), b.error.end(), err.begin());
        return b.evals;
    };
    return outer_coverage(cfg, quad, exponents);
}

// ---------------------------------------------------------------- threshold table

namespace {

// Above this exponent exp(-Psi) < 1e-26 and the table stops.
constexpr double kPsiCeiling = 60.0;
constexpr std::size_t kTableStartNodes = 32;
constexpr std::size_t kTableMaxNodes = 1024;

} // namespace

ThresholdCoverage::ThresholdCoverage(const NetworkConfig &cfg, double tau_min_db,
                                     double tau_max_db, const QuadratureSpec &quad)
    : cfg_(cfg), quad_(quad), tau_min_db_(tau_min_db), tau_max_db_(tau_max_db)
{
    cfg_.validate();
    quad_.validate();
    if (!(std::isfinite(tau_min_db) && std::isfinite(tau_max_db) && tau_min_db <= tau_max_db)) {
        throw ConfigError("threshold range must be finite with min <= max");
    }
    // The table is built tighter than the requested tolerance so that its
    // interpolation error stays below the direct path's quadrature error.
    QuadratureSpec table_quad = quad_;
    table_quad.rel_tol = std::min(quad_.rel_tol, 1e-8);
    const PgflKernel kernel(cfg_, table_quad);

    const double eta_n = kernel.eta_value();
    const double v = cfg_.path_loss.exponent_v;
    const double x_up = outer_limit(cfg_, quad_);
    const double floor_gain = cfg_.pattern.enabled
                                  ? std::pow(10.0, -0.1 * cfg_.pattern.sll_el_db)
                                  : 1.0;
    const double d_min = std::max(cfg_.h0, 1.0);
    const double c = cfg_.path_loss.scale_c;
    const double t_lo = eta_n * db_to_linear(tau_min_db) * std::pow(d_min, v) / c;
    const double t_hi = cfg_.approx_order * eta_n * db_to_linear(tau_max_db) *
                        std::pow(x_up * x_up + cfg_.h0 * cfg_.h0, 0.5 * v) / (c * floor_gain);
    const double radial_floor = d_min;

    auto psi_at = [&](double u) {
        const double t = std::exp(u);
        PgflKernel::Batch b = kernel.exponents_at(std::span<const double>(&t, 1), radial_floor);
        return b.psi[0];
    };

    u_lo_ = std::log(t_lo);
    u_hi_ = std::log(std::max(t_hi, t_lo * (1.0 + 1e-9)));
    psi_lo_ = psi_at(u_lo_);
    if (psi_lo_ >= kPsiCeiling) {
        // Every lookup saturates.
        u_hi_ = u_lo_;
        saturated_ = true;
        return;
    }
    if (psi_at(u_hi_) > kPsiCeiling) {
        // Psi is increasing in t: bisect for the ceiling in ln t.
        double lo = u_lo_;
        double hi = u_hi_;
        while (hi - lo > 1e-3) {
            const double mid = 0.5 * (lo + hi);
            (psi_at(mid) > kPsiCeiling ? hi : lo) = mid;
        }
        u_hi_ = hi;
    }

    // Chebyshev-Lobatto nodes, doubled until the trailing coefficients of
    // ln Psi fall below the target.
    const double target = std::max(10.0 * table_quad.rel_tol, 1e-12);
    std::size_t m = kTableStartNodes;
    std::vector<double> values;
    for (;;) {
        std::vector<double> need;
        std::vector<std::size_t> slot;
        std::vector<double> next(m + 1);
        for (std::size_t k = 0; k <= m; ++k) {
            if (!values.empty() && k % 2 == 0) {
                next[k] = values[k / 2];
                continue;
            }
            need.push_back(std::exp(node(k, m)));
            slot.push_back(k);
        }
        PgflKernel::Batch b = kernel.exponents_at(need, radial_floor);
        for (std::size_t i = 0; i < need.size(); ++i) {
            if (!(b.psi[i] > 0.0)) {
                throw NumericalError("threshold table: non-positive exponent", 0.0);
            }
            next[slot[i]] = std::log(b.psi[i]);
            quad_err_ = std::max(quad_err_, b.error[i] / b.psi[i]);
        }
        values = std::move(next);
        const double tail = chebyshev_tail(values);
        table_err_ = tail;
        if (tail <= target || m >= kTableMaxNodes) {
            converged_ = tail <= target;
            break;
        }
        m *= 2;
    }
    ln_psi_ = std::move(values);
}

double ThresholdCoverage::node(std::size_t k, std::size_t m) const
{
    const double c = 0.5 * (u_lo_ + u_hi_);
    const double h = 0.5 * (u_hi_ - u_lo_);
    return c + h * std::cos(kPi * static_cast<double>(k) / static_cast<double>(m));
}

double ThresholdCoverage::chebyshev_tail(std::span<const double> values)
{
    // Coefficients by the discrete cosine transform on Lobatto nodes; the
    // largest of the last few measures the truncation error.
    const std::size_t m = values.size() - 1;
    const std::size_t probe = 4;
    double tail = 0.0;
    for (std::size_t j = m + 1 - probe; j <= m; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k <= m; ++k) {
            const double w = (k == 0 || k == m) ? 0.5 : 1.0;
            acc += w * values[k] *
                   std::cos(kPi * static_cast<double>(j * k % (2 * m)) / static_cast<double>(m));
        }
        const double scale = (j == m) ? 1.0 : 2.0;
        tail = std::max(tail, std::abs(scale * acc / static_cast<double>(m)));
    }
    return tail;
}

double ThresholdCoverage::ln_psi(double u) const
{
    // Barycentric interpolation on Lobatto nodes.
    const std::size_t m = ln_psi_.size() - 1;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
        const double diff = u - node(k, m);
        if (diff == 0.0) {
            return ln_psi_[k];
        }
        double w = (k % 2 == 0) ? 1.0 : -1.0;
        if (k == 0 || k == m) {
            w *= 0.5;
        }
        num += w * ln_psi_[k] / diff;
        den += w / diff;
    }
    return num / den;
}

double ThresholdCoverage::psi(double t) const
{
    const double u = std::log(t);
    if (saturated_ || u > u_hi_) {
        return std::numeric_limits<double>::infinity();
    }
    if (u < u_lo_) {
        // Psi is linear in t for small t.
        return psi_lo_ * std::exp(u - u_lo_);
    }
    return std::exp(ln_psi(u));
}

double ThresholdCoverage::relative_error() const { return table_err_ + quad_err_; }

CoverageResult ThresholdCoverage::coverage(double tau_db) const
{
    if (!(tau_db >= tau_min_db_ - 1e-12 && tau_db <= tau_max_db_ + 1e-12)) {
        throw ConfigError("threshold outside the tabulated range");
    }
    const double tau = db_to_linear(tau_db);
    const double eta_n = eta(cfg_.approx_order);
    const double v = cfg_.path_loss.exponent_v;
    const double rel = relative_error();
    auto exponents = [&](double x, std::span<double> psi_out, std::span<double> err) {
        const double s = eta_n * tau * std::pow(x * x + cfg_.h0 * cfg_.h0, 0.5 * v) /
                         (cfg_.path_loss.scale_c * serving_gain(cfg_, cfg_.h0, x));
        for (std::size_t n = 0; n < psi_out.size(); ++n) {
            const double p = psi(static_cast<double>(n + 1) * s);
            psi_out[n] = p;
            err[n] = std::isfinite(p) ? rel * p : 0.0;
        }
        return std::size_t{0};
    };
    CoverageResult cr = outer_coverage(cfg_, quad_, exponents);
    // Saturated lookups contribute at most exp(-ceiling) each.
    cr.err_estimate += std::exp(-kPsiCeiling) * std::pow(2.0, cfg_.approx_order);
    return cr;
}

} // namespace tiltcov
