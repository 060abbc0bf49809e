// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------

#include "tiltcov/montecarlo.hpp"

#include <cmath>
#include <random>

#include "tiltcov/errors.hpp"
#include "tiltcov/parallel.hpp"

namespace tiltcov {

void McCampaign::validate(const NetworkConfig &cfg) const
{
    if (trials < 1) {
        throw ConfigError("campaign.trials must be >= 1");
    }
    const double w = window_radius_m(cfg);
    if (!std::isfinite(w) || !(w > cfg.exclusion_radius_m())) {
        throw ConfigError("campaign.window_radius must exceed the exclusion radius");
    }
}

double McCampaign::window_radius_m(const NetworkConfig &cfg) const
{
    return window_radius.value_or(10.0 * mean_cell_radius(cfg.lambda_bs));
}

double ci_halfwidth_95(double p_hat, std::uint64_t trials)
{
    return 1.96 * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
}

namespace {

double received(const NetworkConfig &cfg, double h, double r)
{
    return cfg.path_loss.scale_c * vertical_gain_unchecked(cfg.pattern, elevation_angle(h, r)) *
           std::pow(r * r + h * h, -0.5 * cfg.path_loss.exponent_v);
}

} // namespace

double sir_of(const NetworkConfig &cfg, double x, std::span<const Interferer> interferers)
{
    double interference = 0.0;
    for (const Interferer &i : interferers) {
        interference += received(cfg, i.h, i.r);
    }
    if (interferers.empty()) {
        return kNoInterferenceSir;
    }
    return received(cfg, cfg.h0, x) / interference;
}

TrialOutcome realize_trial(const NetworkConfig &cfg, RandomStream &rng, double window_radius)
{
    const double lambda = cfg.lambda_bs;
    const double re = cfg.exclusion_radius_m();

    const double x = nearest_bs_quantile(lambda, rng.uniform());
    const double signal = received(cfg, cfg.h0, x);

    const double re_sq = re * re;
    const double span_sq = window_radius * window_radius - re_sq;
    std::poisson_distribution<std::uint64_t> count_law(lambda * kPi * span_sq);
    const std::uint64_t count = count_law(rng);

    double interference = 0.0;
    for (std::uint64_t l = 0; l < count; ++l) {
        // Uniform in the annulus: r^2 is uniform on [R_e^2, W^2].
        const double r = std::sqrt(re_sq + rng.uniform() * span_sq);
        const double h = cfg.height_model.sample(rng);
        interference += received(cfg, h, r);
    }

    TrialOutcome out;
    out.interferers = count;
    out.sir = count == 0 ? kNoInterferenceSir : signal / interference;
    return out;
}

std::vector<McEstimate> estimate_coverage(const NetworkConfig &cfg, const McCampaign &campaign,
                                          std::span<const double> tau_grid_db, int jobs)
{
    cfg.validate();
    campaign.validate(cfg);
    if (tau_grid_db.empty()) {
        throw ConfigError("estimate_coverage: threshold grid is empty");
    }
    const double window = campaign.window_radius_m(cfg);
    const std::uint64_t trials = campaign.trials;

    std::vector<double> sir(trials);
    parallel_for(static_cast<std::size_t>(trials), jobs, [&](std::size_t i) {
        RandomStream rng(campaign.seed, i);
        sir[i] = realize_trial(cfg, rng, window).sir;
    });

    std::vector<McEstimate> out;
    out.reserve(tau_grid_db.size());
    for (double tau_db : tau_grid_db) {
        const double tau = db_to_linear(tau_db);
        std::uint64_t covered = 0;
        for (double s : sir) {
            covered += s > tau ? 1 : 0;
        }
        McEstimate est;
        est.tau_db = tau_db;
        est.p_cov_hat = static_cast<double>(covered) / static_cast<double>(trials);
        est.ci_halfwidth_95 = ci_halfwidth_95(est.p_cov_hat, trials);
        out.push_back(std::move(est));
    }
    if (campaign.record_sir) {
        std::vector<double> db(sir.size());
        for (std::size_t i = 0; i < sir.size(); ++i) {
            db[i] = linear_to_db(sir[i]);
        }
        for (auto &est : out) {
            est.sir_samples_db = db;
        }
    }
    return out;
}

} // namespace tiltcov
