// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------

#include "tiltcov/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <span>

#include "tiltcov/errors.hpp"
#include "tiltcov/parallel.hpp"

namespace tiltcov {

namespace {

// (p, -beta) lexicographic: higher coverage wins, then the smaller tilt.
bool better(double p, double beta, double p_ref, double beta_ref)
{
    if (p != p_ref) {
        return p > p_ref;
    }
    return beta < beta_ref;
}

std::size_t grid_argmax(std::span<const double> betas, std::span<const double> p)
{
    std::size_t idx = 0;
    for (std::size_t i = 1; i < betas.size(); ++i) {
        if (better(p[i], betas[i], p[idx], betas[idx])) {
            idx = i;
        }
    }
    return idx;
}

std::string tilt_tag(double beta)
{
    std::ostringstream os;
    os << "tilt " << beta << " deg: ";
    return os.str();
}

double evaluate_at(const NetworkConfig &cfg, const TiltSearchSpec &spec, double beta, int jobs)
{
    NetworkConfig local = cfg;
    local.pattern.tilt_deg = beta;
    TiltSearchSpec inner = spec;
    inner.jobs = jobs;
    try {
        return evaluate_coverage(local, inner);
    } catch (const NumericalError &e) {
        throw NumericalError(tilt_tag(beta) + e.what(), e.partial());
    }
}

} // namespace

std::string to_string(Evaluator e)
{
    return e == Evaluator::analytic ? "analytic" : "montecarlo";
}

void TiltSearchSpec::validate() const
{
    if (!(grid_step_deg > 0.0 && grid_step_deg <= 90.0)) {
        throw ConfigError("search.grid_step_deg must lie in (0, 90]");
    }
    if (!(refine_tol_deg > 0.0)) {
        throw ConfigError("search.refine_tol_deg must be > 0");
    }
    for (double b : betas_deg) {
        if (!(b >= 0.0 && b <= 90.0)) {
            throw ConfigError("search grid tilts must lie in [0, 90]");
        }
    }
    quad.validate();
    if (jobs < 1) {
        throw ConfigError("jobs must be >= 1");
    }
}

std::vector<double> TiltSearchSpec::grid() const
{
    std::vector<double> g;
    if (!betas_deg.empty()) {
        g = betas_deg;
    } else {
        const auto steps = static_cast<long>(std::floor(90.0 / grid_step_deg + 1e-9));
        for (long i = 0; i <= steps; ++i) {
            g.push_back(std::min(90.0, static_cast<double>(i) * grid_step_deg));
        }
        if (g.back() < 90.0) {
            g.push_back(90.0);
        }
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

double evaluate_coverage(const NetworkConfig &cfg, const TiltSearchSpec &spec)
{
    if (spec.evaluator == Evaluator::analytic) {
        return coverage_probability(cfg, spec.quad).p_cov;
    }
    const double tau[] = {cfg.sir_threshold_db};
    McCampaign campaign = spec.campaign;
    campaign.record_sir = false;
    return estimate_coverage(cfg, campaign, tau, spec.jobs).front().p_cov_hat;
}

TiltProfile sweep_tilt(const NetworkConfig &cfg, const TiltSearchSpec &spec)
{
    cfg.validate();
    spec.validate();
    TiltProfile prof;
    prof.betas_deg = spec.grid();
    prof.p_cov.assign(prof.betas_deg.size(), 0.0);

    // Analytic points are independent and go to the pool; a Monte Carlo
    // point already parallelizes over its trials.
    if (spec.evaluator == Evaluator::analytic) {
        parallel_for(prof.betas_deg.size(), spec.jobs, [&](std::size_t i) {
            prof.p_cov[i] = evaluate_at(cfg, spec, prof.betas_deg[i], 1);
        });
    } else {
        for (std::size_t i = 0; i < prof.betas_deg.size(); ++i) {
            prof.p_cov[i] = evaluate_at(cfg, spec, prof.betas_deg[i], spec.jobs);
        }
    }

    const std::size_t k = grid_argmax(prof.betas_deg, prof.p_cov);
    prof.beta_star_deg = prof.betas_deg[k];
    prof.p_star = prof.p_cov[k];
    return prof;
}

namespace {

// Golden-section search on the grid interval bracketing the grid argmax.
template <class Eval>
TiltOptimum refine_golden(std::span<const double> betas, std::span<const double> p, double tol,
                          Eval &&f)
{
    const std::size_t idx = grid_argmax(betas, p);
    TiltOptimum best{betas[idx], p[idx]};
    if (betas.size() < 2) {
        return best;
    }
    double lo = betas[idx == 0 ? 0 : idx - 1];
    double hi = betas[std::min(idx + 1, betas.size() - 1)];
    auto consider = [&](double beta, double pv) {
        if (better(pv, beta, best.p_star, best.beta_star_deg)) {
            best = {beta, pv};
        }
    };

    constexpr double inv_phi = 0.61803398874989484820;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    consider(c, fc);
    consider(d, fd);
    while (hi - lo > tol) {
        if (fc >= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
            consider(c, fc);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
            consider(d, fd);
        }
    }
    return best;
}

} // namespace

TiltOptimum refine_tilt(const NetworkConfig &cfg, const TiltSearchSpec &spec,
                        const TiltProfile &prof)
{
    if (prof.betas_deg.empty() || prof.betas_deg.size() != prof.p_cov.size()) {
        throw ConfigError("refine_tilt: malformed tilt profile");
    }
    if (!spec.refine) {
        const std::size_t k = grid_argmax(prof.betas_deg, prof.p_cov);
        return {prof.betas_deg[k], prof.p_cov[k]};
    }
    return refine_golden(prof.betas_deg, prof.p_cov, spec.refine_tol_deg,
                         [&](double beta) { return evaluate_at(cfg, spec, beta, spec.jobs); });
}

TiltOptimum optimize_tilt(const NetworkConfig &cfg, const TiltSearchSpec &spec)
{
    return refine_tilt(cfg, spec, sweep_tilt(cfg, spec));
}

std::vector<ThresholdOptimum> optimize_tilt_per_threshold(const NetworkConfig &cfg,
                                                          const TiltSearchSpec &spec,
                                                          std::span<const double> tau_grid_db)
{
    std::vector<ThresholdOptimum> out;
    out.reserve(tau_grid_db.size());
    if (tau_grid_db.empty()) {
        return out;
    }
    if (spec.evaluator == Evaluator::montecarlo) {
        for (double tau_db : tau_grid_db) {
            NetworkConfig local = cfg;
            local.sir_threshold_db = tau_db;
            const TiltOptimum opt = optimize_tilt(local, spec);
            out.push_back({tau_db, opt.beta_star_deg, opt.p_star});
        }
        return out;
    }

    cfg.validate();
    spec.validate();
    for (double tau_db : tau_grid_db) {
        if (!std::isfinite(tau_db)) {
            throw ConfigError("SIR thresholds must be finite");
        }
    }
    const auto [tmin, tmax] = std::minmax_element(tau_grid_db.begin(), tau_grid_db.end());
    const std::vector<double> betas = spec.grid();
    const std::size_t nt = tau_grid_db.size();

    // One Psi table per grid tilt serves every threshold.
    std::vector<double> table(betas.size() * nt);
    parallel_for(betas.size(), spec.jobs, [&](std::size_t i) {
        NetworkConfig local = cfg;
        local.pattern.tilt_deg = betas[i];
        try {
            const ThresholdCoverage tc(local, *tmin, *tmax, spec.quad);
            for (std::size_t j = 0; j < nt; ++j) {
                table[j * betas.size() + i] = tc.coverage(tau_grid_db[j]).p_cov;
            }
        } catch (const NumericalError &e) {
            throw NumericalError(tilt_tag(betas[i]) + e.what(), e.partial());
        }
    });

    out.resize(nt);
    parallel_for(nt, spec.jobs, [&](std::size_t j) {
        const double tau_db = tau_grid_db[j];
        const std::span<const double> p(table.data() + j * betas.size(), betas.size());
        auto f = [&](double beta) {
            NetworkConfig local = cfg;
            local.pattern.tilt_deg = beta;
            try {
                return ThresholdCoverage(local, tau_db, tau_db, spec.quad).coverage(tau_db).p_cov;
            } catch (const NumericalError &e) {
                throw NumericalError(tilt_tag(beta) + e.what(), e.partial());
            }
        };
        TiltOptimum opt;
        if (spec.refine) {
            opt = refine_golden(betas, p, spec.refine_tol_deg, f);
        } else {
            const std::size_t k = grid_argmax(betas, p);
            opt = {betas[k], p[k]};
        }
        out[j] = {tau_db, opt.beta_star_deg, opt.p_star};
    });
    return out;
}

} // namespace tiltcov
