// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------
//
// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Takes several minutes on one core.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tiltcov/analytic.hpp"
#include "tiltcov/experiment.hpp"
#include "tiltcov/geometry.hpp"
#include "tiltcov/montecarlo.hpp"
#include "tiltcov/optimizer.hpp"
#include "tiltcov/rng.hpp"

using namespace tiltcov;

namespace {

// Pinned tolerances.
constexpr double kOracleFloor = 0.03;      // 1: |analytic - mc| <= max(floor, k * CI)
constexpr double kOracleCiMultiple = 3.0;
constexpr std::uint64_t kOracleTrials = 200'000;
constexpr double kIdentityTol = 1e-12;     // 2
constexpr double kLowTauFloor = 0.999;     // 3: p(-60 dB) >= floor
constexpr double kHighTauCeil = 0.001;     //    p(+60 dB) <= ceil
constexpr double kMcTiltStepDeg = 10.0;    //    simulated tilt subgrid
constexpr double kDistinctDeg = 0.5;       // 4
constexpr double kKsMax = 0.005;           // 6
constexpr double kAtomTol = 0.002;
constexpr int kDistSamples = 1'000'000;
constexpr double kScaleTol = 1e-12;        // 8

struct Verdict {
    bool pass = true;
    std::string detail;
};

int g_failed = 0;

void report(int id, const std::string &title, const std::function<Verdict()> &check)
{
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = check();
    } catch (const std::exception &e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    while (v.detail.size() >= 2 && v.detail.compare(v.detail.size() - 2, 2, "; ") == 0) {
        v.detail.resize(v.detail.size() - 2);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s [%d] %s: %s (%.0f s)\n", v.pass ? "PASS" : "FAIL", id, title.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
    g_failed += v.pass ? 0 : 1;
}

std::string num(double v, int prec = 4)
{
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

const ExperimentSpec &builtin(const std::string &id)
{
    static const std::vector<ExperimentSpec> all = emit_builtin_scenarios();
    for (const ExperimentSpec &s : all) {
        if (s.scenario == id) {
            return s;
        }
    }
    throw std::runtime_error("no built-in scenario " + id);
}

NetworkConfig case_config(const ExperimentSpec &spec, const HeightCase &hc)
{
    NetworkConfig cfg = spec.network;
    cfg.height_model.a = hc.a;
    cfg.h0 = hc.h0;
    return cfg;
}

// Analytic tilt profile of every height case of a tilt scenario.
std::map<std::string, TiltProfile> tilt_profiles(const std::string &id)
{
    ExperimentSpec spec = builtin(id);
    spec.evaluators = {Evaluator::analytic};
    const ExperimentResult res = run_experiment(spec);
    if (!res.failures.empty()) {
        throw std::runtime_error(res.failures.front());
    }
    std::map<std::string, TiltProfile> out;
    for (const ResultRow &r : res.rows) {
        TiltProfile &p = out[r.height_case];
        p.betas_deg.push_back(r.axis_value);
        p.p_cov.push_back(*r.p_cov);
    }
    for (auto &[label, p] : out) {
        const auto it = std::max_element(p.p_cov.begin(), p.p_cov.end());
        p.beta_star_deg = p.betas_deg[static_cast<std::size_t>(it - p.p_cov.begin())];
        p.p_star = *it;
    }
    return out;
}

std::string csv_without_stamp(const ExperimentSpec &spec)
{
    std::ostringstream os;
    write_csv(os, spec, run_experiment(spec), "");
    std::istringstream in(os.str());
    std::string out;
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("# generated:", 0) != 0) {
            out += line + "\n";
        }
    }
    return out;
}

// Reduced versions of the built-ins, small enough to run several times.
std::vector<ExperimentSpec> reduced_scenarios()
{
    ExperimentSpec tilt = builtin("fig4");
    tilt.grid = {0.0, 10.0, 20.0, 40.0, 90.0};
    tilt.campaign.trials = 20'000;
    ExperimentSpec thr = builtin("fig6");
    thr.grid = {-10.0, 4.0, 20.0};
    thr.campaign.trials = 20'000;
    thr.search.grid_step_deg = 2.0;
    return {tilt, thr};
}

Verdict oracle_agreement()
{
    Verdict v;
    double worst_excess = -1.0;
    std::string worst;
    int n = 0;
    for (double lambda : {1e-6, 5e-5}) {
        for (double a : {0.0, 1.0}) {
            for (double h0 : {10.0, 30.5}) {
                for (double beta : {5.0, 15.0, 45.0}) {
                    NetworkConfig cfg;
                    cfg.lambda_bs = lambda;
                    cfg.height_model.a = a;
                    cfg.h0 = h0;
                    cfg.pattern.tilt_deg = beta;
                    const double p = coverage_probability(cfg).p_cov;
                    McCampaign c;
                    c.trials = kOracleTrials;
                    const double tau[] = {cfg.sir_threshold_db};
                    const McEstimate est = estimate_coverage(cfg, c, tau).front();
                    const double tol =
                        std::max(kOracleFloor, kOracleCiMultiple * est.ci_halfwidth_95);
                    const double diff = std::abs(p - est.p_cov_hat);
                    ++n;
                    if (diff - tol > worst_excess) {
                        worst_excess = diff - tol;
                        worst = "lambda=" + num(lambda) + " a=" + num(a) + " h0=" + num(h0) +
                                " beta=" + num(beta) + " analytic=" + num(p) +
                                " mc=" + num(est.p_cov_hat) + " tol=" + num(tol);
                    }
                    if (diff > tol) {
                        v.pass = false;
                    }
                }
            }
        }
    }
    v.detail = std::to_string(n) + " configurations; tightest " + worst;
    return v;
}

Verdict alternating_identity()
{
    double worst = 0.0;
    for (int big_n = 1; big_n <= 8; ++big_n) {
        for (double s : {0.01, 0.1, 1.0, 10.0}) {
            std::vector<double> e;
            for (int n = 1; n <= big_n; ++n) {
                e.push_back(std::exp(-n * s));
            }
            double sum = 0.0;
            for (double t : alternating_terms(e)) {
                sum += t;
            }
            worst = std::max(worst, std::abs(sum - (1.0 - std::pow(1.0 - std::exp(-s), big_n))));
        }
    }
    return {worst <= kIdentityTol, "max deviation " + num(worst, 3)};
}

Verdict limit_behavior()
{
    Verdict v;
    double min_low = 1.0;
    double max_high = 0.0;
    std::vector<std::string> bad;
    auto note = [&](const std::string &where, double tau, double p) {
        if (tau < 0) {
            min_low = std::min(min_low, p);
            if (p < kLowTauFloor) {
                bad.push_back(where + " p(-60)=" + num(p));
            }
        } else {
            max_high = std::max(max_high, p);
            if (p > kHighTauCeil) {
                bad.push_back(where + " p(+60)=" + num(p));
            }
        }
    };

    for (const std::string id : {"fig3", "fig4"}) {
        const ExperimentSpec &base = builtin(id);
        // Analytic: the full tilt grid.
        for (double tau : {-60.0, 60.0}) {
            ExperimentSpec spec = base;
            spec.evaluators = {Evaluator::analytic};
            spec.network.sir_threshold_db = tau;
            const ExperimentResult res = run_experiment(spec);
            for (const std::string &f : res.failures) {
                bad.push_back(f);
            }
            // Report only the worst tilt per case.
            std::map<std::string, std::pair<double, double>> worst;
            for (const ResultRow &r : res.rows) {
                if (!r.p_cov) {
                    continue;
                }
                auto [it, fresh] = worst.try_emplace(r.height_case, r.axis_value, *r.p_cov);
                const bool worse = tau < 0 ? *r.p_cov < it->second.second
                                           : *r.p_cov > it->second.second;
                if (!fresh && worse) {
                    it->second = {r.axis_value, *r.p_cov};
                }
            }
            for (const auto &[label, bp] : worst) {
                note(id + "/" + label + "/analytic beta=" + num(bp.first), tau, bp.second);
            }
        }
        // Simulation: a coarser tilt grid, one sample set for both thresholds.
        const double taus[] = {-60.0, 60.0};
        for (const HeightCase &hc : base.effective_cases()) {
            std::pair<double, double> lo{0.0, 1.0};
            std::pair<double, double> hi{0.0, 0.0};
            for (double beta = 0.0; beta <= 90.0; beta += kMcTiltStepDeg) {
                NetworkConfig cfg = case_config(base, hc);
                cfg.pattern.tilt_deg = beta;
                const auto est = estimate_coverage(cfg, base.campaign, taus);
                if (est[0].p_cov_hat < lo.second) {
                    lo = {beta, est[0].p_cov_hat};
                }
                if (est[1].p_cov_hat > hi.second) {
                    hi = {beta, est[1].p_cov_hat};
                }
            }
            note(id + "/" + hc.label + "/montecarlo beta=" + num(lo.first), -60.0, lo.second);
            note(id + "/" + hc.label + "/montecarlo beta=" + num(hi.first), 60.0, hi.second);
        }
    }
    for (const std::string id : {"fig5", "fig6"}) {
        ExperimentSpec spec = builtin(id);
        spec.grid = {-60.0, 60.0};
        const ExperimentResult res = run_experiment(spec);
        for (const std::string &f : res.failures) {
            bad.push_back(f);
        }
        for (const ResultRow &r : res.rows) {
            if (r.p_cov) {
                note(id + "/" + r.height_case + "/" + to_string(r.mode) + "/" +
                         to_string(r.evaluator),
                     r.axis_value, *r.p_cov);
            }
        }
    }
    v.pass = bad.empty();
    v.detail = "min p(-60)=" + num(min_low, 7) + ", max p(+60)=" + num(max_high);
    for (const std::string &b : bad) {
        v.detail += "; " + b;
    }
    return v;
}

Verdict tilt_shape(const std::map<std::string, TiltProfile> &sparse,
                   const std::map<std::string, TiltProfile> &dense)
{
    Verdict v;
    std::ostringstream os;
    std::map<std::string, double> star[2];
    std::map<std::string, double> range[2];
    const std::map<std::string, TiltProfile> *profs[2] = {&sparse, &dense};
    const char *names[2] = {"fig3", "fig4"};
    for (int d = 0; d < 2; ++d) {
        const ExperimentSpec &spec = builtin(names[d]);
        for (const HeightCase &hc : spec.effective_cases()) {
            const TiltProfile &p = profs[d]->at(hc.label);
            const TiltOptimum opt = refine_tilt(case_config(spec, hc), spec.search, p);
            star[d][hc.label] = opt.beta_star_deg;
            const auto [lo, hi] = std::minmax_element(p.p_cov.begin(), p.p_cov.end());
            range[d][hc.label] = *hi - *lo;
        }
    }
    for (int d = 0; d < 2; ++d) {
        os << names[d] << " beta*:";
        for (const auto &[label, b] : star[d]) {
            os << " " << label << "=" << num(b);
        }
        os << "; ";
        for (auto i = star[d].begin(); i != star[d].end(); ++i) {
            for (auto j = std::next(i); j != star[d].end(); ++j) {
                if (!(std::abs(i->second - j->second) > kDistinctDeg)) {
                    v.pass = false;
                    os << "NOT DISTINCT " << i->first << "/" << j->first << " ("
                       << num(std::abs(i->second - j->second), 2) << " deg); ";
                }
            }
        }
    }
    for (const auto &[label, b] : star[0]) {
        if (!(star[1][label] >= b)) {
            v.pass = false;
            os << "beta* decreases with density for " << label << "; ";
        }
        if (!(range[1][label] > range[0][label])) {
            v.pass = false;
            os << "range not larger at high density for " << label << "; ";
        }
    }
    os << "ranges sparse/dense:";
    for (const auto &[label, r] : range[0]) {
        os << " " << label << "=" << num(r, 3) << "/" << num(range[1][label], 3);
    }
    v.detail = os.str();
    return v;
}

Verdict threshold_ordering()
{
    Verdict v;
    std::ostringstream os;
    double mean_gap[2] = {0.0, 0.0};
    const char *names[2] = {"fig5", "fig6"};
    for (int d = 0; d < 2; ++d) {
        ExperimentSpec spec = builtin(names[d]);
        spec.evaluators = {Evaluator::analytic};
        spec.modes = {Mode::height_aware, Mode::two_d};
        const ExperimentResult res = run_experiment(spec);
        if (!res.failures.empty()) {
            return {false, res.failures.front()};
        }
        std::map<double, double> aware;
        std::map<double, double> flat;
        for (const ResultRow &r : res.rows) {
            (r.mode == Mode::two_d ? flat : aware)[r.axis_value] = *r.p_cov;
        }
        double min_gap = 1.0;
        for (const auto &[tau, p] : aware) {
            const double gap = p - flat.at(tau);
            min_gap = std::min(min_gap, gap);
            mean_gap[d] += gap / static_cast<double>(aware.size());
            if (!(gap >= 0.0)) {
                v.pass = false;
                os << names[d] << " aware < 2dbf at tau=" << tau << "; ";
            }
        }
        os << names[d] << " min gap " << num(min_gap, 3) << " mean gap " << num(mean_gap[d], 4)
           << "; ";
    }
    if (!(mean_gap[1] > mean_gap[0])) {
        v.pass = false;
        os << "mean gap not larger at high density";
    }
    v.detail = os.str();
    return v;
}

// Kolmogorov-Smirnov distance of sorted samples against a cdf with
// possible atoms: right limits at the last of a run of ties, left limits
// at the first.
double ks_distance(const std::vector<double> &s, const std::function<double(double)> &cdf,
                   const std::function<double(double)> &cdf_left)
{
    double ks = 0.0;
    const double n = static_cast<double>(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i + 1 == s.size() || s[i + 1] != s[i]) {
            ks = std::max(ks, std::abs((i + 1) / n - cdf(s[i])));
        }
        if (i == 0 || s[i - 1] != s[i]) {
            ks = std::max(ks, std::abs(i / n - cdf_left(s[i])));
        }
    }
    return ks;
}

Verdict distributions()
{
    Verdict v;
    std::ostringstream os;
    for (double a : {1.0, 0.5}) {
        HeightModel m;
        m.a = a;
        const double z = 0.5 * m.b * (m.h_max * m.h_max - m.h_min * m.h_min) +
                         m.c * (m.h_max - m.h_min);
        auto linear_part = [&](double h) {
            h = std::clamp(h, m.h_min, m.h_max);
            return (0.5 * m.b * (h * h - m.h_min * m.h_min) + m.c * (h - m.h_min)) / z;
        };
        auto cdf = [&](double h) {
            return a * linear_part(h) + (h >= m.h_atom ? 1.0 - a : 0.0);
        };
        auto cdf_left = [&](double h) {
            return a * linear_part(h) + (h > m.h_atom ? 1.0 - a : 0.0);
        };
        std::vector<double> s(kDistSamples);
        RandomStream rng(2026, static_cast<std::uint64_t>(a * 10));
        std::size_t atoms = 0;
        for (double &h : s) {
            h = m.sample(rng);
            atoms += h == m.h_atom ? 1 : 0;
        }
        std::sort(s.begin(), s.end());
        const double ks = ks_distance(s, cdf, cdf_left);
        os << "height a=" << a << " KS " << num(ks, 3) << "; ";
        v.pass = v.pass && ks < kKsMax;
        if (a == 0.5) {
            const double freq = static_cast<double>(atoms) / kDistSamples;
            os << "atom frequency " << num(freq, 5) << "; ";
            v.pass = v.pass && std::abs(freq - 0.5) <= kAtomTol;
        }
    }
    for (double lambda : {1e-6, 5e-5}) {
        std::vector<double> s(kDistSamples);
        RandomStream rng(2027, static_cast<std::uint64_t>(lambda * 1e7));
        for (double &x : s) {
            x = nearest_bs_quantile(lambda, rng.uniform());
        }
        std::sort(s.begin(), s.end());
        auto cdf = [&](double x) { return 1.0 - std::exp(-kPi * lambda * x * x); };
        const double ks = ks_distance(s, cdf, cdf);
        os << "nearest BS lambda=" << lambda << " KS " << num(ks, 3) << "; ";
        v.pass = v.pass && ks < kKsMax;
    }
    v.detail = os.str();
    return v;
}

Verdict determinism()
{
    Verdict v{true, ""};
    for (ExperimentSpec spec : reduced_scenarios()) {
        spec.jobs = 1;
        const std::string a = csv_without_stamp(spec);
        const std::string b = csv_without_stamp(spec);
        spec.jobs = 4;
        const std::string c = csv_without_stamp(spec);
        const bool same = a == b && a == c;
        v.pass = v.pass && same;
        v.detail += spec.scenario + " reduced: " + (same ? "identical" : "DIFFERENT") +
                    " across reruns and jobs 1/4; ";
    }
    return v;
}

Verdict scale_invariance()
{
    Verdict v{true, ""};
    double worst = 0.0;
    std::size_t rows = 0;
    for (ExperimentSpec spec : reduced_scenarios()) {
        const ExperimentResult base = run_experiment(spec);
        spec.network.path_loss.scale_c *= 1e3;
        const ExperimentResult scaled = run_experiment(spec);
        if (base.rows.size() != scaled.rows.size()) {
            return {false, "row count changed"};
        }
        for (std::size_t i = 0; i < base.rows.size(); ++i) {
            if (!base.rows[i].p_cov || !scaled.rows[i].p_cov) {
                return {false, "failed row"};
            }
            worst = std::max(worst, std::abs(*base.rows[i].p_cov - *scaled.rows[i].p_cov));
            ++rows;
        }
    }
    v.pass = worst <= kScaleTol;
    v.detail = std::to_string(rows) + " rows, max |dp| " + num(worst, 3);
    return v;
}

} // namespace

int main()
{
    report(1, "analytic vs Monte Carlo", oracle_agreement);
    report(2, "alternating-sum identity", alternating_identity);
    report(3, "threshold limits", limit_behavior);
    std::map<std::string, TiltProfile> sparse;
    std::map<std::string, TiltProfile> dense;
    report(4, "tilt sweep shape", [&] {
        sparse = tilt_profiles("fig3");
        dense = tilt_profiles("fig4");
        return tilt_shape(sparse, dense);
    });
    report(5, "threshold sweep ordering", threshold_ordering);
    report(6, "sampling distributions", distributions);
    report(7, "determinism", determinism);
    report(8, "path-loss constant invariance", scale_invariance);
    std::printf("%d of 8 criteria failed\n", g_failed);
    return g_failed == 0 ? 0 : 1;
}
