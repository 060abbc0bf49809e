// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------

#include "tiltcov/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "tiltcov/errors.hpp"
#include "tiltcov/parallel.hpp"

namespace tiltcov {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Shortest representation that round-trips.
std::string fmt(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Deployment where every user is assumed to stand on the ground.
NetworkConfig ground_model(NetworkConfig cfg)
{
    cfg.height_model.a = 0.0;
    cfg.h0 = cfg.height_model.h_atom;
    return cfg;
}

NetworkConfig with_case(const NetworkConfig &base, const HeightCase &c)
{
    NetworkConfig cfg = base;
    cfg.height_model.a = c.a;
    cfg.h0 = c.h0;
    return cfg;
}

// One operating point of a series, before evaluation.
struct Point {
    NetworkConfig cfg;
    std::optional<double> beta;
    double axis_value = 0.0;
    std::string failure;
};

struct Series {
    HeightCase hc;
    Mode mode = Mode::height_aware;
    std::vector<Point> points;
};

TiltSearchSpec search_for(const ExperimentSpec &spec, int jobs)
{
    TiltSearchSpec s = spec.search;
    s.evaluator = Evaluator::analytic;
    s.quad = spec.quad;
    s.jobs = jobs;
    return s;
}

Series plan_series(const ExperimentSpec &spec, const HeightCase &hc, Mode mode)
{
    Series series{hc, mode, {}};
    const NetworkConfig base = with_case(spec.network, hc);
    for (double v : spec.grid) {
        Point p;
        p.cfg = base;
        p.axis_value = v;
        switch (spec.axis) {
        case SweepAxis::tilt:
            p.cfg.pattern.tilt_deg = v;
            break;
        case SweepAxis::sir_threshold_db:
            p.cfg.sir_threshold_db = v;
            break;
        case SweepAxis::bs_density:
            p.cfg.lambda_bs = v;
            break;
        }
        if (mode == Mode::two_d) {
            p.cfg.pattern.enabled = false;
        } else {
            p.beta = p.cfg.pattern.tilt_deg;
        }
        series.points.push_back(std::move(p));
    }
    if (mode == Mode::two_d || spec.axis == SweepAxis::tilt) {
        return series;
    }

    // The tilt is an output of the optimizer at every axis value.
    const NetworkConfig objective = mode == Mode::height_blind ? ground_model(base) : base;
    auto fail_all = [&](const std::string &msg) {
        for (Point &p : series.points) {
            p.failure = "tilt optimization: " + msg;
            p.beta.reset();
        }
    };
    try {
        if (spec.axis == SweepAxis::sir_threshold_db) {
            const auto opts =
                optimize_tilt_per_threshold(objective, search_for(spec, spec.jobs), spec.grid);
            for (std::size_t i = 0; i < opts.size(); ++i) {
                series.points[i].beta = opts[i].beta_star_deg;
                series.points[i].cfg.pattern.tilt_deg = opts[i].beta_star_deg;
            }
        } else {
            std::vector<std::string> errors(spec.grid.size());
            parallel_for(spec.grid.size(), spec.jobs, [&](std::size_t i) {
                NetworkConfig obj = objective;
                obj.lambda_bs = spec.grid[i];
                try {
                    const TiltOptimum opt = optimize_tilt(obj, search_for(spec, 1));
                    series.points[i].beta = opt.beta_star_deg;
                    series.points[i].cfg.pattern.tilt_deg = opt.beta_star_deg;
                } catch (const NumericalError &e) {
                    errors[i] = e.what();
                }
            });
            for (std::size_t i = 0; i < errors.size(); ++i) {
                if (!errors[i].empty()) {
                    series.points[i].failure = "tilt optimization: " + errors[i];
                    series.points[i].beta.reset();
                }
            }
        }
    } catch (const NumericalError &e) {
        fail_all(e.what());
    }
    return series;
}

std::string row_tag(const ResultRow &r)
{
    return r.scenario + "/" + r.height_case + "/" + to_string(r.mode) + "/" +
           to_string(r.evaluator) + "/" + to_string(r.axis) + "=" + fmt(r.axis_value);
}

void require(bool ok, const std::string &msg)
{
    if (!ok) {
        throw ConfigError(msg);
    }
}

template <class T>
bool has_duplicates(std::vector<T> v)
{
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
}

const char *kColumns[] = {"scenario", "evaluator", "mode",         "height_case",
                          "axis",     "axis_value", "beta_deg",    "p_cov",
                          "ci_halfwidth", "err_estimate", "seed"};

const char *kBlindNote =
    "3dbf_height_blind (interpretation): tilt optimized assuming every user is on the ground "
    "(a = 0, h0 = h_atom), coverage evaluated under the configured height model";

const char *kUnitsNote =
    "lambda_bs 1/m^2; h_bs, h0, heights, radii m; angles and beta_deg deg; "
    "sir_threshold_db and threshold axis values dB; p_cov probability";

std::string opt_str(const std::optional<double> &v) { return v ? fmt(*v) : std::string(); }

} // namespace

// ---------------------------------------------------------------- names

std::string to_string(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::tilt:
        return "tilt";
    case SweepAxis::sir_threshold_db:
        return "sir_threshold_db";
    case SweepAxis::bs_density:
        return "bs_density";
    }
    return "?";
}

std::string to_string(Mode mode)
{
    switch (mode) {
    case Mode::height_aware:
        return "3dbf_height_aware";
    case Mode::height_blind:
        return "3dbf_height_blind";
    case Mode::two_d:
        return "2dbf";
    }
    return "?";
}

SweepAxis parse_axis(const std::string &s)
{
    if (s == "tilt") {
        return SweepAxis::tilt;
    }
    if (s == "sir_threshold_db") {
        return SweepAxis::sir_threshold_db;
    }
    if (s == "bs_density") {
        return SweepAxis::bs_density;
    }
    throw ConfigError("unknown sweep axis \"" + s + "\" (tilt, sir_threshold_db, bs_density)");
}

Mode parse_mode(const std::string &s)
{
    if (s == "3dbf_height_aware") {
        return Mode::height_aware;
    }
    if (s == "3dbf_height_blind") {
        return Mode::height_blind;
    }
    if (s == "2dbf") {
        return Mode::two_d;
    }
    throw ConfigError("unknown mode \"" + s + "\" (3dbf_height_aware, 3dbf_height_blind, 2dbf)");
}

Evaluator parse_evaluator(const std::string &s)
{
    if (s == "analytic") {
        return Evaluator::analytic;
    }
    if (s == "montecarlo" || s == "mc") {
        return Evaluator::montecarlo;
    }
    throw ConfigError("unknown evaluator \"" + s + "\" (analytic, montecarlo)");
}

// ---------------------------------------------------------------- spec

std::vector<HeightCase> ExperimentSpec::effective_cases() const
{
    if (!height_cases.empty()) {
        return height_cases;
    }
    return {HeightCase{"base", network.height_model.a, network.h0}};
}

std::size_t ExperimentSpec::planned_rows() const
{
    return effective_cases().size() * modes.size() * evaluators.size() * grid.size();
}

void ExperimentSpec::validate() const
{
    require(!scenario.empty(), "scenario id must not be empty");
    require(scenario.find_first_of(",\"\n\r") == std::string::npos,
            "scenario id must not contain commas, quotes or line breaks");
    require(!grid.empty(), "sweep grid is empty");
    for (double v : grid) {
        require(std::isfinite(v), "sweep grid values must be finite");
    }
    bool up = true;
    bool down = true;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        up = up && grid[i] > grid[i - 1];
        down = down && grid[i] < grid[i - 1];
    }
    require(up || down, "sweep grid must be strictly monotone");
    if (axis == SweepAxis::tilt) {
        for (double v : grid) {
            require(v >= 0.0 && v <= 90.0, "tilt grid values must lie in [0, 90] deg");
        }
    }
    if (axis == SweepAxis::bs_density) {
        for (double v : grid) {
            require(v > 0.0, "density grid values must be > 0");
        }
    }
    require(!evaluators.empty(), "at least one evaluator is required");
    require(!has_duplicates(evaluators), "evaluators listed twice");
    require(!modes.empty(), "at least one comparison mode is required");
    require(!has_duplicates(modes), "modes listed twice");
    const bool blind = std::find(modes.begin(), modes.end(), Mode::height_blind) != modes.end();
    require(!(blind && axis == SweepAxis::tilt),
            "3dbf_height_blind needs an optimized tilt and cannot sweep the tilt axis");

    std::vector<std::string> labels;
    for (const HeightCase &c : height_cases) {
        require(!c.label.empty(), "height case labels must not be empty");
        require(c.label.find_first_of(",\"\n\r") == std::string::npos,
                "height case label \"" + c.label + "\" contains a comma, quote or line break");
        labels.push_back(c.label);
    }
    require(!has_duplicates(labels), "height case labels must be unique");

    network.validate();
    const bool mc =
        std::find(evaluators.begin(), evaluators.end(), Evaluator::montecarlo) != evaluators.end();
    for (const HeightCase &c : effective_cases()) {
        NetworkConfig cfg = with_case(network, c);
        try {
            cfg.validate();
        } catch (const ConfigError &e) {
            throw ConfigError("height case \"" + c.label + "\": " + e.what());
        }
        if (blind) {
            ground_model(cfg).validate();
        }
        for (double v : grid) {
            NetworkConfig point = cfg;
            if (axis == SweepAxis::bs_density) {
                point.lambda_bs = v;
            }
            if (mc) {
                campaign.validate(point);
            }
            if (axis != SweepAxis::bs_density) {
                break;
            }
        }
    }
    search_for(*this, 1).validate();
    quad.validate();
    require(jobs >= 1, "jobs must be >= 1");
}

// ---------------------------------------------------------------- runner

ExperimentResult run_experiment(const ExperimentSpec &spec)
{
    spec.validate();

    std::vector<Series> plan;
    for (const HeightCase &hc : spec.effective_cases()) {
        for (Mode m : spec.modes) {
            plan.push_back(plan_series(spec, hc, m));
        }
    }

    ExperimentResult res;
    struct Job {
        std::size_t row;
        const Point *point;
    };
    std::vector<Job> analytic_jobs;
    // Monte Carlo points sharing a configuration up to the threshold reuse
    // one SIR sample; along the other axes every point runs alone.
    std::map<std::tuple<std::size_t, double, double>, std::vector<Job>> mc_groups;
    std::vector<std::tuple<std::size_t, double, double>> mc_order;

    for (std::size_t si = 0; si < plan.size(); ++si) {
        const Series &s = plan[si];
        for (Evaluator e : spec.evaluators) {
            for (const Point &p : s.points) {
                ResultRow row;
                row.scenario = spec.scenario;
                row.evaluator = e;
                row.mode = s.mode;
                row.height_case = s.hc.label;
                row.axis = spec.axis;
                row.axis_value = p.axis_value;
                row.beta_deg = p.beta;
                if (e == Evaluator::montecarlo) {
                    row.seed = spec.campaign.seed;
                }
                row.failure = p.failure;
                const std::size_t idx = res.rows.size();
                res.rows.push_back(std::move(row));
                if (!p.failure.empty()) {
                    continue;
                }
                if (e == Evaluator::analytic) {
                    analytic_jobs.push_back({idx, &p});
                    continue;
                }
                const auto key = spec.axis == SweepAxis::sir_threshold_db
                                     ? std::make_tuple(si, p.beta.value_or(-1.0), 0.0)
                                     : std::make_tuple(si, -2.0, static_cast<double>(idx));
                auto [it, fresh] = mc_groups.try_emplace(key);
                if (fresh) {
                    mc_order.push_back(key);
                }
                it->second.push_back({idx, &p});
            }
        }
    }

    parallel_for(analytic_jobs.size(), spec.jobs, [&](std::size_t k) {
        ResultRow &row = res.rows[analytic_jobs[k].row];
        const auto t0 = Clock::now();
        try {
            const CoverageResult cr = coverage_probability(analytic_jobs[k].point->cfg, spec.quad);
            row.p_cov = cr.p_cov;
            row.err_estimate = cr.err_estimate;
        } catch (const NumericalError &e) {
            row.failure = e.what();
        } catch (const DomainError &e) {
            row.failure = e.what();
        }
        row.runtime_ms = elapsed_ms(t0);
    });

    for (const auto &key : mc_order) {
        const std::vector<Job> &group = mc_groups.at(key);
        std::vector<double> taus;
        for (const Job &j : group) {
            taus.push_back(j.point->cfg.sir_threshold_db);
        }
        McCampaign campaign = spec.campaign;
        campaign.record_sir = false;
        const auto t0 = Clock::now();
        try {
            const auto est = estimate_coverage(group.front().point->cfg, campaign, taus, spec.jobs);
            const double ms = elapsed_ms(t0) / static_cast<double>(group.size());
            for (std::size_t i = 0; i < group.size(); ++i) {
                ResultRow &row = res.rows[group[i].row];
                row.p_cov = est[i].p_cov_hat;
                row.ci_halfwidth = est[i].ci_halfwidth_95;
                row.runtime_ms = ms;
            }
        } catch (const NumericalError &e) {
            for (const Job &j : group) {
                res.rows[j.row].failure = e.what();
            }
        }
    }

    for (const ResultRow &row : res.rows) {
        if (!row.failure.empty()) {
            res.failures.push_back(row_tag(row) + ": " + row.failure);
        }
    }
    return res;
}

// ---------------------------------------------------------------- scenarios

std::vector<ExperimentSpec> emit_builtin_scenarios()
{
    auto base = [](const std::string &id, double lambda) {
        ExperimentSpec s;
        s.scenario = id;
        s.network.lambda_bs = lambda;
        s.network.sir_threshold_db = 4.0;
        s.evaluators = {Evaluator::analytic, Evaluator::montecarlo};
        s.output = id + ".csv";
        return s;
    };
    auto tilt_sweep = [&](const std::string &id, double lambda) {
        ExperimentSpec s = base(id, lambda);
        s.axis = SweepAxis::tilt;
        for (int i = 0; i <= 180; ++i) {
            s.grid.push_back(0.5 * i);
        }
        s.modes = {Mode::height_aware};
        s.height_cases = {{"a0_h10", 0.0, 10.0},
                          {"a0_h30.5", 0.0, 30.5},
                          {"a1_h10", 1.0, 10.0},
                          {"a1_h30.5", 1.0, 30.5}};
        return s;
    };
    auto threshold_sweep = [&](const std::string &id, double lambda) {
        ExperimentSpec s = base(id, lambda);
        s.axis = SweepAxis::sir_threshold_db;
        for (int t = -10; t <= 20; ++t) {
            s.grid.push_back(t);
        }
        s.modes = {Mode::height_aware, Mode::height_blind, Mode::two_d};
        s.height_cases = {{"a1_h10", 1.0, 10.0}};
        return s;
    };
    return {tilt_sweep("fig3", 1e-6), tilt_sweep("fig4", 5e-5), threshold_sweep("fig5", 1e-6),
            threshold_sweep("fig6", 5e-5)};
}

// ---------------------------------------------------------------- output

void write_csv(std::ostream &os, const ExperimentSpec &spec, const ExperimentResult &res,
               const std::string &timestamp)
{
    os << "# tiltcov experiment output\n";
    os << "# generated: " << timestamp << "\n";
    os << "# spec: " << serialize_experiment(spec) << "\n";
    os << "# units: " << kUnitsNote << "\n";
    os << "# note: " << kBlindNote << "\n";
    os << "# note: beta_deg blank for 2dbf (no vertical pattern); ci_halfwidth is the 95% "
          "normal interval of Monte Carlo rows; err_estimate is the analytic quadrature bound\n";
    os << "# failures: " << res.failures.size() << "\n";
    for (const std::string &f : res.failures) {
        os << "# failed: " << f << "\n";
    }
    bool first = true;
    for (const char *c : kColumns) {
        os << (first ? "" : ",") << c;
        first = false;
    }
    if (spec.timings) {
        os << ",runtime_ms";
    }
    os << "\n";
    for (const ResultRow &r : res.rows) {
        os << r.scenario << ',' << to_string(r.evaluator) << ',' << to_string(r.mode) << ','
           << r.height_case << ',' << to_string(r.axis) << ',' << fmt(r.axis_value) << ','
           << opt_str(r.beta_deg) << ',' << opt_str(r.p_cov) << ',' << opt_str(r.ci_halfwidth)
           << ',' << opt_str(r.err_estimate) << ',' << (r.seed ? std::to_string(*r.seed) : "");
        if (spec.timings) {
            os << ',' << fmt(r.runtime_ms);
        }
        os << "\n";
    }
}

void write_json(std::ostream &os, const ExperimentSpec &spec, const ExperimentResult &res,
                const std::string &timestamp)
{
    using nlohmann::json;
    auto opt = [](const std::optional<double> &v) { return v ? json(*v) : json(nullptr); };
    json rows = json::array();
    for (const ResultRow &r : res.rows) {
        json row = {
            {"scenario", r.scenario},
            {"evaluator", to_string(r.evaluator)},
            {"mode", to_string(r.mode)},
            {"height_case", r.height_case},
            {"axis", to_string(r.axis)},
            {"axis_value", r.axis_value},
            {"beta_deg", opt(r.beta_deg)},
            {"p_cov", opt(r.p_cov)},
            {"ci_halfwidth", opt(r.ci_halfwidth)},
            {"err_estimate", opt(r.err_estimate)},
            {"seed", r.seed ? json(*r.seed) : json(nullptr)},
        };
        if (spec.timings) {
            row["runtime_ms"] = r.runtime_ms;
        }
        if (!r.failure.empty()) {
            row["failure"] = r.failure;
        }
        rows.push_back(std::move(row));
    }
    const json doc = {
        {"generated", timestamp},
        {"spec", json::parse(serialize_experiment(spec))},
        {"units", kUnitsNote},
        {"notes", {kBlindNote}},
        {"failures", res.failures},
        {"rows", rows},
    };
    os << doc.dump(1) << "\n";
}

void persist(const ExperimentSpec &spec, const ExperimentResult &res, const std::string &timestamp)
{
    if (spec.output.empty()) {
        throw IoError("no output path given");
    }
    std::ofstream out(spec.output, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + spec.output + " for writing");
    }
    if (spec.format == OutputFormat::json) {
        write_json(out, spec, res, timestamp);
    } else {
        write_csv(out, spec, res, timestamp);
    }
    out.flush();
    if (!out) {
        throw IoError("write to " + spec.output + " failed");
    }
}

std::string utc_timestamp()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace tiltcov
