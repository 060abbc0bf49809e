// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tiltcov/errors.hpp"
#include "tiltcov/experiment.hpp"

using namespace tiltcov;

namespace {

const char *kSmall = R"({
  "scenario": "small",
  "network": {"lambda_bs": 5e-5, "h0": 10, "sir_threshold_db": 4,
              "antenna": {"tilt_deg": 12}},
  "sweep": {"axis": "tilt", "grid": {"start": 0, "stop": 30, "step": 15}},
  "evaluators": ["analytic", "montecarlo"],
  "modes": ["3dbf_height_aware", "2dbf"],
  "campaign": {"trials": 3000, "seed": 11}
})";

std::string without_timestamp(const std::string &csv)
{
    std::istringstream in(csv);
    std::string out;
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("# generated:", 0) != 0) {
            out += line + "\n";
        }
    }
    return out;
}

std::string csv_of(const ExperimentSpec &spec)
{
    std::ostringstream os;
    write_csv(os, spec, run_experiment(spec), utc_timestamp());
    return os.str();
}

std::string config_error(const std::string &text)
{
    try {
        parse_experiment(text).validate();
    } catch (const ConfigError &e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("config parsing and round trip")
{
    const ExperimentSpec spec = parse_experiment(kSmall);
    CHECK(spec.scenario == "small");
    CHECK(spec.network.lambda_bs == 5e-5);
    CHECK(spec.network.pattern.tilt_deg == 12.0);
    CHECK(spec.grid == std::vector<double>{0.0, 15.0, 30.0});
    CHECK(spec.evaluators.size() == 2);
    CHECK(spec.campaign.seed == 11);
    CHECK(spec.planned_rows() == 12);

    const ExperimentSpec again = parse_experiment(serialize_experiment(spec));
    CHECK(serialize_experiment(again) == serialize_experiment(spec));
    CHECK(again.grid == spec.grid);
}

TEST_CASE("config errors point at the problem")
{
    const std::string syntax = config_error("{\n  \"scenario\": \"x\",\n  \"sweep\": {,}\n}");
    CHECK(syntax.find("line 3") != std::string::npos);

    const std::string unknown = config_error(
        R"({"sweep": {"axis": "tilt", "grid": [1]}, "network": {"lamda_bs": 1e-6}})");
    CHECK(unknown.find("/network/lamda_bs") != std::string::npos);

    CHECK_FALSE(config_error(R"({"sweep": {"axis": "tilt", "grid": []}})").empty());
    CHECK_FALSE(config_error(R"({"sweep": {"axis": "tilt", "grid": [1, 3, 2]}})").empty());
    CHECK_FALSE(config_error(R"({"sweep": {"axis": "tilt", "grid": [1, 1]}})").empty());
    CHECK(config_error(R"({"sweep": {"axis": "tilt", "grid": [3, 1]}})").empty());
    CHECK_FALSE(config_error(R"({"sweep": {"axis": "tilt", "grid": [95]}})").empty());
    CHECK_FALSE(config_error(R"({"sweep": {"axis": "nonsense", "grid": [1]}})").empty());
    CHECK_FALSE(config_error(R"({"network": {"h0": 10}})").empty());
    CHECK_FALSE(config_error(
                    R"({"sweep": {"axis": "tilt", "grid": [1]}, "modes": ["3dbf_height_blind"]})")
                    .empty());
    CHECK_FALSE(config_error(
                    R"({"sweep": {"axis": "bs_density", "grid": [0]}})")
                    .empty());
    CHECK_FALSE(config_error(
                    R"({"sweep": {"axis": "tilt", "grid": [1]}, "network": {"h0": "ten"}})")
                    .empty());
    CHECK_FALSE(config_error(
                    R"({"sweep": {"axis": "tilt", "grid": [1]}, "scenario": "a,b"})")
                    .empty());
    CHECK_THROWS_AS(load_experiment("/nonexistent/exp.json"), IoError);
}

TEST_CASE("range grids expand without drift")
{
    const ExperimentSpec spec = parse_experiment(
        R"({"sweep": {"axis": "sir_threshold_db", "grid": {"start": -10, "stop": 20, "step": 0.1}}})");
    REQUIRE(spec.grid.size() == 301);
    CHECK(spec.grid.front() == -10.0);
    CHECK(spec.grid.back() == 20.0);
    CHECK(spec.grid[150] == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("built-in scenarios")
{
    const auto all = emit_builtin_scenarios();
    REQUIRE(all.size() == 4);
    std::set<std::string> ids;
    for (const ExperimentSpec &s : all) {
        ids.insert(s.scenario);
        CHECK_NOTHROW(s.validate());
        CHECK(s.evaluators.size() == 2);
        CHECK(s.network.sir_threshold_db == 4.0);
    }
    CHECK(ids == std::set<std::string>{"fig3", "fig4", "fig5", "fig6"});
    CHECK(all[0].network.lambda_bs == 1e-6);
    CHECK(all[1].network.lambda_bs == 5e-5);
    CHECK(all[0].axis == SweepAxis::tilt);
    CHECK(all[0].grid.size() == 181);
    CHECK(all[0].effective_cases().size() == 4);
    CHECK(all[2].axis == SweepAxis::sir_threshold_db);
    CHECK(all[2].grid.size() == 31);
    CHECK(all[2].modes.size() == 3);
}

TEST_CASE("rows, determinism and thread independence")
{
    ExperimentSpec spec = parse_experiment(kSmall);
    const ExperimentResult res = run_experiment(spec);
    REQUIRE(res.rows.size() == 12);
    CHECK(res.failures.empty());
    for (const ResultRow &r : res.rows) {
        REQUIRE(r.p_cov);
        CHECK(*r.p_cov >= 0.0);
        CHECK(*r.p_cov <= 1.0);
        CHECK(r.beta_deg.has_value() == (r.mode != Mode::two_d));
        CHECK(r.seed.has_value() == (r.evaluator == Evaluator::montecarlo));
        CHECK(r.ci_halfwidth.has_value() == (r.evaluator == Evaluator::montecarlo));
        CHECK(r.err_estimate.has_value() == (r.evaluator == Evaluator::analytic));
    }
    // Without a vertical pattern the tilt column is irrelevant.
    for (Evaluator e : {Evaluator::analytic, Evaluator::montecarlo}) {
        std::set<double> flat;
        for (const ResultRow &r : res.rows) {
            if (r.mode == Mode::two_d && r.evaluator == e) {
                flat.insert(*r.p_cov);
            }
        }
        CHECK(flat.size() == 1);
    }

    const std::string first = without_timestamp(csv_of(spec));
    CHECK(first == without_timestamp(csv_of(spec)));
    spec.jobs = 3;
    CHECK(first == without_timestamp(csv_of(spec)));
    CHECK(first.find("scenario,evaluator,mode,height_case,axis,axis_value,beta_deg,p_cov") !=
          std::string::npos);
    CHECK(first.find("runtime_ms") == std::string::npos);
}

TEST_CASE("path-loss constant leaves every row unchanged")
{
    ExperimentSpec spec = parse_experiment(kSmall);
    const ExperimentResult base = run_experiment(spec);
    spec.network.path_loss.scale_c = 1e3;
    const ExperimentResult scaled = run_experiment(spec);
    REQUIRE(base.rows.size() == scaled.rows.size());
    for (std::size_t i = 0; i < base.rows.size(); ++i) {
        CHECK(std::abs(*base.rows[i].p_cov - *scaled.rows[i].p_cov) <= 1e-12);
    }
}

TEST_CASE("threshold sweep with all three modes")
{
    ExperimentSpec spec = parse_experiment(R"({
      "scenario": "thresholds",
      "network": {"lambda_bs": 5e-5, "h0": 10},
      "sweep": {"axis": "sir_threshold_db", "grid": [-5, 5, 15]},
      "modes": ["3dbf_height_aware", "3dbf_height_blind", "2dbf"],
      "search": {"grid_step_deg": 3}
    })");
    const ExperimentResult res = run_experiment(spec);
    REQUIRE(res.rows.size() == 9);
    CHECK(res.failures.empty());
    for (std::size_t i = 0; i < 3; ++i) {
        const ResultRow &aware = res.rows[i];
        const ResultRow &blind = res.rows[3 + i];
        const ResultRow &flat = res.rows[6 + i];
        CHECK(aware.mode == Mode::height_aware);
        CHECK(blind.mode == Mode::height_blind);
        CHECK(flat.mode == Mode::two_d);
        CHECK(*aware.p_cov >= *flat.p_cov);
        CHECK(*aware.p_cov >= *blind.p_cov - 1e-9);
    }

    std::ostringstream os;
    write_json(os, spec, res, "2026-01-01T00:00:00Z");
    const nlohmann::json doc = nlohmann::json::parse(os.str());
    CHECK(doc.at("rows").size() == 9);
    CHECK(doc.at("failures").empty());
    CHECK(doc.at("generated") == "2026-01-01T00:00:00Z");
}

TEST_CASE("density sweep")
{
    const ExperimentSpec spec = parse_experiment(R"({
      "sweep": {"axis": "bs_density", "grid": [1e-6, 5e-5]},
      "search": {"grid_step_deg": 5, "refine": false},
      "network": {"h0": 10}
    })");
    const ExperimentResult res = run_experiment(spec);
    REQUIRE(res.rows.size() == 2);
    CHECK(res.failures.empty());
    CHECK(*res.rows[0].beta_deg <= *res.rows[1].beta_deg);
}
