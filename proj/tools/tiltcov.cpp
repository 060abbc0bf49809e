// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------
//
// Command-line front end.
//
//   tiltcov coverage [point options]          one operating point
//   tiltcov sweep    --config exp.json        a configured sweep
//   tiltcov figures  --out dir                the built-in figure scenarios
//   tiltcov validate --config exp.json        parse and check only
//
// Exit status: 0 ok, 2 configuration error, 3 numerical failure, 4 I/O error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tiltcov/errors.hpp"
#include "tiltcov/experiment.hpp"

namespace {

using namespace tiltcov;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::string evaluator;
    std::string format;
    std::optional<int> jobs;
    bool timings = false;
};

void add_common(CLI::App *cmd, Overrides &ov)
{
    cmd->add_option("--seed", ov.seed, "Monte Carlo seed (u64)");
    cmd->add_option("--trials", ov.trials, "Monte Carlo trials per point")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--evaluator", ov.evaluator, "analytic, mc or both")
        ->check(CLI::IsMember({"analytic", "mc", "montecarlo", "both"}));
    cmd->add_option("--format", ov.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--jobs", ov.jobs, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_flag("--timings", ov.timings, "add a runtime_ms column (not reproducible)");
}

void apply(const Overrides &ov, ExperimentSpec &spec)
{
    if (ov.seed) {
        spec.campaign.seed = *ov.seed;
    }
    if (ov.trials) {
        spec.campaign.trials = *ov.trials;
    }
    if (ov.evaluator == "analytic") {
        spec.evaluators = {Evaluator::analytic};
    } else if (ov.evaluator == "mc" || ov.evaluator == "montecarlo") {
        spec.evaluators = {Evaluator::montecarlo};
    } else if (ov.evaluator == "both") {
        spec.evaluators = {Evaluator::analytic, Evaluator::montecarlo};
    }
    if (ov.format == "json") {
        spec.format = OutputFormat::json;
    } else if (ov.format == "csv") {
        spec.format = OutputFormat::csv;
    }
    if (ov.jobs) {
        spec.jobs = *ov.jobs;
    }
    if (ov.timings) {
        spec.timings = true;
    }
}

// Runs one spec and writes it to spec.output, or stdout when that is empty
// or "-". Returns the exit status.
int run_and_write(const ExperimentSpec &spec)
{
    const ExperimentResult res = run_experiment(spec);
    const std::string stamp = utc_timestamp();
    if (spec.output.empty() || spec.output == "-") {
        if (spec.format == OutputFormat::json) {
            write_json(std::cout, spec, res, stamp);
        } else {
            write_csv(std::cout, spec, res, stamp);
        }
        std::cout.flush();
        if (!std::cout) {
            throw IoError("write to stdout failed");
        }
    } else {
        persist(spec, res, stamp);
    }
    for (const std::string &f : res.failures) {
        std::cerr << "tiltcov: failed: " << f << "\n";
    }
    return res.failures.empty() ? 0 : kExitNumerical;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO"};
    app.require_subcommand(1);

    // coverage
    Overrides cov_ov;
    std::string cov_config;
    std::string cov_out;
    std::optional<double> lambda, tilt, tau, a, h0;
    bool two_d = false;
    CLI::App *cov = app.add_subcommand("coverage", "coverage at one operating point");
    cov->add_option("--config", cov_config, "experiment file providing the base network");
    cov->add_option("--out", cov_out, "output file (default stdout)");
    cov->add_option("--lambda", lambda, "BS density, 1/m^2");
    cov->add_option("--tilt", tilt, "antenna tilt, deg");
    cov->add_option("--tau", tau, "SIR threshold, dB");
    cov->add_option("--a", a, "height-model weight of the linear part");
    cov->add_option("--h0", h0, "typical-user effective height, m");
    cov->add_flag("--2dbf", two_d, "disable the vertical pattern");
    add_common(cov, cov_ov);

    // sweep
    Overrides sw_ov;
    std::string sw_config;
    std::string sw_out;
    CLI::App *sweep = app.add_subcommand("sweep", "run the sweep described by a config file");
    sweep->add_option("--config", sw_config, "experiment file")->required();
    sweep->add_option("--out", sw_out, "output file (overrides the config; '-' for stdout)");
    add_common(sweep, sw_ov);

    // figures
    Overrides fig_ov;
    std::string fig_out = ".";
    std::vector<std::string> fig_only;
    CLI::App *figs = app.add_subcommand("figures", "run the built-in figure scenarios");
    figs->add_option("--out", fig_out, "output directory");
    figs->add_option("--scenario", fig_only, "run only these scenario ids");
    add_common(figs, fig_ov);

    // validate
    std::string val_config;
    CLI::App *val = app.add_subcommand("validate", "parse and validate a config file");
    val->add_option("--config", val_config, "experiment file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*val) {
            ExperimentSpec spec = load_experiment(val_config);
            spec.validate();
            std::cout << "ok: scenario " << spec.scenario << ", " << spec.planned_rows()
                      << " rows\n";
            return 0;
        }
        if (*sweep) {
            ExperimentSpec spec = load_experiment(sw_config);
            apply(sw_ov, spec);
            if (!sw_out.empty()) {
                spec.output = sw_out;
            }
            return run_and_write(spec);
        }
        if (*cov) {
            ExperimentSpec spec;
            if (!cov_config.empty()) {
                spec = load_experiment(cov_config);
            }
            spec.scenario = "coverage";
            spec.height_cases.clear();
            spec.output = cov_out;
            NetworkConfig &net = spec.network;
            if (lambda) {
                net.lambda_bs = *lambda;
            }
            if (tau) {
                net.sir_threshold_db = *tau;
            }
            if (a) {
                net.height_model.a = *a;
            }
            if (h0) {
                net.h0 = *h0;
            }
            spec.axis = SweepAxis::tilt;
            spec.grid = {tilt.value_or(net.pattern.tilt_deg)};
            spec.modes = {two_d ? Mode::two_d : Mode::height_aware};
            apply(cov_ov, spec);
            return run_and_write(spec);
        }
        if (*figs) {
            std::filesystem::create_directories(fig_out);
            int rc = 0;
            bool matched = fig_only.empty();
            for (ExperimentSpec spec : emit_builtin_scenarios()) {
                if (!fig_only.empty() &&
                    std::find(fig_only.begin(), fig_only.end(), spec.scenario) == fig_only.end()) {
                    continue;
                }
                matched = true;
                apply(fig_ov, spec);
                const std::string ext = spec.format == OutputFormat::json ? ".json" : ".csv";
                spec.output = (std::filesystem::path(fig_out) / (spec.scenario + ext)).string();
                std::cerr << "tiltcov: running " << spec.scenario << " -> " << spec.output << "\n";
                rc = std::max(rc, run_and_write(spec));
            }
            if (!matched) {
                throw ConfigError("no built-in scenario matches --scenario");
            }
            return rc;
        }
    } catch (const ConfigError &e) {
        std::cerr << "tiltcov: configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError &e) {
        std::cerr << "tiltcov: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const DomainError &e) {
        std::cerr << "tiltcov: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const IoError &e) {
        std::cerr << "tiltcov: I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "tiltcov: I/O error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}
