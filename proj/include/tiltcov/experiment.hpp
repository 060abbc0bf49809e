// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tiltcov/analytic.hpp"
#include "tiltcov/geometry.hpp"
#include "tiltcov/montecarlo.hpp"
#include "tiltcov/optimizer.hpp"

namespace tiltcov {

enum class SweepAxis { tilt, sir_threshold_db, bs_density };

/// Beamforming comparison modes.
///  - height_aware: tilt chosen under the configured height model
///  - height_blind: tilt chosen as if every user stood on the ground
///    (a = 0, h0 = h_atom), coverage evaluated under the configured model
///  - two_d:        vertical pattern disabled
enum class Mode { height_aware, height_blind, two_d };

std::string to_string(SweepAxis axis);
std::string to_string(Mode mode);
SweepAxis parse_axis(const std::string &s);
Mode parse_mode(const std::string &s);
Evaluator parse_evaluator(const std::string &s);

/// Overrides a and h0 of the base network; one result series per case.
struct HeightCase {
    std::string label;
    double a = 1.0;
    double h0 = 30.5;
};

enum class OutputFormat { csv, json };

struct ExperimentSpec {
    std::string scenario = "custom";
    NetworkConfig network{};
    SweepAxis axis = SweepAxis::tilt;
    std::vector<double> grid;
    std::vector<Evaluator> evaluators{Evaluator::analytic};
    std::vector<Mode> modes{Mode::height_aware};
    /// Empty means a single case taken from `network`.
    std::vector<HeightCase> height_cases;
    McCampaign campaign{};
    /// Tilt search used wherever a tilt is optimized (always analytic).
    TiltSearchSpec search{};
    QuadratureSpec quad{};
    std::string output;
    OutputFormat format = OutputFormat::csv;
    /// Adds a wall-clock runtime column; the output is then no longer
    /// reproducible byte for byte.
    bool timings = false;
    int jobs = 1;

    /// Full validation; throws ConfigError naming the offending field.
    void validate() const;

    /// Height cases actually run.
    std::vector<HeightCase> effective_cases() const;

    /// Number of rows run_experiment will produce.
    std::size_t planned_rows() const;
};

struct ResultRow {
    std::string scenario;
    Evaluator evaluator = Evaluator::analytic;
    Mode mode = Mode::height_aware;
    std::string height_case;
    SweepAxis axis = SweepAxis::tilt;
    double axis_value = 0.0;
    std::optional<double> beta_deg;      ///< unset for 2D beamforming
    std::optional<double> p_cov;         ///< unset when the evaluation failed
    std::optional<double> ci_halfwidth;  ///< Monte Carlo only
    std::optional<double> err_estimate;  ///< analytic only
    std::optional<std::uint64_t> seed;   ///< Monte Carlo only
    double runtime_ms = 0.0;
    std::string failure;                 ///< empty on success
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    /// "row tag: message" per failed row.
    std::vector<std::string> failures;
};

/// Runs the cross product height case x mode x evaluator x axis value.
/// Rows come back in that nesting order whatever the job count. A failing
/// row is recorded and the run continues.
ExperimentResult run_experiment(const ExperimentSpec &spec);

/// The canonical figure scenarios: tilt sweeps at two densities with four
/// height cases each, and threshold sweeps at the same densities comparing
/// the three beamforming modes.
std::vector<ExperimentSpec> emit_builtin_scenarios();

// ---------------------------------------------------------------- config I/O

/// Parses a JSON experiment description. Throws ConfigError with the line
/// number for syntax errors and the JSON pointer for bad fields.
ExperimentSpec parse_experiment(const std::string &text);
ExperimentSpec load_experiment(const std::string &path);

/// Canonical JSON of the spec with every default filled in. The job count
/// is left out: it does not affect results.
std::string serialize_experiment(const ExperimentSpec &spec);

/// Writes the result table. `timestamp` goes on its own header line and is
/// the only part of the output that varies between identical runs.
void write_csv(std::ostream &os, const ExperimentSpec &spec, const ExperimentResult &res,
               const std::string &timestamp);
void write_json(std::ostream &os, const ExperimentSpec &spec, const ExperimentResult &res,
                const std::string &timestamp);

/// Writes to spec.output in spec.format; throws IoError on failure.
void persist(const ExperimentSpec &spec, const ExperimentResult &res,
             const std::string &timestamp);

/// Current UTC time, ISO 8601.
std::string utc_timestamp();

} // namespace tiltcov
