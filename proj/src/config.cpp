// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------
//
// JSON experiment files. Every field is optional and falls back to the
// library default; unknown keys are rejected so that typos do not pass
// silently.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "tiltcov/errors.hpp"
#include "tiltcov/experiment.hpp"

namespace tiltcov {

using json = nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string &ptr, const std::string &what)
{
    throw ConfigError("config field " + (ptr.empty() ? std::string("/") : ptr) + ": " + what);
}

// Read-only view of one JSON object plus its pointer, for error messages.
class Obj {
public:
    Obj(const json &j, std::string ptr) : j_(j), ptr_(std::move(ptr))
    {
        if (!j_.is_object()) {
            field_error(ptr_, "expected an object");
        }
    }

    void allow(std::initializer_list<const char *> keys) const
    {
        for (const auto &item : j_.items()) {
            const bool known = std::any_of(keys.begin(), keys.end(),
                                           [&](const char *k) { return item.key() == k; });
            if (!known) {
                field_error(path(item.key()), "unknown key");
            }
        }
    }

    bool has(const char *key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    const json &at(const char *key) const { return j_.at(key); }
    std::string path(const std::string &key) const { return ptr_ + "/" + key; }

    void number(const char *key, double &out) const
    {
        if (!has(key)) {
            return;
        }
        const json &v = j_.at(key);
        if (!v.is_number()) {
            field_error(path(key), "expected a number");
        }
        out = v.get<double>();
        if (!std::isfinite(out)) {
            field_error(path(key), "must be finite");
        }
    }

    void number(const char *key, std::optional<double> &out) const
    {
        if (!has(key)) {
            return;
        }
        double v = 0.0;
        number(key, v);
        out = v;
    }

    void integer(const char *key, int &out) const
    {
        if (!has(key)) {
            return;
        }
        const json &v = j_.at(key);
        if (!v.is_number_integer()) {
            field_error(path(key), "expected an integer");
        }
        const auto wide = v.get<long long>();
        if (wide < -1'000'000'000LL || wide > 1'000'000'000LL) {
            field_error(path(key), "out of range");
        }
        out = static_cast<int>(wide);
    }

    void unsigned64(const char *key, std::uint64_t &out) const
    {
        if (!has(key)) {
            return;
        }
        const json &v = j_.at(key);
        if (!v.is_number_unsigned()) {
            field_error(path(key), "expected a non-negative integer");
        }
        out = v.get<std::uint64_t>();
    }

    void boolean(const char *key, bool &out) const
    {
        if (!has(key)) {
            return;
        }
        const json &v = j_.at(key);
        if (!v.is_boolean()) {
            field_error(path(key), "expected true or false");
        }
        out = v.get<bool>();
    }

    void string(const char *key, std::string &out) const
    {
        if (!has(key)) {
            return;
        }
        const json &v = j_.at(key);
        if (!v.is_string()) {
            field_error(path(key), "expected a string");
        }
        out = v.get<std::string>();
    }

private:
    const json &j_;
    std::string ptr_;
};

template <class T, class Parse>
std::vector<T> string_list(const Obj &o, const char *key, Parse parse)
{
    const json &v = o.at(key);
    if (!v.is_array()) {
        field_error(o.path(key), "expected a list of strings");
    }
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = o.path(key) + "/" + std::to_string(i);
        if (!v[i].is_string()) {
            field_error(p, "expected a string");
        }
        try {
            out.push_back(parse(v[i].get<std::string>()));
        } catch (const ConfigError &e) {
            field_error(p, e.what());
        }
    }
    return out;
}

std::vector<double> parse_grid(const json &v, const std::string &ptr)
{
    std::vector<double> out;
    if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) {
                field_error(ptr + "/" + std::to_string(i), "expected a number");
            }
            out.push_back(v[i].get<double>());
        }
        return out;
    }
    Obj range(v, ptr);
    range.allow({"start", "stop", "step"});
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;
    for (const char *k : {"start", "stop", "step"}) {
        if (!range.has(k)) {
            field_error(range.path(k), "missing");
        }
    }
    range.number("start", start);
    range.number("stop", stop);
    range.number("step", step);
    if (!(step > 0.0)) {
        field_error(range.path("step"), "must be > 0");
    }
    if (stop < start) {
        field_error(ptr, "stop must be >= start");
    }
    const double span = (stop - start) / step;
    if (span > 1e6) {
        field_error(ptr, "range has more than a million points");
    }
    // Multiplying out each point avoids accumulated drift; the stop value is
    // kept when it lies on the lattice up to rounding.
    const auto count = static_cast<long>(std::floor(span + 1e-9));
    for (long i = 0; i <= count; ++i) {
        out.push_back(start + static_cast<double>(i) * step);
    }
    if (std::abs(out.back() - stop) <= 1e-9 * step) {
        out.back() = stop;
    }
    return out;
}

void read_network(const Obj &o, NetworkConfig &net)
{
    o.allow({"lambda_bs", "h_bs", "h0", "sir_threshold_db", "approx_order", "exclusion_radius",
             "antenna", "path_loss", "height_model"});
    o.number("lambda_bs", net.lambda_bs);
    o.number("h_bs", net.h_bs);
    o.number("h0", net.h0);
    o.number("sir_threshold_db", net.sir_threshold_db);
    o.integer("approx_order", net.approx_order);
    o.number("exclusion_radius", net.exclusion_radius);
    if (o.has("antenna")) {
        Obj a(o.at("antenna"), o.path("antenna"));
        a.allow({"tilt_deg", "theta3db_deg", "sll_el_db", "enabled"});
        a.number("tilt_deg", net.pattern.tilt_deg);
        a.number("theta3db_deg", net.pattern.theta3db_deg);
        a.number("sll_el_db", net.pattern.sll_el_db);
        a.boolean("enabled", net.pattern.enabled);
    }
    if (o.has("path_loss")) {
        Obj p(o.at("path_loss"), o.path("path_loss"));
        p.allow({"exponent", "scale"});
        p.number("exponent", net.path_loss.exponent_v);
        p.number("scale", net.path_loss.scale_c);
    }
    if (o.has("height_model")) {
        Obj h(o.at("height_model"), o.path("height_model"));
        h.allow({"a", "b", "c", "h_min", "h_max", "h_atom"});
        h.number("a", net.height_model.a);
        h.number("b", net.height_model.b);
        h.number("c", net.height_model.c);
        h.number("h_min", net.height_model.h_min);
        h.number("h_max", net.height_model.h_max);
        h.number("h_atom", net.height_model.h_atom);
    }
}

json opt_number(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }

std::size_t line_of(const std::string &text, std::size_t byte)
{
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(
                   std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

} // namespace

ExperimentSpec parse_experiment(const std::string &text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error &e) {
        // e.byte is one past the offending character.
        const std::size_t line = line_of(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ConfigError("config syntax error at line " + std::to_string(line) + ": " +
                          e.what());
    }

    ExperimentSpec spec;
    Obj o(root, "");
    o.allow({"scenario", "network", "sweep", "evaluators", "modes", "height_cases", "campaign",
             "search", "quadrature", "output", "format", "timings", "jobs"});
    o.string("scenario", spec.scenario);
    if (o.has("network")) {
        read_network(Obj(o.at("network"), o.path("network")), spec.network);
    }
    if (!o.has("sweep")) {
        field_error(o.path("sweep"), "missing");
    }
    {
        Obj s(o.at("sweep"), o.path("sweep"));
        s.allow({"axis", "grid"});
        std::string axis = to_string(spec.axis);
        s.string("axis", axis);
        try {
            spec.axis = parse_axis(axis);
        } catch (const ConfigError &e) {
            field_error(s.path("axis"), e.what());
        }
        if (!s.has("grid")) {
            field_error(s.path("grid"), "missing");
        }
        spec.grid = parse_grid(s.at("grid"), s.path("grid"));
    }
    if (o.has("evaluators")) {
        spec.evaluators = string_list<Evaluator>(o, "evaluators", parse_evaluator);
    }
    if (o.has("modes")) {
        spec.modes = string_list<Mode>(o, "modes", parse_mode);
    }
    if (o.has("height_cases")) {
        const json &cases = o.at("height_cases");
        if (!cases.is_array()) {
            field_error(o.path("height_cases"), "expected a list");
        }
        for (std::size_t i = 0; i < cases.size(); ++i) {
            Obj c(cases[i], o.path("height_cases") + "/" + std::to_string(i));
            c.allow({"label", "a", "h0"});
            HeightCase hc;
            hc.a = spec.network.height_model.a;
            hc.h0 = spec.network.h0;
            c.string("label", hc.label);
            c.number("a", hc.a);
            c.number("h0", hc.h0);
            spec.height_cases.push_back(hc);
        }
    }
    if (o.has("campaign")) {
        Obj c(o.at("campaign"), o.path("campaign"));
        c.allow({"trials", "seed", "window_radius"});
        c.unsigned64("trials", spec.campaign.trials);
        c.unsigned64("seed", spec.campaign.seed);
        c.number("window_radius", spec.campaign.window_radius);
    }
    if (o.has("search")) {
        Obj s(o.at("search"), o.path("search"));
        s.allow({"grid_step_deg", "refine", "refine_tol_deg"});
        s.number("grid_step_deg", spec.search.grid_step_deg);
        s.boolean("refine", spec.search.refine);
        s.number("refine_tol_deg", spec.search.refine_tol_deg);
    }
    if (o.has("quadrature")) {
        Obj q(o.at("quadrature"), o.path("quadrature"));
        q.allow({"rel_tol", "abs_tol", "outer_trunc_mass", "radial_trunc_factor"});
        q.number("rel_tol", spec.quad.rel_tol);
        q.number("abs_tol", spec.quad.abs_tol);
        q.number("outer_trunc_mass", spec.quad.outer_trunc_mass);
        q.number("radial_trunc_factor", spec.quad.radial_trunc_factor);
    }
    o.string("output", spec.output);
    if (o.has("format")) {
        std::string f;
        o.string("format", f);
        if (f == "csv") {
            spec.format = OutputFormat::csv;
        } else if (f == "json") {
            spec.format = OutputFormat::json;
        } else {
            field_error(o.path("format"), "expected \"csv\" or \"json\"");
        }
    }
    o.boolean("timings", spec.timings);
    o.integer("jobs", spec.jobs);
    return spec;
}

ExperimentSpec load_experiment(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config file " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("cannot read config file " + path);
    }
    return parse_experiment(buf.str());
}

std::string serialize_experiment(const ExperimentSpec &spec)
{
    const NetworkConfig &n = spec.network;
    json net = {
        {"lambda_bs", n.lambda_bs},
        {"h_bs", n.h_bs},
        {"h0", n.h0},
        {"sir_threshold_db", n.sir_threshold_db},
        {"approx_order", n.approx_order},
        {"exclusion_radius", opt_number(n.exclusion_radius)},
        {"antenna",
         {{"tilt_deg", n.pattern.tilt_deg},
          {"theta3db_deg", n.pattern.theta3db_deg},
          {"sll_el_db", n.pattern.sll_el_db},
          {"enabled", n.pattern.enabled}}},
        {"path_loss", {{"exponent", n.path_loss.exponent_v}, {"scale", n.path_loss.scale_c}}},
        {"height_model",
         {{"a", n.height_model.a},
          {"b", n.height_model.b},
          {"c", n.height_model.c},
          {"h_min", n.height_model.h_min},
          {"h_max", n.height_model.h_max},
          {"h_atom", n.height_model.h_atom}}},
    };
    json evals = json::array();
    for (Evaluator e : spec.evaluators) {
        evals.push_back(to_string(e));
    }
    json modes = json::array();
    for (Mode m : spec.modes) {
        modes.push_back(to_string(m));
    }
    json cases = json::array();
    for (const HeightCase &c : spec.height_cases) {
        cases.push_back({{"label", c.label}, {"a", c.a}, {"h0", c.h0}});
    }
    json root = {
        {"scenario", spec.scenario},
        {"network", net},
        {"sweep", {{"axis", to_string(spec.axis)}, {"grid", spec.grid}}},
        {"evaluators", evals},
        {"modes", modes},
        {"height_cases", cases},
        {"campaign",
         {{"trials", spec.campaign.trials},
          {"seed", spec.campaign.seed},
          {"window_radius", opt_number(spec.campaign.window_radius)}}},
        {"search",
         {{"grid_step_deg", spec.search.grid_step_deg},
          {"refine", spec.search.refine},
          {"refine_tol_deg", spec.search.refine_tol_deg}}},
        {"quadrature",
         {{"rel_tol", spec.quad.rel_tol},
          {"abs_tol", spec.quad.abs_tol},
          {"outer_trunc_mass", spec.quad.outer_trunc_mass},
          {"radial_trunc_factor", spec.quad.radial_trunc_factor}}},
        {"output", spec.output},
        {"format", spec.format == OutputFormat::csv ? "csv" : "json"},
        {"timings", spec.timings},
    };
    return root.dump();
}

} // namespace tiltcov
