#include "ksm/config.hpp"

#include "ksm/error.hpp"
#include "ksm/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <string_view>
#include <sstream>

namespace ksm {
namespace {

using nlohmann::json;

/// Reads one JSON object, remembering which keys were consumed so that
/// leftovers can be reported as unknown.
class Section {
public:
    /// Keys outside `allowed` are rejected up front, so a misspelled key is
    /// reported by name rather than as the required key it was meant to be.
    Section(const json& node, std::string path, std::initializer_list<std::string_view> allowed)
        : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) fail(path_.empty() ? "configuration" : path_, "expected an object");
        for (const auto& [key, value] : node_.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(key_path(key), "unknown key");
        }
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& raw(const std::string& key) {
        used_.insert(key);
        return node_.at(key);
    }

    double number(const std::string& key) {
        require(key);
        const json& v = raw(key);
        if (!v.is_number()) fail(key_path(key), "expected a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    int integer(const std::string& key) {
        require(key);
        const json& v = raw(key);
        if (!v.is_number_integer()) fail(key_path(key), "expected an integer");
        return v.get<int>();
    }
    int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) fail(key_path(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key) {
        require(key);
        const json& v = raw(key);
        if (!v.is_string()) fail(key_path(key), "expected a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& key, const std::string& fallback) { return has(key) ? string(key) : fallback; }

    std::vector<double> numbers(const std::string& key) {
        require(key);
        const json& v = raw(key);
        if (v.is_number()) return {v.get<double>()};
        if (!v.is_array()) fail(key_path(key), "expected an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) fail(key_path(key), "expected an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::vector<int> integers(const std::string& key) {
        require(key);
        const json& v = raw(key);
        if (v.is_number_integer()) return {v.get<int>()};
        if (!v.is_array()) fail(key_path(key), "expected an array of integers");
        std::vector<int> out;
        for (const auto& x : v) {
            if (!x.is_number_integer()) fail(key_path(key), "expected an array of integers");
            out.push_back(x.get<int>());
        }
        return out;
    }

    Section child(const std::string& key, std::initializer_list<std::string_view> allowed) {
        require(key);
        return Section(raw(key), key_path(key), allowed);
    }

    void require(const std::string& key) const {
        if (!has(key)) fail(key_path(key), "missing required key");
    }

    /// Throws on the first key that no reader asked for.
    void finish() const {
        for (const auto& [key, value] : node_.items()) {
            if (!used_.count(key)) fail(key_path(key), "unknown key");
        }
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& what) {
        throw ValidationError(path + ": " + what);
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> used_;
};

/// Runs a sub-validator and prefixes its message with the key path.
template <class Fn>
auto with_path(const std::string& path, Fn&& fn) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

std::array<double, 2> read_center(Section& s, int dim) {
    const auto c = s.numbers("center");
    if (static_cast<int>(c.size()) != dim) Section::fail(s.key_path("center"), "expected one coordinate per axis");
    return {c[0], dim == 2 ? c[1] : 0.5};
}

std::vector<double> read_snapshot_values(const std::string& file, const std::filesystem::path& base_dir,
                                         const Grid& grid) {
    std::filesystem::path p(file);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    const FieldSnapshot snap = read_field(p.string());
    if (!(snap.field.grid() == grid)) throw ValidationError("snapshot grid does not match the configured grid");
    return snap.field.data();
}

UProfile read_u0(Section s, const Grid& grid, const std::filesystem::path& base_dir) {
    const std::string kind = s.string("kind");
    UProfile out;
    if (kind == "constant") {
        out = ConstantProfile{s.number("value")};
    } else if (kind == "bump") {
        out = BumpProfile{read_center(s, grid.dim), s.number("width"), s.number("mass")};
    } else if (kind == "dirac") {
        out = DiracProfile{read_center(s, grid.dim), s.number("mass")};
    } else if (kind == "cells") {
        out = CellValues{s.numbers("values")};
    } else if (kind == "file") {
        const std::string file = s.string("file");
        out = CellValues{with_path(s.key_path("file"), [&] { return read_snapshot_values(file, base_dir, grid); })};
    } else {
        Section::fail(s.key_path("kind"), "unknown kind '" + kind + "' (constant, bump, dirac, cells, file)");
    }
    s.finish();
    return out;
}

VProfile read_v0(Section s, const Grid& grid, const std::filesystem::path& base_dir) {
    const std::string kind = s.string("kind");
    VProfile out;
    if (kind == "constant") {
        out = ConstantProfile{s.number("value")};
    } else if (kind == "cells") {
        out = CellValues{s.numbers("values")};
    } else if (kind == "file") {
        const std::string file = s.string("file");
        out = CellValues{with_path(s.key_path("file"), [&] { return read_snapshot_values(file, base_dir, grid); })};
    } else {
        Section::fail(s.key_path("kind"), "unknown kind '" + kind + "' (constant, cells, file)");
    }
    s.finish();
    return out;
}

MotilitySpec read_motility(Section s) {
    const std::string kind = s.string("kind");
    MotilitySpec out;
    if (kind == "power") {
        const double a = s.number("a");
        const double alpha = s.number("alpha");
        out = with_path("motility", [&] { return MotilitySpec::power(a, alpha); });
    } else if (kind == "exponential") {
        const double beta = s.number("beta");
        out = with_path("motility", [&] { return MotilitySpec::exponential(beta); });
    } else if (kind == "constant") {
        const double value = s.number("value");
        out = with_path("motility", [&] { return MotilitySpec::constant(value); });
    } else {
        Section::fail("motility.kind", "unknown kind '" + kind + "' (power, exponential, constant)");
    }
    s.finish();
    return out;
}

json center_json(const std::array<double, 2>& c, int dim) {
    return dim == 2 ? json::array({c[0], c[1]}) : json::array({c[0]});
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("configuration is not valid JSON: ") + e.what());
    }
    Section top(root, "", {"grid", "motility", "epsilon", "initial", "time", "output", "diagnostics", "sweep",
                              "relax", "refine"});
    RunConfig cfg;

    {
        Section g = top.child("grid", {"dim", "extents", "cells"});
        cfg.grid.dim = g.integer("dim");
        cfg.grid.extents = g.numbers("extents");
        cfg.grid.cells = g.integers("cells");
        g.finish();
    }
    const Grid grid = with_path("grid", [&] { return build_grid(cfg.grid.dim, cfg.grid.extents, cfg.grid.cells); });

    cfg.motility = read_motility(top.child("motility", {"kind", "a", "alpha", "beta", "value"}));

    cfg.eps = top.number("epsilon");
    if (!(cfg.eps >= 0.0 && cfg.eps < 1.0)) Section::fail("epsilon", "must lie in [0, 1)");

    {
        Section init = top.child("initial", {"u0", "v0"});
        cfg.initial.u0 = read_u0(init.child("u0", {"kind", "value", "center", "width", "mass", "values", "file"}), grid, base_dir);
        cfg.initial.v0 = read_v0(init.child("v0", {"kind", "value", "values", "file"}), grid, base_dir);
        init.finish();
        with_path("initial", [&] { return realize(cfg.initial, grid, cfg.eps).mass; });
    }

    {
        Section t = top.child("time", {"scheme", "dt", "T", "safety", "solver_tol", "max_iterations", "cfl_cap"});
        const std::string scheme = t.string("scheme", "imex");
        if (scheme == "imex") {
            cfg.time.scheme = Scheme::imex;
        } else if (scheme == "explicit") {
            cfg.time.scheme = Scheme::explicit_euler;
        } else {
            Section::fail("time.scheme", "unknown scheme '" + scheme + "' (imex, explicit)");
        }
        cfg.time.dt = t.number("dt");
        cfg.time.horizon = t.number("T");
        cfg.time.safety = t.number("safety", cfg.time.safety);
        cfg.time.solver_tol = t.number("solver_tol", cfg.time.solver_tol);
        cfg.time.max_iterations = t.integer("max_iterations", cfg.time.max_iterations);
        cfg.time.cfl_cap = t.number("cfl_cap", cfg.time.cfl_cap);
        t.finish();
        if (!(cfg.time.dt > 0.0)) Section::fail("time.dt", "must be positive");
        if (!(cfg.time.horizon >= 0.0)) Section::fail("time.T", "must be nonnegative");
        if (!(cfg.time.safety > 0.0 && cfg.time.safety <= 1.0)) Section::fail("time.safety", "must lie in (0, 1]");
        if (!(cfg.time.solver_tol > 0.0)) Section::fail("time.solver_tol", "must be positive");
        if (cfg.time.max_iterations < 0) Section::fail("time.max_iterations", "must be nonnegative");
        if (!(cfg.time.cfl_cap >= 0.0)) Section::fail("time.cfl_cap", "must be nonnegative");
    }

    if (top.has("output")) {
        Section o = top.child("output", {"cadence", "field_stride", "dir"});
        cfg.output.cadence = o.number("cadence", cfg.output.cadence);
        cfg.output.field_stride = o.integer("field_stride", cfg.output.field_stride);
        cfg.output.dir = o.string("dir", cfg.output.dir);
        o.finish();
        if (!(cfg.output.cadence > 0.0)) Section::fail("output.cadence", "must be positive");
        if (cfg.output.field_stride < 1) Section::fail("output.field_stride", "must be at least 1");
    }

    if (top.has("diagnostics")) {
        Section d = top.child("diagnostics", {"a", "b", "t_ref", "decay_threshold", "kappa", "tau", "weak_mode",
                                               "weak_start", "weak_end"});
        DiagnosticsSpec& ds = cfg.diagnostics;
        ds.a = d.number("a", ds.a);
        ds.b = d.number("b", ds.b);
        ds.t_ref = d.number("t_ref", ds.t_ref);
        ds.decay_threshold = d.number("decay_threshold", ds.decay_threshold);
        ds.kappa = d.number("kappa", ds.kappa);
        ds.tau = d.number("tau", ds.tau);
        ds.weak_mode = d.integer("weak_mode", ds.weak_mode);
        ds.weak_start = d.number("weak_start", ds.weak_start);
        ds.weak_end = d.number("weak_end", ds.weak_end);
        d.finish();
        if (!(ds.a > 0.0)) Section::fail("diagnostics.a", "must be positive");
        if (!(ds.b > 0.0)) Section::fail("diagnostics.b", "must be positive");
        if (!(ds.kappa > 1.0)) Section::fail("diagnostics.kappa", "must exceed 1");
        if (!(ds.tau > 0.0)) Section::fail("diagnostics.tau", "must be positive");
        if (ds.weak_mode < 0) Section::fail("diagnostics.weak_mode", "must be nonnegative");
    }

    if (top.has("sweep")) {
        Section s = top.child("sweep", {"epsilons"});
        cfg.sweep = SweepSpec{s.numbers("epsilons")};
        s.finish();
    }
    if (top.has("relax")) {
        Section s = top.child("relax", {"cells", "tau"});
        RelaxSpec r;
        r.cells = s.integers("cells");
        r.tau = s.number("tau", r.tau);
        s.finish();
        cfg.relax = r;
    }
    if (top.has("refine")) {
        Section s = top.child("refine", {"cells", "scale_dt"});
        RefineSpec r;
        r.cells = s.integers("cells");
        r.scale_dt = s.boolean("scale_dt", r.scale_dt);
        s.finish();
        cfg.refine = r;
    }

    top.finish();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open configuration " + path.string());
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

std::string config_to_json(const RunConfig& c) {
    json j;
    j["grid"] = {{"dim", c.grid.dim}, {"extents", c.grid.extents}, {"cells", c.grid.cells}};

    const MotilitySpec& m = c.motility;
    switch (m.kind()) {
        case MotilityKind::power:
            j["motility"] = {{"kind", "power"}, {"a", m.a()}, {"alpha", m.alpha()}};
            break;
        case MotilityKind::exponential:
            j["motility"] = {{"kind", "exponential"}, {"beta", m.beta()}};
            break;
        case MotilityKind::constant:
            j["motility"] = {{"kind", "constant"}, {"value", m.constant_value()}};
            break;
        case MotilityKind::custom:
            j["motility"] = {{"kind", "custom"}, {"name", m.name()}};
            break;
    }
    j["epsilon"] = c.eps;

    json u0;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ConstantProfile>) {
                u0 = {{"kind", "constant"}, {"value", p.value}};
            } else if constexpr (std::is_same_v<P, BumpProfile>) {
                u0 = {{"kind", "bump"}, {"center", center_json(p.center, c.grid.dim)}, {"width", p.width}, {"mass", p.mass}};
            } else if constexpr (std::is_same_v<P, DiracProfile>) {
                u0 = {{"kind", "dirac"}, {"center", center_json(p.center, c.grid.dim)}, {"mass", p.mass}};
            } else {
                u0 = {{"kind", "cells"}, {"values", p.values}};
            }
        },
        c.initial.u0);
    json v0;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ConstantProfile>) {
                v0 = {{"kind", "constant"}, {"value", p.value}};
            } else {
                v0 = {{"kind", "cells"}, {"values", p.values}};
            }
        },
        c.initial.v0);
    j["initial"] = {{"u0", u0}, {"v0", v0}};

    j["time"] = {{"scheme", c.time.scheme == Scheme::imex ? "imex" : "explicit"},
                 {"dt", c.time.dt},
                 {"T", c.time.horizon},
                 {"safety", c.time.safety},
                 {"solver_tol", c.time.solver_tol},
                 {"max_iterations", c.time.max_iterations},
                 {"cfl_cap", c.time.cfl_cap}};
    j["output"] = {{"cadence", c.output.cadence}, {"field_stride", c.output.field_stride}, {"dir", c.output.dir}};
    const DiagnosticsSpec& d = c.diagnostics;
    j["diagnostics"] = {{"a", d.a},         {"b", d.b},
                        {"t_ref", d.t_ref}, {"decay_threshold", d.decay_threshold},
                        {"kappa", d.kappa}, {"tau", d.tau},
                        {"weak_mode", d.weak_mode}, {"weak_start", d.weak_start},
                        {"weak_end", d.weak_end}};
    if (c.sweep) j["sweep"] = {{"epsilons", c.sweep->epsilons}};
    if (c.relax) j["relax"] = {{"cells", c.relax->cells}, {"tau", c.relax->tau}};
    if (c.refine) j["refine"] = {{"cells", c.refine->cells}, {"scale_dt", c.refine->scale_dt}};
    return j.dump(2);
}

}  // namespace ksm
