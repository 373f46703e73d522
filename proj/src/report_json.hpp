#pragma once

// JSON renderings of the report types written by the command-line tool.

#include "ksm/diagnostics.hpp"
#include "ksm/experiments.hpp"

#include <json.hpp>

#include <cmath>
#include <optional>

namespace ksm::detail {

using nlohmann::json;

// JSON has no infinity; unbounded constants are written as null.
inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json optional_time(const std::optional<double>& t) { return t ? json(*t) : json(nullptr); }

inline json to_json(const BoundReport& r) {
    return {{"absorb_integral", r.absorb_integral}, {"absorb_bound", r.absorb_bound},
            {"absorb_margin", r.absorb_margin},     {"absorb_pass", r.absorb_pass},
            {"grad2_integral", r.grad2_integral},   {"grad2_bound", r.grad2_bound},
            {"grad2_margin", r.grad2_margin},       {"grad2_pass", r.grad2_pass},
            {"partial", r.partial}};
}

inline json to_json(const InequalityConstant& c) {
    return {{"gamma", finite_or_null(c.gamma)}, {"finite", c.finite()}, {"binding_time", c.binding_time}};
}

inline json to_json(const InequalityReport& r) {
    return {{"gradient_energy", to_json(r.gradient_energy)},
            {"hminus", to_json(r.hminus)},
            {"hminus_lq", to_json(r.hminus_lq)},
            {"lyapunov", to_json(r.lyapunov)},
            {"samples", r.samples},
            {"unresolved", r.unresolved},
            {"sign_disagreements", r.sign_disagreements},
            {"low_confidence", r.low_confidence}};
}

inline json to_json(const DecayReport& r) {
    return {{"t_ref", r.t_ref},
            {"threshold", r.threshold},
            {"hm1_ratio", r.hm1_ratio},
            {"vinf_ratio", r.vinf_ratio},
            {"F_ratio", r.F_ratio},
            {"hm1_below", optional_time(r.hm1_below)},
            {"vinf_below", optional_time(r.vinf_below)},
            {"F_below", optional_time(r.F_below)}};
}

inline json to_json(const SupersolutionFit& f, double tau, double kappa) {
    return {{"tau", tau}, {"kappa", kappa}, {"c7", f.c7}, {"binding_time", f.binding_time}, {"samples", f.samples}};
}

inline json to_json(const WeakResidual& w) { return {{"r_u", w.r_u}, {"r_v", w.r_v}}; }

inline json to_json(const AuditReport& a) {
    return {{"pass", a.pass()},
            {"failures", a.failures},
            {"max_mass_drift", a.max_mass_drift},
            {"max_vinf_increase", a.max_vinf_increase},
            {"entries_valid", a.entries_valid},
            {"time_monotone", a.time_monotone},
            {"bounds", to_json(a.bounds)}};
}

inline json to_json(const DiagRecord& r) {
    return {{"t", r.t},         {"mass", r.mass},   {"vinf", r.vinf}, {"grad2", r.grad2},
            {"grad4", r.grad4}, {"lap2", r.lap2},   {"udev2", r.udev2}, {"uL2", r.uL2},
            {"hm1", r.hm1},     {"y", r.y},         {"F", r.F},       {"absorb", r.absorb}};
}

inline constexpr const char* kProxyNote =
    "weak and weak-star limits are replaced by L2 Cauchy criteria at a fixed terminal time";

inline json to_json(const SweepReport& r) {
    json terminal = json::array();
    for (const auto& t : r.terminal) terminal.push_back(to_json(t));
    json functionals = json::object();
    for (std::size_t w = 0; w < r.weight_names.size(); ++w) functionals[r.weight_names[w]] = r.functionals[w];
    return {{"note", kProxyNote},
            {"epsilons", r.epsilons},
            {"mass", r.mass},
            {"terminal", terminal},
            {"cauchy", r.cauchy},
            {"cauchy_decreasing", r.cauchy_decreasing()},
            {"cauchy_rates", r.cauchy_rates},
            {"functionals", functionals},
            {"complete", r.complete},
            {"failure", r.failure}};
}

inline json to_json(const RelaxReport& r) {
    json levels = json::array();
    for (const auto& l : r.levels) {
        levels.push_back({{"cells", l.cells},
                          {"uL2_initial", l.uL2_initial},
                          {"uL2_tau", l.uL2_tau},
                          {"uL2_tau_plus_one", l.uL2_tau_plus_one},
                          {"window_integral", l.window_integral},
                          {"max_mass_drift", l.max_mass_drift}});
    }
    return {{"note", kProxyNote},
            {"tau", r.tau},
            {"mass", r.mass},
            {"levels", levels},
            {"sup_window_integral", r.sup_window_integral},
            {"tau_spread", r.tau_spread},
            {"initial_divergence", r.initial_divergence},
            {"profile_taus", r.profile_taus},
            {"profile_uL2", r.profile_uL2},
            {"profile_exponent", r.profile_exponent},
            {"complete", r.complete},
            {"failure", r.failure}};
}

inline json to_json(const ConvergenceReport& r) {
    json levels = json::array();
    for (const auto& l : r.levels) {
        levels.push_back({{"cells", l.cells},
                          {"dt", l.dt},
                          {"u_error", l.u_error},
                          {"v_error", l.v_error},
                          {"residual", to_json(l.residual)}});
    }
    return {{"note", kProxyNote},
            {"mass", r.mass},
            {"levels", levels},
            {"u_orders", r.u_orders},
            {"v_orders", r.v_orders},
            {"residual_u_orders", r.residual_u_orders},
            {"residual_v_orders", r.residual_v_orders},
            {"residual_u_slope", r.residual_u_slope},
            {"residual_v_slope", r.residual_v_slope},
            {"complete", r.complete},
            {"failure", r.failure}};
}

}  // namespace ksm::detail
