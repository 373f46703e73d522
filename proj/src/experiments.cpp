#include "ksm/experiments.hpp"

#include "ksm/error.hpp"
#include "ksm/stepper.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace ksm {
namespace {

double l2_distance(const Field& a, const Field& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s * a.grid().cell_volume());
}

const FieldFrame& terminal_frame(const Trajectory& traj) {
    if (traj.frames.empty()) throw ValidationError("trajectory has no stored fields");
    return traj.frames.back();
}

void check_same_mass(double reference, double mass, const char* experiment) {
    if (std::abs(mass - reference) > 1e-12 * std::max(1.0, std::abs(reference))) {
        std::ostringstream msg;
        msg << experiment << ": member runs disagree on the initial mass (" << reference << " vs " << mass << ")";
        throw NumericalError(msg.str());
    }
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::vector<WeightFunction> builtin_weights() {
    return {
        {"one", [](const Grid& g) { return Field(g, 1.0); }},
        {"cosine",
         [](const Grid& g) {
             return sample(g, [&](double x, double) { return 1.0 + std::cos(std::numbers::pi * x / g.extents[0]); });
         }},
    };
}

double absorption_functional(const Trajectory& traj, double eps_eval, const Field& psi) {
    const auto& frames = traj.frames;
    if (frames.size() < 2) throw ValidationError("absorption_functional: need at least 2 stored field frames");
    std::vector<double> inner_values(frames.size());
    for (std::size_t n = 0; n < frames.size(); ++n) {
        const FieldFrame& fr = frames[n];
        double s = 0.0;
        for (std::size_t i = 0; i < fr.u.size(); ++i) s += fr.u[i] * fr.v[i] / (1.0 + eps_eval * fr.u[i]) * psi[i];
        inner_values[n] = s * fr.u.grid().cell_volume();
    }
    double total = 0.0;
    for (std::size_t n = 1; n < frames.size(); ++n) {
        total += 0.5 * (frames[n].t - frames[n - 1].t) * (inner_values[n] + inner_values[n - 1]);
    }
    return total;
}

bool SweepReport::cauchy_decreasing() const {
    for (std::size_t i = 1; i < cauchy.size(); ++i) {
        if (!(cauchy[i] < cauchy[i - 1])) return false;
    }
    return !cauchy.empty();
}

bool SweepReport::functional_increments_decreasing(std::size_t weight) const {
    const auto& I = functionals.at(weight);
    for (std::size_t i = 2; i < I.size(); ++i) {
        if (!(std::abs(I[i] - I[i - 1]) < std::abs(I[i - 1] - I[i - 2]))) return false;
    }
    return I.size() >= 3;
}

SweepReport epsilon_sweep(const RunConfig& base, std::span<const double> epsilons, const RunObserver& observer) {
    if (epsilons.size() < 3) throw ValidationError("epsilon sweep: >= 3 entries required");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] >= 0.0 && epsilons[i] < 1.0)) throw ValidationError("epsilon sweep: entries must lie in [0, 1)");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw ValidationError("epsilon sweep: entries must be strictly decreasing");
    }

    SweepReport rep;
    rep.epsilons.assign(epsilons.begin(), epsilons.end());
    const auto weights = builtin_weights();
    for (const auto& w : weights) rep.weight_names.push_back(w.name);
    rep.functionals.assign(weights.size(), {});

    std::vector<FieldFrame> terminals;
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        RunConfig cfg = base;
        cfg.eps = epsilons[i];
        const Trajectory traj = run(cfg);
        if (observer) observer(i, cfg, traj);
        if (i == 0) rep.mass = traj.meta.mass0;
        check_same_mass(rep.mass, traj.meta.mass0, "epsilon sweep");
        if (!traj.complete) {
            rep.complete = false;
            rep.failure = "run with eps=" + std::to_string(epsilons[i]) + " failed: " + traj.failure;
            return rep;
        }
        rep.terminal.push_back(traj.records.back());
        terminals.push_back(terminal_frame(traj));
        for (std::size_t w = 0; w < weights.size(); ++w) {
            rep.functionals[w].push_back(absorption_functional(traj, epsilons[i], weights[w].build(traj.meta.grid)));
        }
    }
    for (std::size_t i = 0; i + 1 < terminals.size(); ++i) {
        rep.cauchy.push_back(l2_distance(terminals[i].u, terminals[i + 1].u) +
                             l2_distance(terminals[i].v, terminals[i + 1].v));
    }
    bool positive = true;
    for (double e : rep.epsilons) positive = positive && e > 0.0;
    if (positive) {
        for (std::size_t i = 0; i + 1 < rep.cauchy.size(); ++i) {
            rep.cauchy_rates.push_back(std::log(rep.cauchy[i] / rep.cauchy[i + 1]) /
                                       std::log(rep.epsilons[i] / rep.epsilons[i + 1]));
        }
    }
    return rep;
}

double value_at(const std::vector<DiagRecord>& recs, double DiagRecord::*member, double t) {
    if (recs.empty()) throw ValidationError("value_at: empty record series");
    if (t <= recs.front().t) return recs.front().*member;
    for (std::size_t k = 1; k < recs.size(); ++k) {
        if (t <= recs[k].t) {
            const double w = (t - recs[k - 1].t) / (recs[k].t - recs[k - 1].t);
            return (1.0 - w) * (recs[k - 1].*member) + w * (recs[k].*member);
        }
    }
    if (t > recs.back().t * (1.0 + 1e-12) + 1e-12) throw ValidationError("value_at: time beyond the recorded horizon");
    return recs.back().*member;
}

RelaxReport relaxation_experiment(const RunConfig& base, std::span<const int> cells, double tau,
                                  const RunObserver& observer) {
    if (!std::holds_alternative<DiracProfile>(base.initial.u0)) {
        throw ValidationError("relaxation experiment: initial.u0 must be of dirac kind");
    }
    if (!(tau > 0.0)) throw ValidationError("relaxation experiment: tau must be positive");
    if (cells.size() < 2) throw ValidationError("relaxation experiment: at least 2 grids required");
    for (std::size_t i = 1; i < cells.size(); ++i) {
        if (!(cells[i] > cells[i - 1])) throw ValidationError("relaxation experiment: grids must strictly refine");
    }

    RelaxReport rep;
    rep.tau = tau;
    const double horizon = tau + 1.0;
    const Trajectory* finest = nullptr;
    Trajectory last;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        RunConfig cfg = base;
        const double ratio = static_cast<double>(cells[i]) / base.grid.cells[0];
        cfg.grid.cells[0] = cells[i];
        if (cfg.grid.dim == 2) cfg.grid.cells[1] = static_cast<int>(std::lround(base.grid.cells[1] * ratio));
        cfg.time.horizon = horizon;
        Trajectory traj = run(cfg);
        if (observer) observer(i, cfg, traj);
        if (i == 0) rep.mass = traj.meta.mass0;
        check_same_mass(rep.mass, traj.meta.mass0, "relaxation experiment");
        if (!traj.complete) {
            rep.complete = false;
            rep.failure = "run on " + std::to_string(cells[i]) + " cells failed: " + traj.failure;
            return rep;
        }
        RelaxLevel lvl;
        lvl.cells = cells[i];
        lvl.uL2_initial = traj.records.front().uL2;
        lvl.uL2_tau = value_at(traj.records, &DiagRecord::uL2, tau);
        lvl.uL2_tau_plus_one = value_at(traj.records, &DiagRecord::uL2, horizon);
        for (std::size_t k = 1; k < traj.records.size(); ++k) {
            const DiagRecord& a = traj.records[k - 1];
            const DiagRecord& b = traj.records[k];
            if (a.t < tau - 1e-12) continue;
            lvl.window_integral += 0.5 * (b.t - a.t) * (a.uL2 + b.uL2);
        }
        lvl.max_mass_drift = traj.monitor.max_mass_drift;
        rep.levels.push_back(lvl);
        last = std::move(traj);
        finest = &last;
    }

    double lo = rep.levels.front().uL2_tau, hi = lo;
    for (const auto& l : rep.levels) {
        rep.sup_window_integral = std::max(rep.sup_window_integral, l.window_integral);
        lo = std::min(lo, l.uL2_tau);
        hi = std::max(hi, l.uL2_tau);
    }
    rep.tau_spread = hi / lo;
    rep.initial_divergence = rep.levels.back().uL2_initial / rep.levels.front().uL2_initial;

    std::vector<double> lx, ly;
    for (double t : {0.05, 0.1, 0.2}) {
        if (t > finest->records.back().t) continue;
        const double val = value_at(finest->records, &DiagRecord::uL2, t);
        rep.profile_taus.push_back(t);
        rep.profile_uL2.push_back(val);
        lx.push_back(std::log(t));
        ly.push_back(std::log(val));
    }
    if (lx.size() >= 2) rep.profile_exponent = -least_squares_slope(lx, ly);
    return rep;
}

Field restrict_to(const Field& fine, const Grid& coarse) {
    const Grid& g = fine.grid();
    if (g.dim != coarse.dim) throw ValidationError("restrict_to: dimension mismatch");
    std::array<int, 2> r{1, 1};
    for (int a = 0; a < g.dim; ++a) {
        if (g.cells[a] % coarse.cells[a] != 0) throw ValidationError("restrict_to: grids are not nested");
        r[a] = g.cells[a] / coarse.cells[a];
    }
    Field out(coarse, 0.0);
    for (int i0 = 0; i0 < g.cells[0]; ++i0) {
        for (int i1 = 0; i1 < g.cells[1]; ++i1) {
            out[coarse.index(i0 / r[0], i1 / r[1])] += fine[g.index(i0, i1)];
        }
    }
    for (double& x : out.values()) x /= static_cast<double>(r[0] * r[1]);
    return out;
}

CosineBumpTest default_test_function(const RunConfig& config) {
    const double T = config.time.horizon;
    const double start = config.diagnostics.weak_start >= 0.0 ? config.diagnostics.weak_start : 0.1 * T;
    const double end = config.diagnostics.weak_end >= 0.0 ? config.diagnostics.weak_end : 0.9 * T;
    return CosineBumpTest({config.diagnostics.weak_mode, 0}, start, end);
}

ConvergenceReport refinement_study(const RunConfig& base, std::span<const int> cells, bool scale_dt,
                                   const RunObserver& observer) {
    if (cells.size() < 3) throw ValidationError("refinement study: at least 3 levels required");
    for (std::size_t i = 1; i < cells.size(); ++i) {
        if (cells[i] != 2 * cells[i - 1]) throw ValidationError("refinement study: levels must strictly refine by halving h");
    }

    ConvergenceReport rep;
    std::vector<FieldFrame> terminals;
    std::vector<Grid> grids;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        RunConfig cfg = base;
        const double ratio = static_cast<double>(cells[i]) / cells[0];
        cfg.grid.cells[0] = cells[i];
        if (cfg.grid.dim == 2) cfg.grid.cells[1] = static_cast<int>(std::lround(base.grid.cells[1] * ratio));
        if (scale_dt) {
            cfg.time.dt = base.time.dt / ratio;
            cfg.output.cadence = base.output.cadence / ratio;
        }
        const Trajectory traj = run(cfg);
        if (observer) observer(i, cfg, traj);
        if (i == 0) rep.mass = traj.meta.mass0;
        check_same_mass(rep.mass, traj.meta.mass0, "refinement study");
        if (!traj.complete) {
            rep.complete = false;
            rep.failure = "level " + std::to_string(cells[i]) + " failed: " + traj.failure;
            return rep;
        }
        RefinementLevel lvl;
        lvl.cells = cells[i];
        lvl.dt = traj.meta.dt;
        lvl.residual = weak_residual(traj, default_test_function(cfg));
        rep.levels.push_back(lvl);
        terminals.push_back(terminal_frame(traj));
        grids.push_back(traj.meta.grid);
    }

    const FieldFrame& ref = terminals.back();
    for (std::size_t i = 0; i + 1 < terminals.size(); ++i) {
        rep.levels[i].u_error = l2_distance(restrict_to(ref.u, grids[i]), terminals[i].u);
        rep.levels[i].v_error = l2_distance(restrict_to(ref.v, grids[i]), terminals[i].v);
    }
    for (std::size_t i = 0; i + 2 < rep.levels.size(); ++i) {
        rep.u_orders.push_back(std::log2(rep.levels[i].u_error / rep.levels[i + 1].u_error));
        rep.v_orders.push_back(std::log2(rep.levels[i].v_error / rep.levels[i + 1].v_error));
    }
    std::vector<double> lh, lru, lrv;
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        if (i + 1 < rep.levels.size()) {
            rep.residual_u_orders.push_back(std::log2(rep.levels[i].residual.r_u / rep.levels[i + 1].residual.r_u));
            rep.residual_v_orders.push_back(std::log2(rep.levels[i].residual.r_v / rep.levels[i + 1].residual.r_v));
        }
        lh.push_back(std::log(grids[i].h[0]));
        lru.push_back(std::log(rep.levels[i].residual.r_u));
        lrv.push_back(std::log(rep.levels[i].residual.r_v));
    }
    rep.residual_u_slope = least_squares_slope(lh, lru);
    rep.residual_v_slope = least_squares_slope(lh, lrv);
    return rep;
}

}  // namespace ksm
