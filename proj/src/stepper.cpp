#include "ksm/stepper.hpp"

#include "ksm/diagnostics.hpp"
#include "ksm/error.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <sstream>

namespace ksm {
namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

double relative_residual(const Vector& r, const Vector& b) {
    const double bn = b.lpNorm<Eigen::Infinity>();
    const double rn = r.lpNorm<Eigen::Infinity>();
    return bn > 0.0 ? rn / bn : rn;
}

void check_finite(const Field& f, const char* what, double t) {
    for (double x : f.values()) {
        if (!std::isfinite(x)) {
            std::ostringstream msg;
            msg << "non-finite " << what << " value at t=" << t;
            throw NumericalError(msg.str());
        }
    }
}

/// Tridiagonal system sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i].
struct Tridiagonal {
    std::vector<double> sub, diag, sup;

    explicit Tridiagonal(std::size_t n) : sub(n, 0.0), diag(n, 0.0), sup(n, 0.0) {}

    Vector apply(const Vector& x) const {
        const auto n = static_cast<Eigen::Index>(diag.size());
        Vector y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double s = diag[i] * x[i];
            if (i > 0) s += sub[i] * x[i - 1];
            if (i + 1 < n) s += sup[i] * x[i + 1];
            y[i] = s;
        }
        return y;
    }

    // Thomas elimination; stable without pivoting for the diagonally
    // dominant M-matrices assembled here.
    Vector solve(const Vector& rhs) const {
        const std::size_t n = diag.size();
        std::vector<double> c(n), d(n);
        double denom = diag[0];
        c[0] = sup[0] / denom;
        d[0] = rhs[0] / denom;
        for (std::size_t i = 1; i < n; ++i) {
            denom = diag[i] - sub[i] * c[i - 1];
            c[i] = sup[i] / denom;
            d[i] = (rhs[static_cast<Eigen::Index>(i)] - sub[i] * d[i - 1]) / denom;
        }
        Vector x(static_cast<Eigen::Index>(n));
        x[static_cast<Eigen::Index>(n - 1)] = d[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) {
            x[static_cast<Eigen::Index>(i)] = d[i] - c[i] * x[static_cast<Eigen::Index>(i + 1)];
        }
        return x;
    }
};

SparseMatrix assemble_laplacian(const Grid& g) {
    std::vector<Eigen::Triplet<double>> t;
    const double w0 = 1.0 / (g.h[0] * g.h[0]);
    const double w1 = 1.0 / (g.h[1] * g.h[1]);
    auto link = [&](std::size_t a, std::size_t b, double w) {
        const auto ia = static_cast<int>(a);
        const auto ib = static_cast<int>(b);
        t.emplace_back(ia, ib, w);
        t.emplace_back(ib, ia, w);
        t.emplace_back(ia, ia, -w);
        t.emplace_back(ib, ib, -w);
    };
    for (int i0 = 0; i0 < g.cells[0]; ++i0) {
        for (int i1 = 0; i1 < g.cells[1]; ++i1) {
            const std::size_t c = g.index(i0, i1);
            if (i0 + 1 < g.cells[0]) link(c, g.index(i0 + 1, i1), w0);
            if (i1 + 1 < g.cells[1]) link(c, g.index(i0, i1 + 1), w1);
        }
    }
    const auto n = static_cast<Eigen::Index>(g.size());
    SparseMatrix L(n, n);
    L.setFromTriplets(t.begin(), t.end());
    L.makeCompressed();
    return L;
}

}  // namespace

struct ImexStepper::Impl {
    Grid grid;
    SolverOptions options;
    // 2D only.
    SparseMatrix laplacian;
    SparseMatrix system;
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;

    Impl(const Grid& g, SolverOptions o) : grid(g), options(o) {
        if (grid.dim == 2) {
            laplacian = assemble_laplacian(grid);
            const auto n = laplacian.rows();
            SparseMatrix id(n, n);
            id.setIdentity();
            system = id - laplacian;  // pattern shared by both solves
            system.makeCompressed();
        }
    }

    // Direct solve followed by iterative refinement until the residual tolerance holds.
    template <class Apply, class Solve>
    Vector refine(const Vector& b, Apply&& apply, Solve&& solve, StepStats* stats) {
        Vector x = solve(b);
        double res = relative_residual(b - apply(x), b);
        int sweeps = 0;
        while (res > options.tolerance && sweeps < options.max_iterations) {
            x += solve(b - apply(x));
            res = relative_residual(b - apply(x), b);
            ++sweeps;
        }
        if (!(res <= options.tolerance)) {
            std::ostringstream msg;
            msg << "linear solver did not converge: relative residual " << res << " > " << options.tolerance
                << " after " << sweeps << " refinement sweeps";
            throw NumericalError(msg.str());
        }
        if (stats) {
            stats->residual = std::max(stats->residual, res);
            stats->refinements += sweeps;
        }
        return x;
    }

    Vector solve_1d(const Tridiagonal& m, const Vector& b, StepStats* stats) {
        return refine(
            b, [&](const Vector& x) { return m.apply(x); }, [&](const Vector& r) { return m.solve(r); }, stats);
    }

    Vector solve_2d(const Vector& b, StepStats* stats) {
        if (!analyzed) {
            lu.analyzePattern(system);
            analyzed = true;
        }
        lu.factorize(system);
        if (lu.info() != Eigen::Success) throw NumericalError("sparse LU factorization failed");
        return refine(
            b, [&](const Vector& x) { return Vector(system * x); }, [&](const Vector& r) { return Vector(lu.solve(r)); },
            stats);
    }

    // Writes (I - dt L) + dt diag(absorption) into the shared pattern.
    void fill_signal_system(double dt, const std::vector<double>& absorption) {
        for (int k = 0; k < system.outerSize(); ++k) {
            SparseMatrix::InnerIterator it_sys(system, k);
            SparseMatrix::InnerIterator it_lap(laplacian, k);
            for (; it_sys; ++it_sys, ++it_lap) {
                double a = -dt * it_lap.value();
                if (it_sys.row() == it_sys.col()) a += 1.0 + dt * absorption[static_cast<std::size_t>(k)];
                it_sys.valueRef() = a;
            }
        }
    }

    // Writes I - dt L diag(mobility): column k of L is scaled by mobility[k].
    void fill_density_system(double dt, const std::vector<double>& mobility) {
        for (int k = 0; k < system.outerSize(); ++k) {
            SparseMatrix::InnerIterator it_sys(system, k);
            SparseMatrix::InnerIterator it_lap(laplacian, k);
            for (; it_sys; ++it_sys, ++it_lap) {
                double a = -dt * it_lap.value() * mobility[static_cast<std::size_t>(k)];
                if (it_sys.row() == it_sys.col()) a += 1.0;
                it_sys.valueRef() = a;
            }
        }
    }

    State step(const State& s, double dt, const RegularizedMotility& phi, StepStats* stats) {
        if (!(dt > 0.0)) throw ValidationError("step_imex: dt must be positive");
        if (!(s.u.grid() == grid)) throw ValidationError("step_imex: state grid does not match the stepper grid");
        const std::size_t n = grid.size();
        const auto N = static_cast<Eigen::Index>(n);

        std::vector<double> absorption(n);
        for (std::size_t i = 0; i < n; ++i) absorption[i] = s.u[i] / (1.0 + s.eps * s.u[i]);

        Vector v_old = Eigen::Map<const Vector>(s.v.data().data(), N);
        Vector u_old = Eigen::Map<const Vector>(s.u.data().data(), N);
        Vector v_new, u_new;
        std::vector<double> mobility(n);

        if (grid.dim == 1) {
            const double w = dt / (grid.h[0] * grid.h[0]);
            Tridiagonal mv(n);
            for (std::size_t i = 0; i < n; ++i) {
                const int neighbors = (i > 0) + (i + 1 < n);
                mv.diag[i] = 1.0 + w * neighbors + dt * absorption[i];
                if (i > 0) mv.sub[i] = -w;
                if (i + 1 < n) mv.sup[i] = -w;
            }
            v_new = solve_1d(mv, v_old, stats);

            for (std::size_t i = 0; i < n; ++i) mobility[i] = phi.value(std::max(v_new[static_cast<Eigen::Index>(i)], 0.0));
            Tridiagonal mu(n);
            for (std::size_t i = 0; i < n; ++i) {
                const int neighbors = (i > 0) + (i + 1 < n);
                mu.diag[i] = 1.0 + w * neighbors * mobility[i];
                if (i > 0) mu.sub[i] = -w * mobility[i - 1];
                if (i + 1 < n) mu.sup[i] = -w * mobility[i + 1];
            }
            u_new = solve_1d(mu, u_old, stats);
        } else {
            fill_signal_system(dt, absorption);
            v_new = solve_2d(v_old, stats);
            for (std::size_t i = 0; i < n; ++i) mobility[i] = phi.value(std::max(v_new[static_cast<Eigen::Index>(i)], 0.0));
            fill_density_system(dt, mobility);
            u_new = solve_2d(u_old, stats);
        }

        State out = s;
        out.t = s.t + dt;
        out.u = Field(grid, std::vector<double>(u_new.data(), u_new.data() + N));
        out.v = Field(grid, std::vector<double>(v_new.data(), v_new.data() + N));
        check_finite(out.u, "u", out.t);
        check_finite(out.v, "v", out.t);
        return out;
    }
};

ImexStepper::ImexStepper(const Grid& grid, SolverOptions options)
    : impl_(std::make_unique<Impl>(grid, options)) {}
ImexStepper::~ImexStepper() = default;
ImexStepper::ImexStepper(ImexStepper&&) noexcept = default;
ImexStepper& ImexStepper::operator=(ImexStepper&&) noexcept = default;

State ImexStepper::step(const State& s, double dt, const RegularizedMotility& phi, StepStats* stats) {
    return impl_->step(s, dt, phi, stats);
}

State step_imex(const State& s, double dt, const RegularizedMotility& phi, const SolverOptions& options,
                StepStats* stats) {
    ImexStepper stepper(s.u.grid(), options);
    return stepper.step(s, dt, phi, stats);
}

double dt_cfl(const State& s, const RegularizedMotility& phi, double safety) {
    const Grid& g = s.u.grid();
    const double h = g.min_h();
    const double diffusion = h * h / (2.0 * g.dim);
    double phi_max = 0.0;
    double absorb_max = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        phi_max = std::max(phi_max, phi.value(std::max(s.v[i], 0.0)));
        absorb_max = std::max(absorb_max, s.u[i] / (1.0 + s.eps * s.u[i]));
    }
    const double u_limit = diffusion / phi_max;
    const double v_limit = absorb_max > 0.0 ? std::min(diffusion, 1.0 / absorb_max) : diffusion;
    return safety * std::min(u_limit, v_limit);
}

State step_explicit(const State& s, double dt, const RegularizedMotility& phi, double safety) {
    if (!(dt > 0.0)) throw ValidationError("step_explicit: dt must be positive");
    const double limit = dt_cfl(s, phi, safety);
    if (dt > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "step_explicit: dt=" << dt << " violates the CFL limit " << limit;
        throw NumericalError(msg.str());
    }
    const Grid& g = s.u.grid();
    const std::size_t n = g.size();
    Field flux_potential(g);
    for (std::size_t i = 0; i < n; ++i) flux_potential[i] = phi.value(std::max(s.v[i], 0.0)) * s.u[i];
    const Field lap_u = laplacian_neumann(flux_potential);
    const Field lap_v = laplacian_neumann(s.v);

    State out = s;
    out.t = s.t + dt;
    for (std::size_t i = 0; i < n; ++i) {
        out.u[i] = s.u[i] + dt * lap_u[i];
        out.v[i] = s.v[i] + dt * (lap_v[i] - s.u[i] * s.v[i] / (1.0 + s.eps * s.u[i]));
    }
    check_finite(out.u, "u", out.t);
    check_finite(out.v, "v", out.t);
    return out;
}

Setup prepare(const RunConfig& config) {
    if (!(config.eps >= 0.0 && config.eps < 1.0)) throw ValidationError("epsilon: must lie in [0, 1)");
    Setup setup;
    setup.grid = build_grid(config.grid.dim, config.grid.extents, config.grid.cells);
    setup.motility = config.eps > 0.0 ? regularize(config.motility, config.eps) : limit_motility(config.motility);
    const InitialFields init = realize(config.initial, setup.grid, config.eps);
    setup.state.t = 0.0;
    setup.state.u = init.u0;
    setup.state.v = init.v0;
    setup.state.eps = config.eps;
    setup.state.mass0 = init.mass;
    setup.state.ubar0 = init.mass / setup.grid.measure;
    setup.v0_sup = init.v0_sup;
    return setup;
}

Trajectory run(const RunConfig& config) {
    const TimeSpec& ts = config.time;
    if (!(ts.dt > 0.0)) throw ValidationError("time.dt: must be positive");
    if (!(ts.horizon >= 0.0)) throw ValidationError("time.T: must be nonnegative");
    if (!(config.output.cadence > 0.0)) throw ValidationError("output.cadence: must be positive");
    if (config.output.field_stride < 1) throw ValidationError("output.field_stride: must be at least 1");

    const Setup setup = prepare(config);
    State state = setup.state;

    Trajectory traj;
    RunMeta& meta = traj.meta;
    meta.grid = setup.grid;
    meta.motility = setup.motility;
    meta.eps = config.eps;
    meta.mass0 = state.mass0;
    meta.ubar0 = state.ubar0;
    meta.v0_sup = setup.v0_sup;
    meta.weight_a = config.diagnostics.a;
    meta.weight_b = config.diagnostics.b;
    meta.scheme = ts.scheme == Scheme::imex ? "imex" : "explicit";
    meta.horizon = ts.horizon;
    meta.field_stride = config.output.field_stride;

    double dt = ts.dt;
    const double cfl = dt_cfl(state, setup.motility, ts.safety);
    if (ts.scheme == Scheme::imex && ts.cfl_cap > 0.0) {
        dt = std::min(dt, ts.cfl_cap * cfl);
    } else if (ts.scheme == Scheme::explicit_euler && dt > cfl) {
        std::ostringstream msg;
        msg << "time.dt reduced from " << ts.dt << " to the explicit stability limit " << cfl;
        meta.warnings.push_back(msg.str());
        dt = cfl;
    }
    // Shrink dt so that an integer number of steps spans one output interval.
    const double cadence = config.output.cadence;
    const long steps_per_output = std::max(1L, static_cast<long>(std::ceil(cadence / dt - 1e-9)));
    dt = cadence / static_cast<double>(steps_per_output);
    long outputs = static_cast<long>(std::floor(ts.horizon / cadence + 1e-9));
    if (std::abs(static_cast<double>(outputs) * cadence - ts.horizon) > 1e-9 * std::max(1.0, ts.horizon)) {
        std::ostringstream msg;
        msg << "horizon T=" << ts.horizon << " is not a multiple of the cadence " << cadence << "; snapped down to "
            << static_cast<double>(outputs) * cadence;
        meta.warnings.push_back(msg.str());
    }
    meta.dt = dt;
    meta.cadence = cadence;
    meta.steps_per_output = static_cast<int>(steps_per_output);

    auto record = [&](int index) {
        traj.records.push_back(snapshot(state, meta.weight_a, meta.weight_b));
        traj.mobility_dev2.push_back(mobility_deviation_sq(state, setup.motility));
        if (index % meta.field_stride == 0) traj.frames.push_back({index, state.t, state.u, state.v});
    };

    StepMonitor& mon = traj.monitor;
    mon.min_u = state.u.min();
    mon.min_v = state.v.min();
    record(0);

    ImexStepper imex(setup.grid, {ts.solver_tol, ts.max_iterations});
    double vinf_prev = linf_norm(state.v);
    try {
        for (long k = 1; k <= outputs; ++k) {
            for (long j = 0; j < steps_per_output; ++j) {
                StepStats stats;
                State next = ts.scheme == Scheme::imex ? imex.step(state, dt, setup.motility, &stats)
                                                       : step_explicit(state, dt, setup.motility, ts.safety);
                // Recompute t from the step count to avoid accumulated drift.
                next.t = (static_cast<double>(k - 1) * static_cast<double>(steps_per_output) + static_cast<double>(j + 1)) * dt;
                state = std::move(next);

                ++mon.steps;
                const double mass = integrate(state.u);
                const double drift = state.mass0 > 0.0 ? std::abs(mass - state.mass0) / state.mass0 : std::abs(mass);
                mon.max_mass_drift = std::max(mon.max_mass_drift, drift);
                const double vinf = linf_norm(state.v);
                mon.max_vinf_increase = std::max(mon.max_vinf_increase, vinf - vinf_prev);
                vinf_prev = vinf;
                mon.min_u = std::min(mon.min_u, state.u.min());
                mon.min_v = std::min(mon.min_v, state.v.min());
                mon.max_residual = std::max(mon.max_residual, stats.residual);
            }
            record(static_cast<int>(k));
        }
    } catch (const NumericalError& e) {
        traj.complete = false;
        traj.failure = e.what();
    }
    // The final state is always kept for terminal comparisons.
    if (traj.complete && (traj.frames.empty() || traj.frames.back().index != static_cast<int>(outputs))) {
        traj.frames.push_back({static_cast<int>(outputs), state.t, state.u, state.v});
    }
    return traj;
}

}  // namespace ksm
