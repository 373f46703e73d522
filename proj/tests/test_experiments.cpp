#include "support.hpp"

#include "ksm/experiments.hpp"
#include "ksm/stepper.hpp"

#include <cmath>
#include <numbers>

using namespace ksm;
using namespace ksm::test;

TEST_CASE("epsilon sweep on homogeneous data matches the closed form") {
    RunConfig c = small_config(16, 1.0, 1e-2);
    c.initial.u0 = ConstantProfile{1.0};
    const std::vector<double> eps{0.1, 0.01, 0.001};
    std::vector<Trajectory> runs;
    const SweepReport r = epsilon_sweep(c, eps, [&](std::size_t, const RunConfig&, const Trajectory& t) { runs.push_back(t); });
    REQUIRE(runs.size() == 3);
    // u stays at its mean in every run (to rounding), independent of eps.
    for (std::size_t i = 0; i < 3; ++i)
        for (double x : runs[i].frames.back().u.values()) CHECK(std::abs(x - 1.0) <= 1e-13);
    // v(T) = (1 + dt / (1 + eps))^{-n}, so d is the difference of the closed forms.
    auto v_T = [](double e) { return std::pow(1.0 + 1e-2 / (1.0 + e), -100.0); };
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(r.cauchy[i] == doctest::Approx(std::abs(v_T(eps[i]) - v_T(eps[i + 1]))).epsilon(1e-9));
    }
    CHECK(r.cauchy_decreasing());
    CHECK(r.mass == 1.0);
}

TEST_CASE("epsilon sweep contracts") {
    const RunConfig c = small_config();
    CHECK(contains(error_of([&] { epsilon_sweep(c, std::vector<double>{0.1}); }), ">= 3 entries required"));
    CHECK(!error_of([&] { epsilon_sweep(c, std::vector<double>{0.01, 0.1, 0.001}); }).empty());
    CHECK(!error_of([&] { epsilon_sweep(c, std::vector<double>{1.0, 0.1, 0.01}); }).empty());
}

TEST_CASE("epsilon sweep is deterministic and Cauchy on generic data") {
    const RunConfig c = small_config(32, 1.0);
    const std::vector<double> eps{0.1, 0.01, 0.001};
    const SweepReport a = epsilon_sweep(c, eps), b = epsilon_sweep(c, eps);
    CHECK(a.cauchy == b.cauchy);
    CHECK(a.functionals == b.functionals);
    CHECK(a.terminal == b.terminal);
    CHECK(a.cauchy[1] < a.cauchy[0]);
}

TEST_CASE("absorption functional is monotone in eps on frozen fields") {
    const Trajectory tr = run(small_config(32, 1.0));
    for (const WeightFunction& w : builtin_weights()) {
        const Field psi = w.build(tr.meta.grid);
        CHECK(psi.nonnegative());
        double prev = absorption_functional(tr, 0.5, psi);
        for (double e : {0.1, 0.01, 0.001, 0.0}) {
            const double cur = absorption_functional(tr, e, psi);
            CHECK(cur >= prev);
            prev = cur;
        }
    }
}

TEST_CASE("relaxation experiment") {
    RunConfig c = small_config(64, 1.0, 2e-3);
    c.initial.u0 = DiracProfile{{0.5, 0.5}, 1.0};
    const std::vector<int> cells{32, 64, 128};
    const RelaxReport r = relaxation_experiment(c, cells, 0.1);
    REQUIRE(r.levels.size() == 3);
    for (const RelaxLevel& l : r.levels) {
        CHECK(l.uL2_initial == static_cast<double>(l.cells));
        CHECK(l.max_mass_drift <= 1e-10);
    }
    CHECK(r.mass == 1.0);
    CHECK(r.initial_divergence == 4.0);
    CHECK(r.tau_spread < 2.0);
    CHECK(std::isfinite(r.sup_window_integral));
    CHECK(r.profile_taus.size() == 3);

    RunConfig bump = small_config();
    CHECK(contains(error_of([&] { relaxation_experiment(bump, cells, 0.1); }), "dirac"));
    CHECK(!error_of([&] { relaxation_experiment(c, cells, 0.0); }).empty());
    CHECK(!error_of([&] { relaxation_experiment(c, std::vector<int>{64, 64, 128}, 0.1); }).empty());
}

TEST_CASE("refinement study") {
    const RunConfig c = small_config(16, 0.5, 4e-3);
    CHECK(contains(error_of([&] { refinement_study(c, std::vector<int>{16, 16, 32}); }), "levels must strictly refine"));
    CHECK(!error_of([&] { refinement_study(c, std::vector<int>{16, 32}); }).empty());

    RunConfig full = c;
    full.output.cadence = 4e-3;
    full.output.field_stride = 1;
    const ConvergenceReport r = refinement_study(full, std::vector<int>{16, 32, 64, 128});
    CHECK(r.complete);
    REQUIRE(r.u_orders.size() == 2);
    // Combined (h, dt) self-convergence of the first-order IMEX scheme.
    CHECK(r.u_orders.back() >= 0.9);
    CHECK(r.v_orders.back() >= 0.9);
    CHECK(r.residual_u_slope >= 0.9);
    CHECK(r.residual_v_slope >= 0.9);
}

TEST_CASE("heat equation limit: second order in h at fixed small dt") {
    // u = 0 decouples v into the implicit heat equation; v0 is resampled per grid.
    std::vector<Field> finals;
    std::vector<Grid> grids;
    for (int n : {16, 32, 64, 128}) {
        RunConfig c = small_config(n, 0.05, 1e-5);
        c.initial.u0 = ConstantProfile{0.0};
        const Grid g = line(n);
        const Field v0 = sample(g, [](double x, double) { return 1.0 + std::cos(std::numbers::pi * x); });
        c.initial.v0 = CellValues{v0.data()};
        c.output.cadence = 0.05;
        finals.push_back(run(c).frames.back().v);
        grids.push_back(g);
    }
    std::vector<double> errs;
    for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
        const Field ref = restrict_to(finals.back(), grids[i]);
        Field d = ref;
        for (std::size_t k = 0; k < d.size(); ++k) d[k] -= finals[i][k];
        errs.push_back(l2_norm(d));
    }
    CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("restriction and interpolation helpers") {
    const Grid fine = line(16), coarse = line(4);
    const Field x = sample(fine, [](double x, double) { return x; });
    const Field r = restrict_to(x, coarse);
    for (int i = 0; i < 4; ++i) CHECK(r[i] == doctest::Approx(coarse.center(0, i)).epsilon(1e-15));
    CHECK(!error_of([&] { restrict_to(x, line(5)); }).empty());

    std::vector<DiagRecord> recs(3);
    for (int k = 0; k < 3; ++k) {
        recs[k].t = k;
        recs[k].uL2 = 10.0 * k;
    }
    CHECK(value_at(recs, &DiagRecord::uL2, 1.5) == 15.0);
    CHECK(!error_of([&] { value_at(recs, &DiagRecord::uL2, 3.5); }).empty());
}
