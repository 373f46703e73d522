#include "support.hpp"

#include "ksm/diagnostics.hpp"
#include "ksm/stepper.hpp"

#include <cmath>

using namespace ksm;
using namespace ksm::test;

TEST_CASE("snapshot of homogeneous states") {
    State s;
    const Grid g = plane(6, 6, 1.0, 2.0);
    s.u = Field(g, 1.5);
    s.v = Field(g, 0.4);
    s.eps = 0.1;
    s.mass0 = integrate(s.u);
    s.ubar0 = 1.5;
    const DiagRecord r = snapshot(s);
    CHECK(r.mass == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(r.udev2 == 0.0);
    CHECK(r.hm1 <= 1e-28);
    CHECK(r.grad2 == 0.0);
    CHECK(r.y <= 1e-28);
    CHECK(r.F <= 1e-28);
    CHECK(r.absorb == doctest::Approx(2.0 * 1.5 * 0.4 / (1.0 + 0.1 * 1.5)).epsilon(1e-14));

    s.u = Field(g, 0.0);
    s.mass0 = s.ubar0 = 0.0;
    const DiagRecord z = snapshot(s);
    CHECK(z.mass == 0.0);
    CHECK(z.absorb == 0.0);
}

TEST_CASE("cumulative bounds") {
    RunConfig zero = small_config(32, 1.0);
    zero.initial.u0 = ConstantProfile{0.0};
    const BoundReport b0 = cumulative_bounds(run(zero));
    // Zero to rounding: the linear solves reproduce constants only to machine precision.
    CHECK(b0.absorb_integral == 0.0);
    CHECK(b0.grad2_integral <= 1e-25);
    CHECK(b0.pass());

    // |Omega| = 1 and ||v0|| = 1 give the caps 2 and 2.
    const Trajectory tr = run(small_config(64, 50.0, 1e-2));
    const BoundReport b = cumulative_bounds(tr);
    CHECK(b.absorb_bound == 2.0);
    CHECK(b.grad2_bound == 2.0);
    CHECK(b.pass());
    CHECK(b.absorb_margin > 0.0);
    CHECK(b.grad2_margin > 0.0);
    CHECK(!b.partial);
}

TEST_CASE("supersolution") {
    const Supersolution y = odi_supersolution(2.0, 2.0, 1.0);
    CHECK(y(2.0) == 2.0);
    CHECK(y(1e12) == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(!error_of([&] { y(1.0); }).empty());
    CHECK(!error_of([] { odi_supersolution(0.0, 2.0, 1.0); }).empty());
    CHECK(!error_of([] { odi_supersolution(1.0, 1.0, 1.0); }).empty());

    const Trajectory tr = run(small_config(32, 2.0, 2e-3));
    const SupersolutionFit fit = fit_supersolution(tr, 0.1, 2.0);
    CHECK(std::isfinite(fit.c7));
    CHECK(fit.c7 > 0.0);
    CHECK(fit.samples > 0);
    // The fitted curve dominates every sample after tau.
    const Supersolution ybar = odi_supersolution(0.1, 2.0, fit.c7);
    for (const DiagRecord& r : tr.records)
        if (r.t > 0.1) CHECK(r.y <= ybar(r.t) * (1 + 1e-12));
}

TEST_CASE("minimal_constant") {
    CHECK(minimal_constant(0.0, 0.0, 0.0) == 0.0);
    // G^2 - G - 2 = (G - 2)(G + 1).
    CHECK(minimal_constant(1.0, 1.0, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(minimal_constant(1.0, -1e8, 1.0) == doctest::Approx(1e-8).epsilon(1e-10));
    CHECK(std::isinf(minimal_constant(0.0, 1.0, 1.0)));
}

TEST_CASE("inequality scans") {
    SUBCASE("constant data give zero constants") {
        RunConfig c = small_config(16, 0.5);
        c.initial.u0 = ConstantProfile{1.0};
        const InequalityReport r = inequality_scan(run(c));
        CHECK(r.gradient_energy.gamma == 0.0);
        CHECK(r.hminus.gamma == 0.0);
        CHECK(r.hminus_lq.gamma == 0.0);
        CHECK(r.lyapunov.gamma == 0.0);
    }
    SUBCASE("generic run: finite constants") {
        const InequalityReport r = inequality_scan(run(small_config(64, 2.0)));
        CHECK(r.gradient_energy.finite());
        CHECK(r.hminus.finite());
        CHECK(r.hminus_lq.finite());
        CHECK(r.lyapunov.finite());
        CHECK(!r.low_confidence);
    }
    SUBCASE("constant motility without regularization: mobility term vanishes, hm1 non-increasing") {
        RunConfig c = small_config(64, 1.0);
        c.motility = MotilitySpec::constant(0.8);
        c.eps = 0.0;
        const Trajectory tr = run(c);
        for (double m : tr.mobility_dev2) CHECK(m <= 1e-26);
        for (std::size_t k = 1; k < tr.records.size(); ++k) CHECK(tr.records[k].hm1 <= tr.records[k - 1].hm1);
    }
    SUBCASE("coarse cadence is flagged") {
        RunConfig c = small_config(32, 3.0, 1e-2);
        c.output.cadence = 0.25;
        CHECK(inequality_scan(run(c)).low_confidence);
    }
    SUBCASE("contract errors") {
        RunConfig c = small_config();
        c.time.horizon = 0.01;
        CHECK(!error_of([&] { inequality_scan(run(c)); }).empty());
    }
}

TEST_CASE("weak residuals") {
    SUBCASE("u = 0 gives r_u = 0") {
        RunConfig c = small_config(32, 1.0);
        c.initial.u0 = ConstantProfile{0.0};
        const WeakResidual w = weak_residual(run(c), CosineBumpTest({1, 0}, 0.1, 0.9));
        CHECK(w.r_u == 0.0);
    }
    SUBCASE("constant data, spatially constant test: r_u vanishes, r_v shrinks with dt") {
        auto residual = [](double dt) {
            RunConfig c = small_config(8, 1.0, dt);
            c.initial.u0 = ConstantProfile{1.0};
            c.output.cadence = dt;
            c.output.field_stride = 1;
            return weak_residual(run(c), CosineBumpTest({0, 0}, 0.1, 0.9));
        };
        const WeakResidual a = residual(1e-2), b = residual(5e-3);
        CHECK(a.r_u <= 1e-14);
        CHECK(b.r_u <= 1e-14);
        CHECK(b.r_v < a.r_v);
        CHECK(a.r_v / b.r_v == doctest::Approx(2.0).epsilon(0.1));
    }
    SUBCASE("support beyond the horizon is rejected") {
        const Trajectory tr = run(small_config(16, 0.2));
        CHECK(!error_of([&] { weak_residual(tr, CosineBumpTest({1, 0}, 0.1, 0.5)); }).empty());
    }
    SUBCASE("test function derivative") {
        const CosineBumpTest b({1, 0}, 0.0, 2.0);
        CHECK(b.time_factor(1.0) == 1.0);
        CHECK(b.time_factor(2.0) == 0.0);
        const double t = 0.7, d = 1e-6;
        CHECK(b.time_derivative(t) ==
              doctest::Approx((b.time_factor(t + d) - b.time_factor(t - d)) / (2 * d)).epsilon(1e-7));
    }
}

TEST_CASE("decay metrics") {
    RunConfig c = small_config(16, 5.0, 1e-2);
    c.initial.u0 = ConstantProfile{1.0};
    c.initial.v0 = ConstantProfile{2.0};
    const Trajectory tr = run(c);
    for (const DiagRecord& r : tr.records) {
        CHECK(r.hm1 <= 1e-25);
        CHECK(r.udev2 <= 1e-25);
    }
    const DecayReport d = decay_metrics(tr);
    CHECK(d.vinf_ratio < 0.1);
    CHECK(d.vinf_below.has_value());

    // hm1 vanishes exactly when udev2 does, record by record.
    const Trajectory g = run(small_config(32, 1.0));
    for (const DiagRecord& r : g.records) CHECK((r.hm1 > 0) == (r.udev2 > 0));

    RunConfig dirac = small_config(64, 50.0, 1e-2);
    dirac.initial.u0 = DiracProfile{{0.5, 0.5}, 1.0};
    dirac.output.cadence = 0.1;
    const DecayReport dd = decay_metrics(run(dirac));
    CHECK(dd.hm1_ratio < 0.05);
    CHECK(dd.vinf_ratio < 0.05);

    RunConfig shortrun = small_config(16, 0.5);
    CHECK(!error_of([&] { decay_metrics(run(shortrun)); }).empty());
}

TEST_CASE("audit") {
    Trajectory tr = run(small_config(32, 1.0));
    CHECK(audit(tr).pass());
    tr.records[5].mass *= 1.01;
    AuditReport a = audit(tr);
    CHECK(!a.pass());
    tr = run(small_config(32, 1.0));
    tr.records[7].vinf += 0.1;
    CHECK(!audit(tr).pass());
    tr = run(small_config(32, 1.0));
    tr.records[3].udev2 = -1.0;
    CHECK(!audit(tr).pass());
}
