#include "support.hpp"

#include "ksm/motility.hpp"

#include <cmath>

using namespace ksm;
using namespace ksm::test;

TEST_CASE("closed-form motilities") {
    const PhiValue p = eval_phi(MotilitySpec::power(1, 1), 0.0);
    CHECK(p.value == 1.0);
    CHECK(p.derivative == -1.0);
    const PhiValue e = eval_phi(MotilitySpec::exponential(1), 0.0);
    CHECK(e.value == 1.0);
    CHECK(e.derivative == -1.0);
    // 1/(xi+1)^2 and -2/(xi+1)^3 at xi = 1.
    const PhiValue q = eval_phi(MotilitySpec::power(1, 2), 1.0);
    CHECK(q.value == doctest::Approx(1.0 / 4.0).epsilon(1e-15));
    CHECK(q.derivative == doctest::Approx(-2.0 / 8.0).epsilon(1e-15));
    CHECK(eval_phi(MotilitySpec::constant(0.7), 3.0).value == 0.7);
    CHECK(eval_phi(MotilitySpec::constant(0.7), 3.0).derivative == 0.0);
}

TEST_CASE("contract errors") {
    CHECK(contains(error_of([] { MotilitySpec::power(0, 1); }), "degenerate motility"));
    CHECK(!error_of([] { MotilitySpec::exponential(-1); }).empty());
    CHECK(!error_of([] { eval_phi(MotilitySpec::power(1, 1), -0.1); }).empty());
    CHECK(!error_of([] { regularize(MotilitySpec::power(1, 1), 0.0); }).empty());
    CHECK(!error_of([] { regularize(MotilitySpec::power(1, 1), 1.0); }).empty());
    // A derivative inconsistent with the value is rejected.
    CHECK(!error_of([] {
               MotilitySpec::custom([](double x) { return 1.0 / (1.0 + x); }, [](double) { return 0.0; });
           }).empty());
    // A non-positive motility is rejected.
    CHECK(!error_of([] {
               MotilitySpec::custom([](double x) { return 1.0 - x; }, [](double) { return -1.0; });
           }).empty());
}

TEST_CASE("custom motility with a consistent derivative") {
    const auto m = MotilitySpec::custom([](double x) { return 2.0 / (1.0 + x * x); },
                                        [](double x) { return -4.0 * x / std::pow(1.0 + x * x, 2); }, "lorentz");
    CHECK(m.kind() == MotilityKind::custom);
    CHECK(m.name() == "lorentz");
    CHECK(eval_phi(m, 1.0).value == 1.0);
}

TEST_CASE("regularized family") {
    const RegularizedMotility r = regularize(MotilitySpec::power(1, 1), 0.5);
    CHECK(r.value(0.0) == 1.5);
    CHECK(r.eval(0.0).derivative == -1.5);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> xi(0.0, 10.0);
    for (const auto& spec : {MotilitySpec::power(1, 1), MotilitySpec::power(0.5, 3), MotilitySpec::exponential(2)}) {
        for (double eps : {0.1, 1e-3, 1e-6}) {
            const RegularizedMotility re = regularize(spec, eps);
            // sup over [0,10] of eps e^{-xi} is attained at xi = 0.
            double sup = 0;
            for (int i = 0; i <= 1000; ++i) {
                const double x = 10.0 * i / 1000;
                sup = std::max(sup, re.value(x) - eval_phi(spec, x).value);
            }
            CHECK(sup == doctest::Approx(eps).epsilon(1e-10));
            for (int k = 0; k < 1000; ++k) {
                const double x = xi(rng);
                CHECK(re.value(x) >= eval_phi(spec, x).value);
            }
        }
    }
    const RegularizedMotility lim = limit_motility(MotilitySpec::exponential(1));
    CHECK(lim.eps() == 0.0);
    CHECK(lim.value(2.0) == std::exp(-2.0));
}
