#include "support.hpp"

#include "ksm/spectral.hpp"

#include <cmath>
#include <numbers>

using namespace ksm;
using namespace ksm::test;

namespace {

/// Oracle: solve -Delta_h w = f - mean with a rank-one fix for the kernel,
/// then return <w, f - mean>.
double direct_hminus(const Field& f) {
    const Grid& g = f.grid();
    const int n = static_cast<int>(g.size());
    const Eigen::MatrixXd A = -dense_laplacian(g) + Eigen::MatrixXd::Ones(n, n);
    const double mean = integrate(f) / g.measure;
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = f[i] - mean;
    const Eigen::VectorXd w = A.partialPivLu().solve(rhs);
    return w.dot(rhs) * g.cell_volume();
}

double l2(const Field& f) { return l2_norm(f); }

}  // namespace

TEST_CASE("eigenvalues") {
    const Grid g = plane(6, 8, 1.0, 2.0);
    const auto lam = neumann_eigenvalues(g);
    CHECK(lam[0] == 0.0);
    for (std::size_t k = 1; k < lam.size(); ++k) CHECK(lam[k] > 0.0);

    // Every basis vector produced by from_cosine is an eigenvector of the dense operator.
    const Eigen::MatrixXd L = dense_laplacian(g);
    CosineCoeffs c = to_cosine(Field(g));
    for (std::size_t k = 0; k < lam.size(); ++k) {
        std::fill(c.coeffs.begin(), c.coeffs.end(), 0.0);
        c.coeffs[k] = 1.0;
        const Field e = from_cosine(c);
        const Eigen::VectorXd ev = Eigen::Map<const Eigen::VectorXd>(e.data().data(), e.size());
        CHECK((L * ev + lam[k] * ev).lpNorm<Eigen::Infinity>() <= 1e-12 * std::max(1.0, lam.back()));
    }
}

TEST_CASE("cosine transform") {
    const Grid g = line(16);
    SUBCASE("constant has only the mean mode") {
        const CosineCoeffs c = to_cosine(Field(g, 2.5));
        CHECK(c.coeffs[0] == doctest::Approx(2.5).epsilon(1e-15));
        for (std::size_t k = 1; k < c.coeffs.size(); ++k) CHECK(std::abs(c.coeffs[k]) <= 1e-14);
    }
    SUBCASE("first cosine has only mode 1") {
        const CosineCoeffs c = to_cosine(sample(g, [](double x, double) { return std::cos(std::numbers::pi * x); }));
        for (std::size_t k = 0; k < c.coeffs.size(); ++k) CHECK(std::abs(c.coeffs[k] - (k == 1 ? 1.0 : 0.0)) <= 1e-14);
    }
    SUBCASE("round trip and Parseval against a dense eigen-decomposition") {
        std::mt19937_64 rng(5);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-dense_laplacian(g));
        for (int trial = 0; trial < 50; ++trial) {
            const Field f = random_field(g, rng, -1, 1);
            const CosineCoeffs c = to_cosine(f);
            const Field back = from_cosine(c);
            for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(back[i] - f[i]) <= 1e-12);
            double parseval = 0, rayleigh = 0;
            for (std::size_t k = 0; k < c.coeffs.size(); ++k) {
                parseval += c.weights[k] * c.coeffs[k] * c.coeffs[k];
                rayleigh += c.weights[k] * c.coeffs[k] * c.coeffs[k] * c.eigenvalues[k];
            }
            CHECK(parseval == doctest::Approx(inner(f, f)).epsilon(1e-10));
            // Energy from the dense eigenbasis equals the spectral energy.
            const Eigen::VectorXd fv = Eigen::Map<const Eigen::VectorXd>(f.data().data(), f.size());
            const Eigen::VectorXd proj = es.eigenvectors().transpose() * fv;
            const double dense = proj.dot(es.eigenvalues().cwiseProduct(proj)) * g.cell_volume();
            CHECK(rayleigh == doctest::Approx(dense).epsilon(1e-10));
        }
    }
}

TEST_CASE("hminus_half_norm") {
    CHECK(hminus_half_norm_sq(Field(line(32), 1.7), 1.7) <= 1e-28);

    const double L = std::numbers::pi;
    const Grid g = line(256, L);
    const Field f = sample(g, [](double x, double) { return 1.0 + std::cos(x); });
    const double h = g.h[0];
    const double lam1 = 2.0 / (h * h) * (1.0 - std::cos(h));
    const double v = hminus_half_norm_sq(f, 1.0);
    CHECK(v == doctest::Approx((std::numbers::pi / 2) / lam1).epsilon(1e-12));
    CHECK(std::abs(v - std::numbers::pi / 2) <= 1e-3);

    std::mt19937_64 rng(6);
    for (const Grid& gr : {line(64), plane(8, 12, 1.0, 1.5)}) {
        for (int trial = 0; trial < 30; ++trial) {
            const Field r = random_field(gr, rng, 0, 3);
            const double mean = integrate(r) / gr.measure;
            const HMinusHalfResult res = hminus_half_norm(r, mean);
            CHECK(res.value == doctest::Approx(direct_hminus(r)).epsilon(1e-10));
            CHECK(res.mean_discrepancy <= 1e-12);
            // Wrong mean: the actual mean is still removed and the gap is reported.
            const HMinusHalfResult off = hminus_half_norm(r, mean + 0.25);
            CHECK(off.value == doctest::Approx(res.value).epsilon(1e-12));
            CHECK(off.mean_discrepancy == doctest::Approx(0.25).epsilon(1e-10));
            // Quadratic scaling.
            Field s = r;
            for (auto& x : s.values()) x *= 3.0;
            CHECK(hminus_half_norm_sq(s, 3.0 * mean) == doctest::Approx(9.0 * res.value).epsilon(1e-11));
        }
    }
}

TEST_CASE("fractional_inverse") {
    const Grid g = line(32);
    const double h = g.h[0];
    const double lam1 = 2.0 / (h * h) * (1.0 - std::cos(std::numbers::pi * h));
    const Field c = sample(g, [](double x, double) { return std::cos(std::numbers::pi * x); });
    const Field ic = fractional_inverse(c, 1.0);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(ic[i] - c[i] / lam1) <= 1e-14);

    std::mt19937_64 rng(7);
    double best = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Field f = random_field(g, rng, -1, 1);
        const Field half2 = fractional_inverse(fractional_inverse(f, 0.5), 0.5);
        const Field one = fractional_inverse(f, 1.0);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(half2[i] - one[i]) <= 1e-12);

        // ||A^{-1/2} p|| <= C ||p||^theta ||A^{-1} p||^{1-theta} with theta = 1/2 for beta = 1.
        Field p = f;
        const double mean = integrate(f) / g.measure;
        for (auto& x : p.values()) x -= mean;
        const double lhs = std::sqrt(hminus_half_norm_sq(p, 0.0));
        const double rhs = std::sqrt(l2(p) * l2(one));
        best = std::max(best, lhs / rhs);
    }
    MESSAGE("best interpolation constant over 100 fields: " << best);
    // Cauchy-Schwarz in the eigenbasis gives C = 1.
    CHECK(best <= 1.0 + 1e-12);
    CHECK(best > 0.0);
    CHECK(!error_of([&] { fractional_inverse(c, 0.0); }).empty());
}
