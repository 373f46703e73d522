#include "ksm/spectral.hpp"

#include "ksm/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace ksm {
namespace {

// FFTW's planner is not thread-safe; executing a finished plan is.
class PlanCache {
public:
    fftw_plan get(int n0, int n1, fftw_r2r_kind kind) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(n0, n1, static_cast<int>(kind));
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<double> scratch_in(static_cast<std::size_t>(n0) * n1);
        std::vector<double> scratch_out(scratch_in.size());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan p = n1 == 1
            ? fftw_plan_r2r_1d(n0, scratch_in.data(), scratch_out.data(), kind, flags)
            : fftw_plan_r2r_2d(n0, n1, scratch_in.data(), scratch_out.data(), kind, kind, flags);
        if (!p) throw NumericalError("fftw: failed to create cosine transform plan");
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

std::vector<double> parseval_weights(const Grid& g) {
    std::vector<double> w(g.size());
    for (int i0 = 0; i0 < g.cells[0]; ++i0) {
        for (int i1 = 0; i1 < g.cells[1]; ++i1) {
            double f = g.measure;
            if (i0 != 0) f *= 0.5;
            if (i1 != 0) f *= 0.5;
            w[g.index(i0, i1)] = f;
        }
    }
    return w;
}

}  // namespace

std::vector<double> neumann_eigenvalues(const Grid& g) {
    std::vector<double> lambda(g.size());
    for (int i0 = 0; i0 < g.cells[0]; ++i0) {
        const double l0 = 2.0 / (g.h[0] * g.h[0]) * (1.0 - std::cos(i0 * std::numbers::pi / g.cells[0]));
        for (int i1 = 0; i1 < g.cells[1]; ++i1) {
            const double l1 = g.cells[1] == 1
                ? 0.0
                : 2.0 / (g.h[1] * g.h[1]) * (1.0 - std::cos(i1 * std::numbers::pi / g.cells[1]));
            lambda[g.index(i0, i1)] = l0 + l1;
        }
    }
    return lambda;
}

CosineCoeffs to_cosine(const Field& f) {
    const Grid& g = f.grid();
    CosineCoeffs out{g, std::vector<double>(g.size()), neumann_eigenvalues(g), parseval_weights(g)};
    std::vector<double> in(f.data());
    fftw_execute_r2r(plan_cache().get(g.cells[0], g.cells[1], FFTW_REDFT10), in.data(), out.coeffs.data());
    // REDFT10 yields 2^dim * sum f cos...; rescale to plain expansion coefficients.
    for (int i0 = 0; i0 < g.cells[0]; ++i0) {
        for (int i1 = 0; i1 < g.cells[1]; ++i1) {
            double scale = i0 == 0 ? 2.0 * g.cells[0] : g.cells[0];
            if (g.cells[1] > 1) scale *= i1 == 0 ? 2.0 * g.cells[1] : g.cells[1];
            out.coeffs[g.index(i0, i1)] /= scale;
        }
    }
    return out;
}

Field from_cosine(const CosineCoeffs& c) {
    const Grid& g = c.grid;
    std::vector<double> in(c.coeffs);
    for (int i0 = 0; i0 < g.cells[0]; ++i0) {
        for (int i1 = 0; i1 < g.cells[1]; ++i1) {
            double scale = i0 == 0 ? 1.0 : 0.5;
            if (g.cells[1] > 1 && i1 != 0) scale *= 0.5;
            in[g.index(i0, i1)] *= scale;
        }
    }
    std::vector<double> out(g.size());
    fftw_execute_r2r(plan_cache().get(g.cells[0], g.cells[1], FFTW_REDFT01), in.data(), out.data());
    return Field(g, std::move(out));
}

HMinusHalfResult hminus_half_norm(const Field& f, double ubar) {
    const CosineCoeffs c = to_cosine(f);
    HMinusHalfResult r;
    r.mean_discrepancy = std::abs(c.coeffs[0] - ubar);
    for (std::size_t k = 1; k < c.coeffs.size(); ++k) {
        r.value += c.weights[k] * c.coeffs[k] * c.coeffs[k] / c.eigenvalues[k];
    }
    return r;
}

Field fractional_inverse(const Field& f, double beta) {
    if (!(beta > 0.0)) throw ValidationError("fractional_inverse: beta must be positive");
    CosineCoeffs c = to_cosine(f);
    c.coeffs[0] = 0.0;
    for (std::size_t k = 1; k < c.coeffs.size(); ++k) {
        c.coeffs[k] *= std::pow(c.eigenvalues[k], -beta);
    }
    return from_cosine(c);
}

}  // namespace ksm
