#include "ksm/diagnostics.hpp"

#include "ksm/error.hpp"
#include "ksm/spectral.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ksm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double trapezoid(const std::vector<DiagRecord>& recs, double DiagRecord::*member) {
    double sum = 0.0;
    for (std::size_t k = 1; k < recs.size(); ++k) {
        sum += 0.5 * (recs[k].t - recs[k - 1].t) * (recs[k].*member + recs[k - 1].*member);
    }
    return sum;
}

bool uniform_cadence(const std::vector<DiagRecord>& recs) {
    const double step = recs[1].t - recs[0].t;
    if (!(step > 0.0)) return false;
    for (std::size_t k = 2; k < recs.size(); ++k) {
        if (std::abs((recs[k].t - recs[k - 1].t) - step) > 1e-8 * step) return false;
    }
    return true;
}

int sign_of(double x, double floor) { return x > floor ? 1 : (x < -floor ? -1 : 0); }

}  // namespace

DiagRecord snapshot(const State& s, double weight_a, double weight_b) {
    DiagRecord r;
    r.t = s.t;
    r.mass = integrate(s.u);
    r.vinf = linf_norm(s.v);
    r.grad2 = grad_power_integral(s.v, 2);
    r.grad4 = grad_power_integral(s.v, 4);
    r.lap2 = laplacian_sq_integral(s.v);
    Field absorb(s.u.grid());
    double udev2 = 0.0, uL2 = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        const double d = s.u[i] - s.ubar0;
        udev2 += d * d;
        uL2 += s.u[i] * s.u[i];
        absorb[i] = s.u[i] * s.v[i] / (1.0 + s.eps * s.u[i]);
    }
    const double vol = s.u.grid().cell_volume();
    r.udev2 = udev2 * vol;
    r.uL2 = uL2 * vol;
    r.hm1 = hminus_half_norm_sq(s.u, s.ubar0);
    r.y = r.hm1 + weight_a * r.grad2;
    r.F = r.hm1 + weight_b * r.grad2;
    r.absorb = integrate(absorb);
    return r;
}

double mobility_deviation_sq(const State& s, const RegularizedMotility& phi) {
    const Grid& g = s.u.grid();
    Field mob(g), flux(g);
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        mob[i] = phi.value(std::max(s.v[i], 0.0));
        flux[i] = s.u[i] * mob[i];
    }
    const double mean_flux = integrate(flux) / g.measure;
    double sum = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        const double d = s.ubar0 * mob[i] - mean_flux;
        sum += d * d;
    }
    return sum * g.cell_volume();
}

BoundReport cumulative_bounds(const Trajectory& traj) {
    if (traj.records.size() < 2) throw ValidationError("cumulative_bounds: need at least 2 records");
    BoundReport r;
    const double cap = traj.meta.v0_sup + 1.0;
    const double measure = traj.meta.grid.measure;
    r.absorb_integral = trapezoid(traj.records, &DiagRecord::absorb);
    r.grad2_integral = trapezoid(traj.records, &DiagRecord::grad2);
    r.absorb_bound = measure * cap;
    r.grad2_bound = 0.5 * measure * cap * cap;
    r.absorb_pass = r.absorb_integral <= r.absorb_bound * (1.0 + kBoundSlack);
    r.grad2_pass = r.grad2_integral <= r.grad2_bound * (1.0 + kBoundSlack);
    r.absorb_margin = r.absorb_bound - r.absorb_integral;
    r.grad2_margin = r.grad2_bound - r.grad2_integral;
    r.partial = !traj.complete;
    return r;
}

Supersolution::Supersolution(double tau, double kappa, double c7) : tau_(tau), kappa_(kappa), c7_(c7) {
    if (!(tau > 0.0)) throw ValidationError("supersolution: tau must be positive");
    if (!(kappa > 1.0)) throw ValidationError("supersolution: kappa must exceed 1");
    if (!(c7 > 0.0)) throw ValidationError("supersolution: c7 must be positive");
}

double Supersolution::operator()(double t) const {
    if (!(t > 0.5 * tau_)) throw ValidationError("supersolution: defined only for t > tau/2");
    return c7_ * std::pow(t - 0.5 * tau_, -1.0 / (kappa_ - 1.0)) + c7_;
}

Supersolution odi_supersolution(double tau, double kappa, double c7) { return Supersolution(tau, kappa, c7); }

SupersolutionFit fit_supersolution(const Trajectory& traj, double tau, double kappa) {
    // Profile with c7 = 1; y <= c7 * profile  <=>  c7 >= y / profile.
    const Supersolution unit(tau, kappa, 1.0);
    SupersolutionFit fit;
    for (const DiagRecord& r : traj.records) {
        if (r.t <= tau) continue;
        ++fit.samples;
        const double need = r.y / unit(r.t);
        if (need > fit.c7) {
            fit.c7 = need;
            fit.binding_time = r.t;
        }
    }
    return fit;
}

bool InequalityConstant::finite() const { return std::isfinite(gamma); }

double minimal_constant(double A, double s, double c) {
    if (A > 0.0) {
        const double sq = std::sqrt(s * s + 4.0 * A * c);
        // Cancellation-free branch of the positive root when s < 0.
        if (s < 0.0) return 2.0 * c / (sq - s);
        return (s + sq) / (2.0 * A);
    }
    if (c <= 0.0 && s <= 0.0) return 0.0;
    if (s < 0.0) return c / -s;
    return kInf;
}

InequalityReport inequality_scan(const Trajectory& traj) {
    const auto& recs = traj.records;
    if (recs.size() < 3) throw ValidationError("inequality_scan: need at least 3 records");
    if (!uniform_cadence(recs)) throw ValidationError("inequality_scan: records must have a uniform cadence");
    if (traj.mobility_dev2.size() != recs.size()) {
        throw ValidationError("inequality_scan: mobility deviation series does not match the records");
    }

    InequalityReport rep;
    rep.gradient_energy.name = "gradient_energy";
    rep.hminus.name = "hminus";
    rep.hminus_lq.name = "hminus_lq";
    rep.lyapunov.name = "lyapunov";
    const double step = recs[1].t - recs[0].t;

    auto update = [](InequalityConstant& ic, double g, double t) {
        if (g > ic.gamma || (std::isinf(g) && !std::isinf(ic.gamma))) {
            ic.gamma = g;
            ic.binding_time = t;
        }
    };

    // Once u equals its mean to rounding, the functionals and their differences
    // are noise; such samples say nothing about the inequalities.
    const double noise = kResolutionFloor * traj.meta.ubar0 * traj.meta.ubar0 * traj.meta.grid.measure;
    double max_dgrad = 0.0;
    std::vector<double> fine(recs.size(), 0.0), coarse(recs.size(), 0.0);
    for (std::size_t k = 1; k + 1 < recs.size(); ++k) {
        const DiagRecord& r = recs[k];
        if (std::min({recs[k - 1].udev2, r.udev2, recs[k + 1].udev2}) <= noise) {
            ++rep.unresolved;
            continue;
        }
        const double d_grad2 = (recs[k + 1].grad2 - recs[k - 1].grad2) / (2.0 * step);
        const double d_hm1 = (recs[k + 1].hm1 - recs[k - 1].hm1) / (2.0 * step);
        const double d_F = (recs[k + 1].F - recs[k - 1].F) / (2.0 * step);
        update(rep.gradient_energy, minimal_constant(r.udev2, d_grad2 + 0.5 * r.lap2, r.grad4), r.t);
        update(rep.hminus, minimal_constant(traj.mobility_dev2[k], d_hm1, r.udev2), r.t);
        update(rep.hminus_lq, minimal_constant(std::sqrt(r.grad4), d_hm1, r.udev2), r.t);
        update(rep.lyapunov, minimal_constant(r.grad2, d_F, r.udev2 + r.grad4), r.t);
        ++rep.samples;

        fine[k] = d_grad2;
        max_dgrad = std::max(max_dgrad, std::abs(d_grad2));
        if (k >= 2 && k + 2 < recs.size()) coarse[k] = (recs[k + 2].grad2 - recs[k - 2].grad2) / (4.0 * step);
    }
    // Derivative noise check: the stride-1 and stride-2 centered differences of
    // grad2 must agree in sign wherever the derivative is not negligible.
    const double floor = 1e-3 * max_dgrad;
    for (std::size_t k = 2; k + 2 < recs.size(); ++k) {
        const int a = sign_of(fine[k], floor);
        const int b = sign_of(coarse[k], floor);
        if (a != 0 && b != 0 && a != b) ++rep.sign_disagreements;
    }
    rep.low_confidence = rep.sign_disagreements > 0 || step > 0.1;
    return rep;
}

CosineBumpTest::CosineBumpTest(std::array<int, 2> modes, double t_start, double t_end)
    : modes_(modes), t_start_(t_start), t_end_(t_end) {
    if (modes[0] < 0 || modes[1] < 0) throw ValidationError("test function: modes must be nonnegative");
    if (!(t_start >= 0.0 && t_end > t_start)) throw ValidationError("test function: need 0 <= t_start < t_end");
}

double CosineBumpTest::time_factor(double t) const {
    const double s = (2.0 * t - t_start_ - t_end_) / (t_end_ - t_start_);
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double CosineBumpTest::time_derivative(double t) const {
    const double s = (2.0 * t - t_start_ - t_end_) / (t_end_ - t_start_);
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    const double ds_dt = 2.0 / (t_end_ - t_start_);
    return time_factor(t) * (-2.0 * s / (q * q)) * ds_dt;
}

Field CosineBumpTest::spatial(const Grid& g) const {
    return sample(g, [&](double x, double y) {
        double v = std::cos(modes_[0] * std::numbers::pi * x / g.extents[0]);
        if (g.dim == 2) v *= std::cos(modes_[1] * std::numbers::pi * y / g.extents[1]);
        return v;
    });
}

double CosineBumpTest::laplacian_factor(const Grid& g) const {
    double f = std::pow(modes_[0] * std::numbers::pi / g.extents[0], 2);
    if (g.dim == 2) f += std::pow(modes_[1] * std::numbers::pi / g.extents[1], 2);
    return f;
}

WeakResidual weak_residual(const Trajectory& traj, const CosineBumpTest& test) {
    const auto& frames = traj.frames;
    if (frames.size() < 2) throw ValidationError("weak_residual: need at least 2 stored field frames");
    if (test.t_start() < frames.front().t || test.t_end() > frames.back().t) {
        throw ValidationError("weak_residual: test function support exceeds the stored horizon");
    }
    const Grid& g = traj.meta.grid;
    const Field psi = test.spatial(g);
    const double lap = test.laplacian_factor(g);
    const double eps = traj.meta.eps;
    const RegularizedMotility& phi = traj.meta.motility;

    // Space integrals of each integrand at every frame, then trapezoid in time.
    std::vector<double> iu(frames.size()), iv(frames.size());
    for (std::size_t n = 0; n < frames.size(); ++n) {
        const FieldFrame& fr = frames[n];
        const double bt = test.time_factor(fr.t);
        const double dbt = test.time_derivative(fr.t);
        double su = 0.0, sv = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double u = fr.u[i];
            const double v = fr.v[i];
            const double test_val = psi[i] * bt;
            const double test_dt = psi[i] * dbt;
            const double test_lap = -lap * test_val;
            su += u * test_dt + u * phi.value(std::max(v, 0.0)) * test_lap;
            sv += v * test_dt + v * test_lap - u * v / (1.0 + eps * u) * test_val;
        }
        iu[n] = su * g.cell_volume();
        iv[n] = sv * g.cell_volume();
    }
    WeakResidual r;
    for (std::size_t n = 1; n < frames.size(); ++n) {
        const double w = 0.5 * (frames[n].t - frames[n - 1].t);
        r.r_u += w * (iu[n] + iu[n - 1]);
        r.r_v += w * (iv[n] + iv[n - 1]);
    }
    r.r_u = std::abs(r.r_u);
    r.r_v = std::abs(r.r_v);
    return r;
}

DecayReport decay_metrics(const Trajectory& traj, double t_ref, double threshold) {
    const auto& recs = traj.records;
    if (recs.empty()) throw ValidationError("decay_metrics: empty trajectory");
    if (recs.back().t < t_ref) {
        std::ostringstream msg;
        msg << "decay_metrics: trajectory ends at t=" << recs.back().t << " before the reference time " << t_ref;
        throw ValidationError(msg.str());
    }
    DecayReport rep;
    rep.t_ref = t_ref;
    rep.threshold = threshold;
    // Reference record: first sample at or after t_ref.
    std::size_t ref = 0;
    while (ref < recs.size() && recs[ref].t < t_ref - 1e-9 * std::max(1.0, t_ref)) ++ref;
    const DiagRecord& r_ref = recs[ref];
    const DiagRecord& r0 = recs.front();
    const DiagRecord& rT = recs.back();

    auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
    rep.hm1_ratio = ratio(rT.hm1, r_ref.hm1);
    rep.vinf_ratio = ratio(rT.vinf, r0.vinf);
    rep.F_ratio = ratio(rT.F, r_ref.F);

    for (std::size_t k = 0; k < recs.size(); ++k) {
        const DiagRecord& r = recs[k];
        if (!rep.vinf_below && ratio(r.vinf, r0.vinf) < threshold) rep.vinf_below = r.t;
        if (k < ref) continue;
        if (!rep.hm1_below && ratio(r.hm1, r_ref.hm1) < threshold) rep.hm1_below = r.t;
        if (!rep.F_below && ratio(r.F, r_ref.F) < threshold) rep.F_below = r.t;
    }
    return rep;
}

AuditReport audit(const Trajectory& traj) {
    AuditReport rep;
    const auto& recs = traj.records;
    if (recs.size() < 2) {
        rep.failures.push_back("fewer than 2 records");
        return rep;
    }
    const double mass0 = traj.meta.mass0;
    for (std::size_t k = 0; k < recs.size(); ++k) {
        const DiagRecord& r = recs[k];
        for (double x : {r.t, r.mass, r.vinf, r.grad2, r.grad4, r.lap2, r.udev2, r.uL2, r.hm1, r.y, r.F, r.absorb}) {
            if (!std::isfinite(x) || x < 0.0) rep.entries_valid = false;
        }
        const double drift = mass0 > 0.0 ? std::abs(r.mass - mass0) / mass0 : std::abs(r.mass);
        rep.max_mass_drift = std::max(rep.max_mass_drift, drift);
        if (k > 0) {
            if (!(r.t > recs[k - 1].t)) rep.time_monotone = false;
            rep.max_vinf_increase = std::max(rep.max_vinf_increase, r.vinf - recs[k - 1].vinf);
        }
    }
    rep.bounds = cumulative_bounds(traj);

    std::ostringstream msg;
    if (!rep.entries_valid) rep.failures.push_back("non-finite or negative diagnostic entries");
    if (!rep.time_monotone) rep.failures.push_back("time column is not strictly increasing");
    if (rep.max_mass_drift > kMassTolerance) {
        msg << "mass drift " << rep.max_mass_drift << " exceeds " << kMassTolerance;
        rep.failures.push_back(msg.str());
        msg.str("");
    }
    if (rep.max_vinf_increase > kMaxPrincipleSlack) {
        msg << "||v||_inf increased by " << rep.max_vinf_increase;
        rep.failures.push_back(msg.str());
        msg.str("");
    }
    if (!rep.bounds.absorb_pass) rep.failures.push_back("absorption integral exceeds |Omega|(||v0||_inf + 1)");
    if (!rep.bounds.grad2_pass) rep.failures.push_back("gradient integral exceeds |Omega|(||v0||_inf + 1)^2 / 2");
    return rep;
}

}  // namespace ksm
