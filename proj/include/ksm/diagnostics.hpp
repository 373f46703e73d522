#pragma once

/// @file diagnostics.hpp
/// @brief Functionals, a-priori bounds, dissipation inequalities, weak-form
/// residuals and decay metrics evaluated on states and trajectories.
///
/// The analytic constants behind the dissipation inequalities are not
/// computable, so the scans invert them: for each inequality the report
/// holds the smallest constant that makes it true at every sampled time.

#include "ksm/records.hpp"

#include <array>
#include <optional>
#include <string>

namespace ksm {

DiagRecord snapshot(const State& s, double weight_a = 1.0, double weight_b = 1.0);

/// int |ubar0 phi_eps(v) - mean(u phi_eps(v))|^2.
double mobility_deviation_sq(const State& s, const RegularizedMotility& phi);

/// Time integrals of the absorption and Dirichlet energy against their
/// closed-form caps |Omega|(||v0||_inf + 1) and |Omega|(||v0||_inf + 1)^2 / 2.
struct BoundReport {
    double absorb_integral = 0.0;
    double absorb_bound = 0.0;
    double grad2_integral = 0.0;
    double grad2_bound = 0.0;
    bool absorb_pass = false;
    bool grad2_pass = false;
    double absorb_margin = 0.0;  ///< bound - integral
    double grad2_margin = 0.0;
    bool partial = false;        ///< trajectory ended early

    bool pass() const { return absorb_pass && grad2_pass; }
};

/// Relative slack granted to the trapezoidal quadrature.
inline constexpr double kBoundSlack = 1e-8;

BoundReport cumulative_bounds(const Trajectory& traj);

/// ybar(t) = c7 (t - tau/2)^{-1/(kappa-1)} + c7 on (tau/2, inf).
class Supersolution {
public:
    Supersolution(double tau, double kappa, double c7);
    double operator()(double t) const;

    double tau() const { return tau_; }
    double kappa() const { return kappa_; }
    double c7() const { return c7_; }

private:
    double tau_;
    double kappa_;
    double c7_;
};

Supersolution odi_supersolution(double tau, double kappa, double c7);

struct SupersolutionFit {
    double c7 = 0.0;            ///< smallest c7 with y(t) <= ybar(t) for all sampled t > tau
    double binding_time = 0.0;
    int samples = 0;
};

SupersolutionFit fit_supersolution(const Trajectory& traj, double tau, double kappa);

struct InequalityConstant {
    std::string name;
    double gamma = 0.0;         ///< +inf if no finite constant validates the samples
    double binding_time = 0.0;
    bool finite() const;
};

struct InequalityReport {
    InequalityConstant gradient_energy;  ///< d/dt grad2 + lap2/2 + grad4/G <= G udev2
    InequalityConstant hminus;           ///< d/dt hm1 + udev2/G <= G mobility_dev2
    InequalityConstant hminus_lq;        ///< d/dt hm1 + udev2/G <= G ||grad v||_{L^4}^2
    InequalityConstant lyapunov;         ///< d/dt F + (udev2 + grad4)/G <= G grad2
    int samples = 0;
    int unresolved = 0;  ///< samples skipped because udev2 was at the rounding floor
    int sign_disagreements = 0;
    bool low_confidence = false;
};

/// Samples whose udev2 (or a neighbour's) is at most kResolutionFloor * ubar0^2 |Omega|
/// are skipped.
inline constexpr double kResolutionFloor = 1e-18;

InequalityReport inequality_scan(const Trajectory& traj);

/// Smallest G >= 0 with A G^2 - s G - c >= 0 for A, c >= 0 (+inf if none).
double minimal_constant(double A, double s, double c);

/// phi(x, t) = prod_a cos(k_a pi x_a / L_a) * b(t), where b is the standard
/// C-infinity bump on (t_start, t_end) scaled to peak 1. Satisfies the
/// zero-flux condition for every integer mode.
class CosineBumpTest {
public:
    CosineBumpTest(std::array<int, 2> modes, double t_start, double t_end);

    double time_factor(double t) const;
    double time_derivative(double t) const;
    /// Spatial factor at a cell center and its exact Laplacian multiplier.
    Field spatial(const Grid& g) const;
    double laplacian_factor(const Grid& g) const;  ///< Delta phi = -factor * phi

    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }

private:
    std::array<int, 2> modes_;
    double t_start_;
    double t_end_;
};

struct WeakResidual {
    double r_u = 0.0;
    double r_v = 0.0;
};

/// Residuals of the very weak formulation, trapezoidal in time over the
/// stored frames and midpoint in space.
WeakResidual weak_residual(const Trajectory& traj, const CosineBumpTest& test);

struct DecayReport {
    double t_ref = 1.0;
    double threshold = 0.05;
    double hm1_ratio = 0.0;   ///< hm1(T) / hm1(t_ref)
    double vinf_ratio = 0.0;  ///< vinf(T) / vinf(0)
    double F_ratio = 0.0;     ///< F(T) / F(t_ref)
    std::optional<double> hm1_below;  ///< first time the ratio drops under threshold
    std::optional<double> vinf_below;
    std::optional<double> F_below;
};

DecayReport decay_metrics(const Trajectory& traj, double t_ref = 1.0, double threshold = 0.05);

/// Record-level invariants used by the audit: mass drift, ||v||_inf
/// monotonicity, finiteness and sign of every entry, the a-priori bounds.
struct AuditReport {
    BoundReport bounds;
    double max_mass_drift = 0.0;
    double max_vinf_increase = 0.0;
    bool entries_valid = true;
    bool time_monotone = true;
    std::vector<std::string> failures;

    bool pass() const { return failures.empty(); }
};

inline constexpr double kMassTolerance = 1e-10;
inline constexpr double kMaxPrincipleSlack = 1e-12;

AuditReport audit(const Trajectory& traj);

}  // namespace ksm
