#pragma once

/// @file experiments.hpp
/// @brief Multi-run studies: eps -> 0 sweeps, relaxation from point-mass
/// data, and grid/time refinement.
///
/// Weak and weak-star limits cannot be observed on a grid. Every report here
/// substitutes Cauchy criteria in L2 at a fixed terminal time.

#include "ksm/diagnostics.hpp"
#include "ksm/run_config.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ksm {

/// Called after each member run, e.g. to persist it.
using RunObserver = std::function<void(std::size_t index, const RunConfig&, const Trajectory&)>;

/// Nonnegative spatial weight psi for the absorption functional.
struct WeightFunction {
    std::string name;
    std::function<Field(const Grid&)> build;
};

/// psi = 1 and psi = 1 + cos(pi x / L1).
std::vector<WeightFunction> builtin_weights();

/// int_0^T int u v / (1 + eps_eval u) psi, trapezoidal over the stored frames.
/// eps_eval may differ from the run's eps (frozen-trajectory comparisons).
double absorption_functional(const Trajectory& traj, double eps_eval, const Field& psi);

struct SweepReport {
    std::vector<double> epsilons;
    double mass = 0.0;
    std::vector<DiagRecord> terminal;
    /// d_i = ||u_i(T) - u_{i+1}(T)||_2 + ||v_i(T) - v_{i+1}(T)||_2.
    std::vector<double> cauchy;
    /// log(d_i / d_{i+1}) / log(eps_i / eps_{i+1}); empty if an eps is 0.
    std::vector<double> cauchy_rates;
    std::vector<std::string> weight_names;
    std::vector<std::vector<double>> functionals;  ///< [weight][eps]
    bool complete = true;
    std::string failure;

    bool cauchy_decreasing() const;
    /// |I_{i+1} - I_i| strictly decreasing for the given weight.
    bool functional_increments_decreasing(std::size_t weight) const;
};

/// eps list must be strictly decreasing in [0, 1) with at least 3 entries.
SweepReport epsilon_sweep(const RunConfig& base, std::span<const double> epsilons, const RunObserver& observer = {});

struct RelaxLevel {
    int cells = 0;
    double uL2_initial = 0.0;
    double uL2_tau = 0.0;
    double uL2_tau_plus_one = 0.0;
    double window_integral = 0.0;  ///< int_tau^{tau+1} uL2 dt
    double max_mass_drift = 0.0;
};

struct RelaxReport {
    double tau = 0.1;
    double mass = 0.0;
    std::vector<RelaxLevel> levels;
    double sup_window_integral = 0.0;
    double tau_spread = 0.0;        ///< max over grids of uL2(tau) / min over grids
    double initial_divergence = 0.0;  ///< uL2(0) on finest / coarsest grid
    /// uL2 on the finest grid at tau in {0.05, 0.1, 0.2} and the fitted
    /// exponent p of uL2 ~ C tau^{-p}.
    std::vector<double> profile_taus;
    std::vector<double> profile_uL2;
    double profile_exponent = 0.0;
    bool complete = true;
    std::string failure;
};

RelaxReport relaxation_experiment(const RunConfig& base, std::span<const int> cells, double tau,
                                  const RunObserver& observer = {});

struct RefinementLevel {
    int cells = 0;
    double dt = 0.0;
    double u_error = 0.0;  ///< L2 distance to the finest level (restricted), 0 on the finest
    double v_error = 0.0;
    WeakResidual residual;
};

struct ConvergenceReport {
    std::vector<RefinementLevel> levels;
    std::vector<double> u_orders;  ///< log2(e_l / e_{l+1}) over non-finest levels
    std::vector<double> v_orders;
    std::vector<double> residual_u_orders;  ///< log2(r_l / r_{l+1})
    std::vector<double> residual_v_orders;
    double residual_u_slope = 0.0;  ///< least-squares slope of log r against log h
    double residual_v_slope = 0.0;
    double mass = 0.0;
    bool complete = true;
    std::string failure;
};

/// Levels are axis-0 cell counts, each exactly twice the previous; other axes
/// scale with them. With scale_dt the step and output cadence halve too.
ConvergenceReport refinement_study(const RunConfig& base, std::span<const int> cells, bool scale_dt = true,
                                   const RunObserver& observer = {});

/// Cell averages of a fine field over a nested coarse grid.
Field restrict_to(const Field& fine, const Grid& coarse);

/// Linear interpolation of a record member at time t.
double value_at(const std::vector<DiagRecord>& recs, double DiagRecord::*member, double t);

/// Weak-form test function used by reports: mode from the config, support
/// defaulting to (0.1 T, 0.9 T).
CosineBumpTest default_test_function(const RunConfig& config);

}  // namespace ksm
