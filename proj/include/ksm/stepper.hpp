#pragma once

/// @file stepper.hpp
/// @brief Time integration of the regularized system
///   u_t = Delta(u phi_eps(v)),  v_t = Delta v - u v / (1 + eps u)
/// with zero-flux boundaries.
///
/// The IMEX step performs two decoupled linear solves with coefficients
/// lagged from the start of the step:
///   (I - dt Delta_h + dt diag(u^n/(1+eps u^n))) v^{n+1} = v^n
///   (I - dt Delta_h diag(phi_eps(v^{n+1})))       u^{n+1} = u^n
/// Both matrices are M-matrices; the second has unit column sums, so mass is
/// conserved to rounding and ||v||_inf cannot grow.

#include "ksm/records.hpp"
#include "ksm/run_config.hpp"

#include <memory>

namespace ksm {

struct SolverOptions {
    double tolerance = 1e-12;  ///< accepted relative residual ||Ax-b||_inf / ||b||_inf
    int max_iterations = 20;   ///< iterative-refinement sweeps after the direct solve
};

struct StepStats {
    double residual = 0.0;  ///< max over the two solves
    int refinements = 0;
};

/// Reusable IMEX workspace. In 2D the sparse pattern is analyzed once and
/// only refactorized per step.
class ImexStepper {
public:
    ImexStepper(const Grid& grid, SolverOptions options = {});
    ~ImexStepper();
    ImexStepper(ImexStepper&&) noexcept;
    ImexStepper& operator=(ImexStepper&&) noexcept;

    State step(const State& s, double dt, const RegularizedMotility& phi, StepStats* stats = nullptr);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

State step_imex(const State& s, double dt, const RegularizedMotility& phi, const SolverOptions& options = {},
                StepStats* stats = nullptr);

/// Forward Euler on the same spatial discretization. Rejects dt > dt_cfl(s, phi, safety).
State step_explicit(const State& s, double dt, const RegularizedMotility& phi, double safety = 1.0);

/// safety * min( h^2 / (2 dim max phi_eps(v)),  h^2 / (2 dim),  1 / max(u/(1+eps u)) ).
double dt_cfl(const State& s, const RegularizedMotility& phi, double safety = 1.0);

/// Initial state built from a configuration (grid, motility, initial data).
struct Setup {
    Grid grid;
    RegularizedMotility motility{MotilitySpec{}, 0.0};
    State state;
    double v0_sup = 0.0;
};
Setup prepare(const RunConfig& config);

/// Integrates from t = 0 to the configured horizon, recording diagnostics at
/// the output cadence. Step failures end the run with complete = false.
Trajectory run(const RunConfig& config);

}  // namespace ksm
