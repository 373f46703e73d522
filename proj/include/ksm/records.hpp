#pragma once

/// @file records.hpp
/// @brief Value types shared by the stepper, diagnostics and persistence:
/// simulation state, per-record diagnostics, and trajectories.

#include "ksm/geometry.hpp"
#include "ksm/motility.hpp"

#include <limits>
#include <string>
#include <vector>

namespace ksm {

struct State {
    double t = 0.0;
    Field u;
    Field v;
    double eps = 0.0;
    double mass0 = 0.0;  ///< integral of u at t = 0
    double ubar0 = 0.0;  ///< mass0 / |Omega|
};

/// One row of diag.csv. All integrals are grid quadratures.
struct DiagRecord {
    double t = 0.0;
    double mass = 0.0;    ///< int u
    double vinf = 0.0;    ///< ||v||_inf
    double grad2 = 0.0;   ///< int |grad v|^2
    double grad4 = 0.0;   ///< int |grad v|^4
    double lap2 = 0.0;    ///< int |Delta v|^2
    double udev2 = 0.0;   ///< int (u - ubar0)^2
    double uL2 = 0.0;     ///< int u^2
    double hm1 = 0.0;     ///< ||A^{-1/2}(u - ubar0)||^2
    double y = 0.0;       ///< hm1 + a grad2
    double F = 0.0;       ///< hm1 + b grad2
    double absorb = 0.0;  ///< int u v / (1 + eps u)

    bool operator==(const DiagRecord&) const = default;
};

/// Fields stored at a multiple of the output cadence.
struct FieldFrame {
    int index = 0;  ///< record index this frame belongs to
    double t = 0.0;
    Field u;
    Field v;
};

/// Per-step invariant tracking over a run (every step, not only output records).
struct StepMonitor {
    long steps = 0;
    double max_mass_drift = 0.0;     ///< max |int u - mass0| / mass0
    double max_vinf_increase = 0.0;  ///< max over steps of ||v^{n+1}||_inf - ||v^n||_inf
    double min_u = std::numeric_limits<double>::infinity();
    double min_v = std::numeric_limits<double>::infinity();
    double max_residual = 0.0;       ///< worst relative linear-solve residual
};

struct RunMeta {
    Grid grid;
    RegularizedMotility motility{MotilitySpec{}, 0.0};
    double eps = 0.0;
    double mass0 = 0.0;
    double ubar0 = 0.0;
    double v0_sup = 0.0;   ///< ||v0||_inf of the unregularized data
    double weight_a = 1.0;
    double weight_b = 1.0;
    std::string scheme = "imex";
    double dt = 0.0;
    double cadence = 0.0;
    int steps_per_output = 1;
    int field_stride = 1;
    double horizon = 0.0;
    std::vector<std::string> warnings;
};

struct Trajectory {
    RunMeta meta;
    std::vector<DiagRecord> records;
    /// Right-hand integrand of the H^{-1} dissipation inequality per record:
    /// int |ubar0 phi_eps(v) - mean(u phi_eps(v))|^2.
    std::vector<double> mobility_dev2;
    std::vector<FieldFrame> frames;
    StepMonitor monitor;
    bool complete = true;
    std::string failure;
};

}  // namespace ksm
