#pragma once

/// @file run_config.hpp
/// @brief Validated run configuration. Parsed from JSON by parse_config().

#include "ksm/initial_data.hpp"
#include "ksm/motility.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ksm {

enum class Scheme { imex, explicit_euler };

struct GridSpec {
    int dim = 1;
    std::vector<double> extents{1.0};
    std::vector<int> cells{64};
};

struct TimeSpec {
    Scheme scheme = Scheme::imex;
    double dt = 1e-3;
    double horizon = 1.0;
    double safety = 0.9;
    double solver_tol = 1e-12;
    int max_iterations = 20;
    /// IMEX steps are capped at cfl_cap * dt_cfl(initial state); 0 disables the cap.
    double cfl_cap = 10.0;
};

struct OutputSpec {
    double cadence = 0.1;
    int field_stride = 10;  ///< store fields every field_stride records
    std::string dir = "ksm_out";
};

struct DiagnosticsSpec {
    double a = 1.0;
    double b = 1.0;
    double t_ref = 1.0;
    double decay_threshold = 0.05;
    double kappa = 2.0;
    double tau = 0.1;
    int weak_mode = 1;       ///< cosine wavenumber of the weak-form test function
    double weak_start = -1;  ///< support of the temporal bump; < 0 selects defaults
    double weak_end = -1;
};

struct SweepSpec {
    std::vector<double> epsilons;
};

struct RelaxSpec {
    std::vector<int> cells;
    double tau = 0.1;
};

struct RefineSpec {
    std::vector<int> cells;
    bool scale_dt = true;
};

struct RunConfig {
    GridSpec grid;
    MotilitySpec motility = MotilitySpec::power(1.0, 1.0);
    double eps = 0.01;
    InitialSpec initial;
    TimeSpec time;
    OutputSpec output;
    DiagnosticsSpec diagnostics;
    std::optional<SweepSpec> sweep;
    std::optional<RelaxSpec> relax;
    std::optional<RefineSpec> refine;
};

}  // namespace ksm
