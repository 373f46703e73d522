#pragma once

/// @file initial_data.hpp
/// @brief Grid realizations (u0_eps, v0_eps) of possibly measure-valued
/// initial data with exact mass and a strictly positive signal.

#include "ksm/geometry.hpp"

#include <array>
#include <variant>
#include <vector>

namespace ksm {

struct ConstantProfile {
    double value = 0.0;
};

/// Gaussian exp(-|x-center|^2 / (2 width^2)) rescaled to the given mass.
struct BumpProfile {
    std::array<double, 2> center{0.5, 0.5};
    double width = 0.1;
    double mass = 1.0;
};

/// Point mass concentrated in the single cell containing the center.
struct DiracProfile {
    std::array<double, 2> center{0.5, 0.5};
    double mass = 1.0;
};

/// Explicit per-cell values (e.g. loaded from a field snapshot).
struct CellValues {
    std::vector<double> values;
};

using UProfile = std::variant<ConstantProfile, BumpProfile, DiracProfile, CellValues>;
using VProfile = std::variant<ConstantProfile, CellValues>;

struct InitialSpec {
    UProfile u0 = ConstantProfile{1.0};
    VProfile v0 = ConstantProfile{1.0};
};

struct InitialFields {
    Field u0;
    Field v0;
    double mass = 0.0;     ///< integral of u0_eps
    double v0_sup = 0.0;   ///< ||v0||_inf of the unregularized signal
};

/// Positivity floor applied to v0: v0_eps = max(v0, eps * kSignalFloor).
inline constexpr double kSignalFloor = 1.0;

/// Realizes the data on a grid. eps must lie in [0, 1); eps = 0 skips the
/// positivity floor and represents the unregularized problem.
InitialFields realize(const InitialSpec& spec, const Grid& grid, double eps);

}  // namespace ksm
