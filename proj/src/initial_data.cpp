#include "ksm/initial_data.hpp"

#include "ksm/error.hpp"

#include <algorithm>
#include <cmath>

namespace ksm {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void check_center(const Grid& g, const std::array<double, 2>& center, const char* what) {
    for (int a = 0; a < g.dim; ++a) {
        if (!(center[a] >= 0.0 && center[a] <= g.extents[a])) {
            throw ValidationError(std::string(what) + ": center lies outside the domain");
        }
    }
}

void check_values(const std::vector<double>& values, const Grid& g, const char* what) {
    if (values.size() != g.size()) {
        throw ValidationError(std::string(what) + ": cell value count does not match the grid");
    }
    for (double x : values) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError(std::string(what) + ": values must be finite and nonnegative");
    }
}

int containing_cell(const Grid& g, int axis, double x) {
    const int i = static_cast<int>(std::floor(x / g.h[axis]));
    return std::clamp(i, 0, g.cells[axis] - 1);
}

Field realize_u(const UProfile& profile, const Grid& g) {
    return std::visit(
        overloaded{
            [&](const ConstantProfile& p) {
                if (!(p.value >= 0.0) || !std::isfinite(p.value)) throw ValidationError("initial.u0: value must be nonnegative");
                return Field(g, p.value);
            },
            [&](const BumpProfile& p) {
                if (!(p.mass >= 0.0)) throw ValidationError("initial.u0: mass must be nonnegative");
                if (!(p.width > 0.0)) throw ValidationError("initial.u0: width must be positive");
                check_center(g, p.center, "initial.u0");
                Field f = sample(g, [&](double x, double y) {
                    double r2 = (x - p.center[0]) * (x - p.center[0]);
                    if (g.dim == 2) r2 += (y - p.center[1]) * (y - p.center[1]);
                    return std::exp(-r2 / (2.0 * p.width * p.width));
                });
                const double raw = integrate(f);
                if (!(raw > 0.0)) throw ValidationError("initial.u0: bump is not resolved by the grid");
                for (double& x : f.values()) x *= p.mass / raw;
                return f;
            },
            [&](const DiracProfile& p) {
                if (!(p.mass >= 0.0)) throw ValidationError("initial.u0: mass must be nonnegative");
                check_center(g, p.center, "initial.u0");
                Field f(g, 0.0);
                const int i0 = containing_cell(g, 0, p.center[0]);
                const int i1 = g.dim == 2 ? containing_cell(g, 1, p.center[1]) : 0;
                f[g.index(i0, i1)] = p.mass / g.cell_volume();
                return f;
            },
            [&](const CellValues& p) {
                check_values(p.values, g, "initial.u0");
                return Field(g, p.values);
            },
        },
        profile);
}

Field realize_v(const VProfile& profile, const Grid& g) {
    return std::visit(
        overloaded{
            [&](const ConstantProfile& p) {
                if (!(p.value >= 0.0) || !std::isfinite(p.value)) throw ValidationError("initial.v0: value must be nonnegative");
                return Field(g, p.value);
            },
            [&](const CellValues& p) {
                check_values(p.values, g, "initial.v0");
                return Field(g, p.values);
            },
        },
        profile);
}

}  // namespace

InitialFields realize(const InitialSpec& spec, const Grid& grid, double eps) {
    if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("realize: eps must lie in [0, 1)");
    InitialFields out;
    out.u0 = realize_u(spec.u0, grid);
    out.v0 = realize_v(spec.v0, grid);
    out.v0_sup = linf_norm(out.v0);
    const double floor = eps * kSignalFloor;
    for (double& x : out.v0.values()) x = std::max(x, floor);
    out.mass = integrate(out.u0);
    return out;
}

}  // namespace ksm
