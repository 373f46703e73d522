#pragma once

/// @file geometry.hpp
/// @brief Cell-centered tensor grids on intervals and rectangles, scalar
/// grid functions, and the zero-flux finite-volume operators built on them.
///
/// Cells are indexed row-major with axis 0 slowest: flat = i0 * n1 + i1.
/// A 1D grid is stored as n1 = 1 with a unit-width dummy axis, so every
/// stencil below is written once for both dimensions.

#include <algorithm>
#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ksm {

struct Grid {
    int dim = 1;
    std::array<double, 2> extents{1.0, 1.0};
    std::array<int, 2> cells{1, 1};
    std::array<double, 2> h{1.0, 1.0};
    double measure = 1.0;

    std::size_t size() const {
        return static_cast<std::size_t>(cells[0]) * static_cast<std::size_t>(cells[1]);
    }
    double cell_volume() const { return h[0] * h[1]; }
    double min_h() const { return dim == 1 ? h[0] : std::min(h[0], h[1]); }

    /// Coordinate of the center of cell i along an axis.
    double center(int axis, int i) const { return (i + 0.5) * h[axis]; }

    std::size_t index(int i0, int i1) const {
        return static_cast<std::size_t>(i0) * static_cast<std::size_t>(cells[1]) +
               static_cast<std::size_t>(i1);
    }

    bool operator==(const Grid&) const = default;
};

/// Builds a grid on [0,L1] or [0,L1]x[0,L2]. Requires at least 4 cells per axis.
Grid build_grid(int dim, std::span<const double> extents, std::span<const int> cells);

/// Scalar grid function: one value per cell.
class Field {
public:
    Field() = default;
    explicit Field(Grid grid, double fill = 0.0);
    Field(Grid grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    const std::vector<double>& data() const { return values_; }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    double min() const;
    bool nonnegative() const { return min() >= 0.0; }

    bool operator==(const Field&) const = default;

private:
    Grid grid_{};
    std::vector<double> values_;
};

/// Midpoint quadrature: sum of f times the cell volume.
double integrate(const Field& f);

/// Volume-weighted inner product sum_i f_i g_i |cell|.
double inner(const Field& f, const Field& g);

/// Second-order cell-centered Laplacian with zero flux through the boundary.
Field laplacian_neumann(const Field& f);

/// Face-based gradient functional: sum over interior faces of |(f_R - f_L)/h|^p
/// times the cell volume (boundary faces carry zero flux). p must be 2 or 4.
/// In 2D each face contributes its normal component only.
double grad_power_integral(const Field& f, int p);

/// Integral of (Delta_h f)^2.
double laplacian_sq_integral(const Field& f);

double linf_norm(const Field& f);

/// sqrt(integral of f^2).
double l2_norm(const Field& f);

/// Samples g(x, y) at cell centers (y = 0 on 1D grids).
template <class Fn>
Field sample(const Grid& grid, Fn&& g) {
    Field f(grid);
    for (int i0 = 0; i0 < grid.cells[0]; ++i0) {
        for (int i1 = 0; i1 < grid.cells[1]; ++i1) {
            const double y = grid.dim == 2 ? grid.center(1, i1) : 0.0;
            f[grid.index(i0, i1)] = g(grid.center(0, i0), y);
        }
    }
    return f;
}

/// Field snapshot text format:
///   ksm-field v1 dim=<d> cells=<n1[,n2]> extents=<L1[,L2]> t=<time>
/// followed by one value per line at 17 significant digits.
void write_field(std::ostream& os, const Field& f, double t);
void write_field(const std::string& path, const Field& f, double t);

struct FieldSnapshot {
    Field field;
    double t = 0.0;
};

FieldSnapshot read_field(std::istream& is);
FieldSnapshot read_field(const std::string& path);

}  // namespace ksm
