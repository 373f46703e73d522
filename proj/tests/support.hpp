#pragma once

#include "ksm/geometry.hpp"
#include "ksm/run_config.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <random>
#include <string>
#include <vector>

namespace ksm::test {

/// Message of the exception thrown by fn, or "" if none was thrown.
template <class Fn>
std::string error_of(Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

inline bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

inline Grid line(int n, double L = 1.0) {
    const std::vector<double> ext{L};
    const std::vector<int> cells{n};
    return build_grid(1, ext, cells);
}

inline Grid plane(int n1, int n2, double L1 = 1.0, double L2 = 1.0) {
    const std::vector<double> ext{L1, L2};
    const std::vector<int> cells{n1, n2};
    return build_grid(2, ext, cells);
}

inline Field random_field(const Grid& g, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    Field f(g);
    for (auto& x : f.values()) x = d(rng);
    return f;
}

/// Dense matrix of the discrete Laplacian, assembled column by column.
inline Eigen::MatrixXd dense_laplacian(const Grid& g) {
    const int n = static_cast<int>(g.size());
    Eigen::MatrixXd L(n, n);
    for (int j = 0; j < n; ++j) {
        Field e(g);
        e[j] = 1.0;
        const Field col = laplacian_neumann(e);
        for (int i = 0; i < n; ++i) L(i, j) = col[i];
    }
    return L;
}

/// Small 1D configuration used across tests: bump u0, v0 = 1.
inline RunConfig small_config(int cells = 32, double horizon = 0.2, double dt = 1e-3) {
    RunConfig c;
    c.grid = {1, {1.0}, {cells}};
    c.initial.u0 = BumpProfile{{0.3, 0.5}, 0.1, 1.0};
    c.initial.v0 = ConstantProfile{1.0};
    c.time.dt = dt;
    c.time.horizon = horizon;
    c.time.cfl_cap = 0.0;
    c.output.cadence = 0.01;
    c.output.field_stride = 5;
    return c;
}

}  // namespace ksm::test
