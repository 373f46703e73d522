#include "ksm/geometry.hpp"

#include "ksm/error.hpp"
#include "text_util.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ksm {

Grid build_grid(int dim, std::span<const double> extents, std::span<const int> cells) {
    if (dim != 1 && dim != 2) {
        throw ValidationError("unsupported dimension " + std::to_string(dim) + " (expected 1 or 2)");
    }
    if (extents.size() != static_cast<std::size_t>(dim) || cells.size() != static_cast<std::size_t>(dim)) {
        throw ValidationError("grid: extents and cells need one entry per axis");
    }
    Grid g;
    g.dim = dim;
    g.measure = 1.0;
    for (int a = 0; a < dim; ++a) {
        if (!(extents[a] > 0.0) || !std::isfinite(extents[a])) {
            throw ValidationError("grid: extents must be positive");
        }
        if (cells[a] < 4) {
            throw ValidationError("grid: at least 4 cells per axis required");
        }
        g.extents[a] = extents[a];
        g.cells[a] = cells[a];
        g.h[a] = extents[a] / cells[a];
        g.measure *= extents[a];
    }
    return g;
}

Field::Field(Grid grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

Field::Field(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw ValidationError("field: value count " + std::to_string(values_.size()) +
                              " does not match grid cell count " + std::to_string(grid_.size()));
    }
}

double Field::min() const {
    return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

double integrate(const Field& f) {
    double sum = 0.0;
    for (double x : f.values()) sum += x;
    return sum * f.grid().cell_volume();
}

double inner(const Field& f, const Field& g) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * g[i];
    return sum * f.grid().cell_volume();
}

Field laplacian_neumann(const Field& f) {
    const Grid& g = f.grid();
    Field out(g);
    const int n0 = g.cells[0];
    const int n1 = g.cells[1];
    const double w0 = 1.0 / (g.h[0] * g.h[0]);
    const double w1 = 1.0 / (g.h[1] * g.h[1]);
    // Accumulate face fluxes; boundary faces carry none.
    for (int i0 = 0; i0 < n0; ++i0) {
        for (int i1 = 0; i1 < n1; ++i1) {
            const std::size_t c = g.index(i0, i1);
            if (i0 + 1 < n0) {
                const std::size_t r = g.index(i0 + 1, i1);
                const double flux = (f[r] - f[c]) * w0;
                out[c] += flux;
                out[r] -= flux;
            }
            if (i1 + 1 < n1) {
                const std::size_t r = g.index(i0, i1 + 1);
                const double flux = (f[r] - f[c]) * w1;
                out[c] += flux;
                out[r] -= flux;
            }
        }
    }
    return out;
}

double grad_power_integral(const Field& f, int p) {
    if (p != 2 && p != 4) {
        throw ValidationError("grad_power_integral: p must be 2 or 4");
    }
    const Grid& g = f.grid();
    double sum = 0.0;
    for (int i0 = 0; i0 < g.cells[0]; ++i0) {
        for (int i1 = 0; i1 < g.cells[1]; ++i1) {
            const std::size_t c = g.index(i0, i1);
            if (i0 + 1 < g.cells[0]) {
                const double d = (f[g.index(i0 + 1, i1)] - f[c]) / g.h[0];
                sum += p == 2 ? d * d : d * d * d * d;
            }
            if (i1 + 1 < g.cells[1]) {
                const double d = (f[g.index(i0, i1 + 1)] - f[c]) / g.h[1];
                sum += p == 2 ? d * d : d * d * d * d;
            }
        }
    }
    return sum * g.cell_volume();
}

double laplacian_sq_integral(const Field& f) {
    const Field lap = laplacian_neumann(f);
    return inner(lap, lap);
}

double linf_norm(const Field& f) {
    double m = 0.0;
    for (double x : f.values()) m = std::max(m, std::abs(x));
    return m;
}

double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

void write_field(std::ostream& os, const Field& f, double t) {
    const Grid& g = f.grid();
    os << "ksm-field v1 dim=" << g.dim << " cells=" << g.cells[0];
    if (g.dim == 2) os << ',' << g.cells[1];
    os << " extents=" << detail::format_double(g.extents[0]);
    if (g.dim == 2) os << ',' << detail::format_double(g.extents[1]);
    os << " t=" << detail::format_double(t) << '\n';
    for (double x : f.values()) os << detail::format_double(x) << '\n';
}

void write_field(const std::string& path, const Field& f, double t) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open " + path + " for writing");
    write_field(os, f, t);
    if (!os) throw ValidationError("failed writing " + path);
}

FieldSnapshot read_field(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw ValidationError("field file: missing header");
    std::istringstream hs(header);
    std::string magic, version;
    hs >> magic >> version;
    if (magic != "ksm-field") throw ValidationError("field file: bad magic '" + magic + "'");
    if (version != "v1") throw ValidationError("field file: unsupported version '" + version + "'");

    int dim = 0;
    std::vector<int> cells;
    std::vector<double> extents;
    double t = 0.0;
    bool have_t = false;
    std::string tok;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ValidationError("field file: malformed header token '" + tok + "'");
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "dim") {
            dim = static_cast<int>(detail::parse_double(val));
        } else if (key == "cells") {
            for (const auto& part : detail::split(val, ',')) cells.push_back(static_cast<int>(detail::parse_double(part)));
        } else if (key == "extents") {
            for (const auto& part : detail::split(val, ',')) extents.push_back(detail::parse_double(part));
        } else if (key == "t") {
            t = detail::parse_double(val);
            have_t = true;
        } else {
            throw ValidationError("field file: unknown header key '" + key + "'");
        }
    }
    if (!have_t) throw ValidationError("field file: header lacks t=");
    const Grid g = build_grid(dim, extents, cells);

    std::vector<double> values;
    values.reserve(g.size());
    std::string line;
    while (values.size() < g.size() && std::getline(is, line)) {
        if (line.empty()) continue;
        values.push_back(detail::parse_double(line));
    }
    if (values.size() != g.size()) {
        throw ValidationError("field file: truncated (" + std::to_string(values.size()) + " of " +
                              std::to_string(g.size()) + " values)");
    }
    return {Field(g, std::move(values)), t};
}

FieldSnapshot read_field(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open field file " + path);
    return read_field(is);
}

}  // namespace ksm
