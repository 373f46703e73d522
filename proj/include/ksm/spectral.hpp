#pragma once

/// @file spectral.hpp
/// @brief Cosine eigenbasis of the discrete Neumann Laplacian and the
/// negative fractional powers of A_h = -Delta_h on mean-zero fields.
///
/// Normalization: a field is expanded as
///   f(x_j) = sum_k c_k prod_axes cos(k_a pi (j_a + 1/2) / N_a),
/// and the L2 norm satisfies ||f||^2 = sum_k w_k c_k^2 with
/// w_k = |Omega| prod_axes (k_a == 0 ? 1 : 1/2).

#include "ksm/geometry.hpp"

#include <vector>

namespace ksm {

struct CosineCoeffs {
    Grid grid;
    std::vector<double> coeffs;       ///< c_k, same row-major layout as Field
    std::vector<double> eigenvalues;  ///< lambda_k of -Delta_h; lambda_0 = 0
    std::vector<double> weights;      ///< Parseval weights w_k
};

/// Eigenvalues (2/h^2)(1 - cos(k pi h / L)) summed over axes, row-major.
std::vector<double> neumann_eigenvalues(const Grid& grid);

CosineCoeffs to_cosine(const Field& f);
Field from_cosine(const CosineCoeffs& c);

struct HMinusHalfResult {
    double value = 0.0;
    /// |actual mean - supplied ubar|; zero up to rounding when ubar is the true mean.
    double mean_discrepancy = 0.0;
};

/// ||A_h^{-1/2}(f - mean f)||^2 = sum_{k != 0} w_k c_k^2 / lambda_k.
/// The mean mode is always removed; the discrepancy against ubar is reported.
HMinusHalfResult hminus_half_norm(const Field& f, double ubar);

inline double hminus_half_norm_sq(const Field& f, double ubar) { return hminus_half_norm(f, ubar).value; }

/// A_h^{-beta} applied to the mean-zero part of f (mean mode mapped to zero).
Field fractional_inverse(const Field& f, double beta);

}  // namespace ksm
