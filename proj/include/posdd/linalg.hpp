#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "posdd/types.hpp"

namespace posdd {

// Off-diagonal entries down to -kMetzlerTol still count as Metzler; absorbs
// rounding from LP recovery.
inline constexpr double kMetzlerTol = 1e-12;
// Strictness margins for Hurwitz / Schur classification.
inline constexpr double kHurwitzMargin = 1e-9;
inline constexpr double kSchurMargin = 1e-9;

/// Kronecker product A (x) B.
Matrix kron(const Matrix& A, const Matrix& B);

/// Column-wise Khatri-Rao product: column j of the result is kron(M1.col(j), M2.col(j)).
Matrix khatri_rao_col(const Matrix& M1, const Matrix& M2);

/// Column-major vectorization and its inverse.
Vector vec(const Matrix& M);
Matrix unvec(const Vector& x, Eigen::Index rows, Eigen::Index cols);

/// 0/1 matrix of size n(n-1) x n^2 extracting the off-diagonal entries of a
/// column-major vectorized n x n matrix, in vec order.
Matrix metzler_index_matrix(Eigen::Index n);

bool is_metzler(const Matrix& A, double tol = kMetzlerTol);
bool is_nonnegative(const Matrix& A, double tol = kMetzlerTol);

/// All eigenvalues of a square matrix.
std::vector<std::complex<double>> eigenvalues(const Matrix& A);

double spectral_abscissa(const Matrix& A);
double spectral_radius(const Matrix& A);

struct StabilityReport {
    bool is_metzler = false;
    bool is_nonnegative = false;
    bool is_hurwitz = false;
    bool is_schur = false;
    double spectral_abscissa = 0.0;
    double spectral_radius = 0.0;
    std::optional<Vector> dlclf_vector;  // v > 0 with Av < 0 (CT) or Av < v (DT)
};

/// Classifies A as a positive system matrix: Metzler/nonnegativity flags,
/// Hurwitz/Schur via eigenvalues, and a DLCLF witness v (found by LP) when A
/// is positive and stable in the appropriate sense.
StabilityReport check_positive_stability(const Matrix& A, TimeKind tk);

/// C1 of the positive-stability characterization: leading principal minors of
/// -A (continuous) or I-A (discrete) all positive. Only meaningful when A is
/// Metzler / nonnegative.
bool principal_minors_positive(const Matrix& A, TimeKind tk);

}  // namespace posdd
