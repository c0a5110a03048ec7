#include "posdd/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "posdd/lp.hpp"

namespace posdd {

Matrix kron(const Matrix& A, const Matrix& B) {
    require_finite(A, "kron: A");
    require_finite(B, "kron: B");
    Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

Matrix khatri_rao_col(const Matrix& M1, const Matrix& M2) {
    require(M1.cols() == M2.cols(), "khatri_rao_col: column counts differ");
    Matrix out(M1.rows() * M2.rows(), M1.cols());
    for (Eigen::Index j = 0; j < M1.cols(); ++j)
        for (Eigen::Index i = 0; i < M1.rows(); ++i)
            out.col(j).segment(i * M2.rows(), M2.rows()) = M1(i, j) * M2.col(j);
    return out;
}

Vector vec(const Matrix& M) {
    return Eigen::Map<const Vector>(M.data(), M.size());
}

Matrix unvec(const Vector& x, Eigen::Index rows, Eigen::Index cols) {
    require(x.size() == rows * cols, "unvec: length must equal rows*cols");
    return Eigen::Map<const Matrix>(x.data(), rows, cols);
}

Matrix metzler_index_matrix(Eigen::Index n) {
    require(n >= 1, "metzler_index_matrix: n must be >= 1");
    Matrix M = Matrix::Zero(n * (n - 1), n * n);
    Eigen::Index r = 0;
    // vec-scan order: columns j, rows i, skipping the diagonal
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            if (i != j) M(r++, j * n + i) = 1.0;
    return M;
}

bool is_metzler(const Matrix& A, double tol) {
    require(A.rows() == A.cols(), "is_metzler: matrix must be square");
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            if (i != j && A(i, j) < -tol) return false;
    return true;
}

bool is_nonnegative(const Matrix& A, double tol) {
    return (A.array() >= -tol).all();
}

std::vector<std::complex<double>> eigenvalues(const Matrix& A) {
    require(A.rows() == A.cols(), "eigenvalues: matrix must be square");
    require_finite(A, "eigenvalues: A");
    if (A.rows() == 0) return {};
    Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw numerical_error("eigenvalues: QR iteration did not converge");
    std::vector<std::complex<double>> out(A.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i) out[i] = es.eigenvalues()(i);
    return out;
}

double spectral_abscissa(const Matrix& A) {
    double a = -std::numeric_limits<double>::infinity();
    for (const auto& lam : eigenvalues(A)) a = std::max(a, lam.real());
    return a;
}

double spectral_radius(const Matrix& A) {
    double r = 0.0;
    for (const auto& lam : eigenvalues(A)) r = std::max(r, std::abs(lam));
    return r;
}

namespace {

// DLCLF feasibility: v >= eta, A v <= -eta (CT) or (A - I) v <= -eta (DT).
std::optional<Vector> find_dlclf(const Matrix& A, TimeKind tk) {
    const Eigen::Index n = A.rows();
    const double eta = 1e-3;
    Matrix M = (tk == TimeKind::Continuous) ? A : Matrix(A - Matrix::Identity(n, n));
    lp::LpProblem p = lp::LpProblem::make(static_cast<int>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        p.lower[i] = eta;
        p.add_ineq_row(M.row(i).transpose(), -eta);
    }
    auto sol = lp::solve_feasibility(p);
    if (sol.status != lp::LpStatus::Optimal) return std::nullopt;
    return sol.x;
}

}  // namespace

StabilityReport check_positive_stability(const Matrix& A, TimeKind tk) {
    require(A.rows() == A.cols(), "check_positive_stability: matrix must be square");
    StabilityReport r;
    r.is_metzler = is_metzler(A);
    r.is_nonnegative = is_nonnegative(A);
    r.spectral_abscissa = spectral_abscissa(A);
    r.spectral_radius = spectral_radius(A);
    r.is_hurwitz = r.spectral_abscissa < -kHurwitzMargin;
    r.is_schur = r.spectral_radius < 1.0 - kSchurMargin;
    const bool positive = (tk == TimeKind::Continuous) ? r.is_metzler : r.is_nonnegative;
    const bool stable = (tk == TimeKind::Continuous) ? r.is_hurwitz : r.is_schur;
    if (positive && stable) r.dlclf_vector = find_dlclf(A, tk);
    return r;
}

bool principal_minors_positive(const Matrix& A, TimeKind tk) {
    require(A.rows() == A.cols(), "principal_minors_positive: matrix must be square");
    const Eigen::Index n = A.rows();
    Matrix M = (tk == TimeKind::Continuous) ? Matrix(-A)
                                            : Matrix(Matrix::Identity(n, n) - A);
    for (Eigen::Index k = 1; k <= n; ++k)
        if (M.topLeftCorner(k, k).determinant() <= 0.0) return false;
    return true;
}

}  // namespace posdd
