#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "posdd/consistency.hpp"
#include "posdd/types.hpp"

namespace posdd {

enum class Sign { Unrestricted, NonNeg, NonPos, Zero };

/// Per-entry restriction of the gain matrix (and of Y, which shares its sign
/// pattern since X = diag(v) is positive).
struct SignPattern {
    Eigen::Index m = 0, n = 0;
    std::vector<Sign> cells;  // row-major, m x n

    Sign at(Eigen::Index i, Eigen::Index j) const { return cells[i * n + j]; }
    static SignPattern unrestricted(Eigen::Index m, Eigen::Index n);
};

struct SynthesisOptions {
    double eta = 1e-3;        // strict-inequality tolerance
    bool normalize_v = false; // adds the equality 1'v = 1
    std::optional<SignPattern> sign_pattern;
    // Redundancy removal before Farkas assembly when faces > 4*dim.
    bool auto_reduce = true;
    // Certificate verification: vertex enumeration in small dimensions, else
    // seeded plant sampling.
    int verify_samples = 100;
    std::uint64_t verify_seed = 1;
};

enum class SynthStatus { Feasible, Infeasible, NumericalFailure };

struct VerifyReport {
    bool pass = false;
    int vertices_checked = 0;
    int samples_checked = 0;
    double max_violation = 0.0;  // positive means a violated condition
};

struct ControllerResult {
    SynthStatus status = SynthStatus::Infeasible;
    Vector v;
    Matrix K;
    Matrix Y;
    Matrix Z;  // nonnegative Farkas multiplier (empty for nominal designs)
    std::optional<double> gamma;
    int lp_iterations = 0;
    double max_residual = 0.0;  // ||Z G1 - G2||_inf of the returned certificate
    VerifyReport verification;
};

/// Stabilizing-polytope constraints (G2, h2) as affine functions of the
/// unknowns (v, Y): entry = const + dv . v + sum_ij dY_ij Y_ij.
struct StabPolytopeAffine {
    Eigen::Index q = 0;    // rows
    Eigen::Index dim = 0;  // plant-vector coordinates
    Eigen::Index n = 0, m = 0;
    Matrix G2_const;               // q x dim
    std::vector<Matrix> G2_dv;     // n matrices, q x dim
    std::vector<Matrix> G2_dY;     // m*n matrices (row-major over Y), q x dim
    Vector h2_const;               // q
    Matrix h2_dv;                  // q x n
    Matrix h2_dY;                  // q x (m*n), row-major over Y

    Matrix eval_G2(const Vector& v, const Matrix& Y) const;
    Vector eval_h2(const Vector& v, const Matrix& Y) const;
};

/// Rows of the continuous/discrete stabilizing polytope over [a; b]:
/// the DLCLF decrease row block plus the Metzler (q = n + n(n-1)) or
/// nonnegativity (q = n + n^2) block. `omega` scales the a-part for
/// parameter-affine vertex plants; `p2p_rhs_shift` subtracts E 1_e from the
/// top-row right-hand side.
StabPolytopeAffine stab_polytope_rows(Eigen::Index n, Eigen::Index m, TimeKind tk,
                                      double eta,
                                      const Vector* omega = nullptr,
                                      const Vector* p2p_rhs_shift = nullptr);

/// Known extended plant for peak-to-peak design: output z = Cx + Du + F xi,
/// disturbance enters the dynamics through E.
struct ExtendedPlant {
    Matrix C, D, E, F;
    void validate(Eigen::Index n, Eigen::Index m) const;
};

ControllerResult synthesize_stabilizing(const ConsistencySet& cs, const SynthesisOptions& opts);

ControllerResult nominal_stabilize(const Matrix& A, const Matrix& B, TimeKind tk,
                                   const SynthesisOptions& opts);

std::pair<double, ControllerResult> nominal_p2p(const Matrix& A, const Matrix& B,
                                                const ExtendedPlant& ext, TimeKind tk,
                                                const SynthesisOptions& opts,
                                                const std::optional<Matrix>& K_fixed = {});

std::pair<double, ControllerResult> synthesize_p2p(const ConsistencySet& cs,
                                                   const ExtendedPlant& ext,
                                                   const SynthesisOptions& opts);

ControllerResult synthesize_switched_common(const ConsistencySet& cs,
                                            const SynthesisOptions& opts);

/// Per-mode gains sharing one DLCLF vector v; results[s].v is identical across
/// modes.
std::vector<ControllerResult> synthesize_switched_per_mode(const ConsistencySet& cs,
                                                           const SynthesisOptions& opts);

struct LpvaControllerResult {
    SynthStatus status = SynthStatus::Infeasible;
    Vector v;
    std::vector<Matrix> gains;  // one per vertex of Omega
    Matrix Z;
    int lp_iterations = 0;
    VerifyReport verification;
};

LpvaControllerResult synthesize_lpva(const ConsistencySet& cs,
                                     const std::vector<Vector>& omega,
                                     const SynthesisOptions& opts);

/// Vertex-interpolated gain K(theta) = sum_c beta_c K_c with beta the convex
/// coefficients expressing theta over omega. Throws invalid_argument when
/// theta lies outside the hull.
Matrix gain_schedule(const Vector& theta, const std::vector<Vector>& omega,
                     const std::vector<Matrix>& gains);

/// Checks the closed-loop DLCLF conditions (A+BK)v <= -eta/2 (continuous) or
/// (A+BK)v <= v - eta/2 (discrete) plus Metzler/nonnegativity of A+BK, over a
/// list of plants.
VerifyReport verify_controller(const std::vector<std::pair<Matrix, Matrix>>& plants,
                               const Vector& v, const Matrix& K, TimeKind tk, double eta);

}  // namespace posdd
