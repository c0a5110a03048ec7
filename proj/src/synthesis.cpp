#include "posdd/synthesis.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>

#include "posdd/linalg.hpp"
#include "posdd/lp.hpp"

namespace posdd {

SignPattern SignPattern::unrestricted(Eigen::Index m, Eigen::Index n) {
    SignPattern s;
    s.m = m;
    s.n = n;
    s.cells.assign(static_cast<std::size_t>(m * n), Sign::Unrestricted);
    return s;
}

void ExtendedPlant::validate(Eigen::Index n, Eigen::Index m) const {
    require(C.cols() == n && D.rows() == C.rows() && D.cols() == m,
            "ExtendedPlant: C/D dimension mismatch");
    require(E.rows() == n && F.rows() == C.rows() && F.cols() == E.cols(),
            "ExtendedPlant: E/F dimension mismatch");
}

Matrix StabPolytopeAffine::eval_G2(const Vector& v, const Matrix& Y) const {
    Matrix G = G2_const;
    for (Eigen::Index j = 0; j < n; ++j) G += v(j) * G2_dv[static_cast<std::size_t>(j)];
    for (Eigen::Index k = 0; k < m; ++k)
        for (Eigen::Index j = 0; j < n; ++j)
            G += Y(k, j) * G2_dY[static_cast<std::size_t>(k * n + j)];
    return G;
}

Vector StabPolytopeAffine::eval_h2(const Vector& v, const Matrix& Y) const {
    Vector h = h2_const + h2_dv * v;
    for (Eigen::Index k = 0; k < m; ++k)
        for (Eigen::Index j = 0; j < n; ++j) h += h2_dY.col(k * n + j) * Y(k, j);
    return h;
}

namespace {

// Generalized affine stabilizing block over a global parameter vector:
// G2 = G2_const + sum_p params[p] * G2_dp[p], likewise h2. Coordinates cover
// [a-blocks; b] starting at a_col0/b_col0 inside a dim_total-wide layout.
struct AffineBlock {
    Eigen::Index q = 0, dim = 0;
    Matrix G2_const;
    std::vector<Matrix> G2_dp;  // one per global parameter
    Vector h2_const;
    Matrix h2_dp;  // q x n_params
};

// v_idx[j]: global parameter index of v_j. y_idx[k*n+j]: parameter index of
// Y_{kj}, or -1 when the entry is pinned to zero (sign-pattern elimination).
AffineBlock build_affine_block(Eigen::Index n, Eigen::Index m, TimeKind tk, double eta,
                               const std::vector<int>& v_idx, const std::vector<int>& y_idx,
                               int n_params, Eigen::Index dim_total, Eigen::Index a_col0,
                               Eigen::Index b_col0, const Vector* omega,
                               const Vector* p2p_shift) {
    const Eigen::Index L = omega ? omega->size() : 1;
    const Eigen::Index q =
        (tk == TimeKind::Continuous) ? n + n * (n - 1) : n + n * n;
    AffineBlock blk;
    blk.q = q;
    blk.dim = dim_total;
    blk.G2_const = Matrix::Zero(q, dim_total);
    blk.G2_dp.assign(static_cast<std::size_t>(n_params), Matrix::Zero(q, dim_total));
    blk.h2_const = Vector::Zero(q);
    blk.h2_dp = Matrix::Zero(q, n_params);

    auto omega_l = [&](Eigen::Index l) { return omega ? (*omega)(l) : 1.0; };

    // DLCLF decrease rows
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index l = 0; l < L; ++l)
            for (Eigen::Index j = 0; j < n; ++j)
                blk.G2_dp[static_cast<std::size_t>(v_idx[static_cast<std::size_t>(j)])](
                    i, a_col0 + l * n * n + j * n + i) += omega_l(l);
        for (Eigen::Index k = 0; k < m; ++k)
            for (Eigen::Index j = 0; j < n; ++j) {
                const int p = y_idx[static_cast<std::size_t>(k * n + j)];
                if (p >= 0)
                    blk.G2_dp[static_cast<std::size_t>(p)](i, b_col0 + k * n + i) += 1.0;
            }
        blk.h2_const(i) = -eta - (p2p_shift ? (*p2p_shift)(i) : 0.0);
        if (tk == TimeKind::Discrete) blk.h2_dp(i, v_idx[static_cast<std::size_t>(i)]) += 1.0;
    }

    // positivity rows of AX + BY (Metzler off-diagonals in continuous time,
    // full nonnegativity in discrete time), in vec-scan order
    Eigen::Index r = n;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            if (tk == TimeKind::Continuous && i == j) continue;
            for (Eigen::Index l = 0; l < L; ++l)
                blk.G2_dp[static_cast<std::size_t>(v_idx[static_cast<std::size_t>(j)])](
                    r, a_col0 + l * n * n + j * n + i) -= omega_l(l);
            for (Eigen::Index k = 0; k < m; ++k) {
                const int p = y_idx[static_cast<std::size_t>(k * n + j)];
                if (p >= 0)
                    blk.G2_dp[static_cast<std::size_t>(p)](r, b_col0 + k * n + i) -= 1.0;
            }
            ++r;
        }
    return blk;
}

std::vector<int> iota_vec(int start, int count) {
    std::vector<int> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = start + i;
    return v;
}

}  // namespace

StabPolytopeAffine stab_polytope_rows(Eigen::Index n, Eigen::Index m, TimeKind tk, double eta,
                                      const Vector* omega, const Vector* p2p_rhs_shift) {
    const Eigen::Index L = omega ? omega->size() : 1;
    const Eigen::Index dim = n * (L * n + m);
    const int n_params = static_cast<int>(n + m * n);
    AffineBlock blk = build_affine_block(n, m, tk, eta, iota_vec(0, static_cast<int>(n)),
                                         iota_vec(static_cast<int>(n), static_cast<int>(m * n)),
                                         n_params, dim, 0, L * n * n, omega, p2p_rhs_shift);
    StabPolytopeAffine out;
    out.q = blk.q;
    out.dim = dim;
    out.n = n;
    out.m = m;
    out.G2_const = blk.G2_const;
    out.h2_const = blk.h2_const;
    out.G2_dv.assign(blk.G2_dp.begin(), blk.G2_dp.begin() + n);
    out.G2_dY.assign(blk.G2_dp.begin() + n, blk.G2_dp.end());
    out.h2_dv = blk.h2_dp.leftCols(n);
    out.h2_dY = blk.h2_dp.rightCols(m * n);
    return out;
}

namespace {

struct FarkasPiece {
    Polytope P1;       // consistency faces for this piece
    AffineBlock stab;  // matching affine stabilizing rows (same dim as P1)
};

struct Assembled {
    lp::LpProblem p;
    int n_params = 0;
    std::vector<int> z_offset;  // variable offset of each piece's Z block
    std::vector<std::pair<int, int>> z_shape;
};

// Farkas containment LP over [params; Z_1; Z_2; ...]:
//   for each piece: Z G1 - G2(params) = 0,  Z h1 - h2(params) <= 0,  Z >= 0.
Assembled assemble_farkas(const std::vector<FarkasPiece>& pieces, int n_params,
                          const std::vector<double>& p_lo, const std::vector<double>& p_hi) {
    int n_vars = n_params;
    std::vector<int> z_off;
    std::vector<std::pair<int, int>> z_shape;
    for (const auto& pc : pieces) {
        z_off.push_back(n_vars);
        z_shape.push_back({static_cast<int>(pc.stab.q), static_cast<int>(pc.P1.faces())});
        n_vars += static_cast<int>(pc.stab.q * pc.P1.faces());
    }
    Eigen::Index eq_rows = 0, ineq_rows = 0;
    for (const auto& pc : pieces) {
        eq_rows += pc.stab.q * pc.stab.dim;
        ineq_rows += pc.stab.q;
    }

    Assembled out;
    out.n_params = n_params;
    out.z_offset = z_off;
    out.z_shape = z_shape;
    auto& p = out.p;
    p = lp::LpProblem::make(n_vars);
    for (int i = 0; i < n_params; ++i) {
        p.lower[static_cast<std::size_t>(i)] = p_lo[static_cast<std::size_t>(i)];
        p.upper[static_cast<std::size_t>(i)] = p_hi[static_cast<std::size_t>(i)];
    }
    for (int i = n_params; i < n_vars; ++i) p.lower[static_cast<std::size_t>(i)] = 0.0;

    p.eq_lhs = Matrix::Zero(eq_rows, n_vars);
    p.eq_rhs = Vector::Zero(eq_rows);
    p.ineq_lhs = Matrix::Zero(ineq_rows, n_vars);
    p.ineq_rhs = Vector::Zero(ineq_rows);

    Eigen::Index er = 0, ir = 0;
    for (std::size_t b = 0; b < pieces.size(); ++b) {
        const auto& pc = pieces[b];
        const auto f = pc.P1.faces();
        const int zo = z_off[b];
        for (Eigen::Index r = 0; r < pc.stab.q; ++r) {
            for (Eigen::Index c = 0; c < pc.stab.dim; ++c) {
                for (Eigen::Index ff = 0; ff < f; ++ff)
                    p.eq_lhs(er, zo + r * f + ff) = pc.P1.G(ff, c);
                for (int q = 0; q < n_params; ++q)
                    p.eq_lhs(er, q) = -pc.stab.G2_dp[static_cast<std::size_t>(q)](r, c);
                p.eq_rhs(er) = pc.stab.G2_const(r, c);
                ++er;
            }
            for (Eigen::Index ff = 0; ff < f; ++ff)
                p.ineq_lhs(ir, zo + r * f + ff) = pc.P1.h(ff);
            for (int q = 0; q < n_params; ++q) p.ineq_lhs(ir, q) = -pc.stab.h2_dp(r, q);
            p.ineq_rhs(ir) = pc.stab.h2_const(r);
            ++ir;
        }
    }
    return out;
}

void set_y_bounds(std::vector<double>& lo, std::vector<double>& hi,
                  const std::vector<int>& y_idx, Eigen::Index m, Eigen::Index n,
                  const std::optional<SignPattern>& sp) {
    for (Eigen::Index k = 0; k < m; ++k)
        for (Eigen::Index j = 0; j < n; ++j) {
            const int p = y_idx[static_cast<std::size_t>(k * n + j)];
            if (p < 0) continue;
            Sign s = sp ? sp->at(k, j) : Sign::Unrestricted;
            if (s == Sign::NonNeg) lo[static_cast<std::size_t>(p)] = 0.0;
            if (s == Sign::NonPos) hi[static_cast<std::size_t>(p)] = 0.0;
        }
}

// Y-parameter index map under a sign pattern; Zero entries are eliminated.
std::vector<int> make_y_index(Eigen::Index m, Eigen::Index n,
                              const std::optional<SignPattern>& sp, int& next) {
    std::vector<int> idx(static_cast<std::size_t>(m * n), -1);
    for (Eigen::Index k = 0; k < m; ++k)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (sp && sp->at(k, j) == Sign::Zero) continue;
            idx[static_cast<std::size_t>(k * n + j)] = next++;
        }
    return idx;
}

Matrix gather_Y(const Vector& x, const std::vector<int>& y_idx, Eigen::Index m,
                Eigen::Index n) {
    Matrix Y = Matrix::Zero(m, n);
    for (Eigen::Index k = 0; k < m; ++k)
        for (Eigen::Index j = 0; j < n; ++j) {
            const int p = y_idx[static_cast<std::size_t>(k * n + j)];
            if (p >= 0) Y(k, j) = x(p);
        }
    return Y;
}

Matrix recover_K(const Matrix& Y, const Vector& v) {
    return Y * v.cwiseInverse().asDiagonal();
}

Matrix gather_Z(const Vector& x, int offset, int q, int f) {
    Matrix Z(q, f);
    for (int r = 0; r < q; ++r)
        for (int c = 0; c < f; ++c) Z(r, c) = x(offset + r * f + c);
    return Z;
}

double farkas_residual(const FarkasPiece& pc, const Matrix& Z, const Vector& params) {
    Matrix G2 = pc.stab.G2_const;
    for (std::size_t q = 0; q < pc.stab.G2_dp.size(); ++q)
        G2 += params(static_cast<Eigen::Index>(q)) * pc.stab.G2_dp[q];
    return (Z * pc.P1.G - G2).cwiseAbs().maxCoeff();
}

Polytope maybe_reduce(const Polytope& P, bool auto_reduce) {
    if (!auto_reduce || P.faces() <= 4 * P.dim()) return P;
    return remove_redundant_faces(P).first;
}

// Plants used for certificate verification: polytope vertices in small
// dimension, hit-and-run samples otherwise (Chebyshev center fallback for
// degenerate sets).
std::vector<Vector> verification_points(const Polytope& P, int samples, std::uint64_t seed,
                                        bool& used_vertices) {
    used_vertices = false;
    if (P.dim() <= kVertexEnumMaxDim) {
        try {
            auto verts = enumerate_vertices(P);
            if (!verts.empty()) {
                used_vertices = true;
                return verts;
            }
        } catch (const std::exception&) {
        }
    }
    try {
        return sample_interior(P, samples, seed);
    } catch (const std::exception&) {
        return {chebyshev_center(P).center};
    }
}

double closed_loop_violation(const Matrix& A, const Matrix& B, const Matrix& K,
                             const Vector& v, TimeKind tk, double eta_check) {
    const Matrix Acl = A + B * K;
    const Vector decrease = Acl * v;
    double viol = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double bound = (tk == TimeKind::Continuous) ? -eta_check : v(i) - eta_check;
        viol = std::max(viol, decrease(i) - bound);
    }
    for (Eigen::Index i = 0; i < Acl.rows(); ++i)
        for (Eigen::Index j = 0; j < Acl.cols(); ++j) {
            if (tk == TimeKind::Continuous && i == j) continue;
            viol = std::max(viol, -Acl(i, j) - 1e-9);
        }
    return viol;
}

SynthStatus status_from_lp(lp::LpStatus s) {
    switch (s) {
        case lp::LpStatus::Optimal: return SynthStatus::Feasible;
        case lp::LpStatus::Infeasible: return SynthStatus::Infeasible;
        default: return SynthStatus::NumericalFailure;
    }
}

}  // namespace

VerifyReport verify_controller(const std::vector<std::pair<Matrix, Matrix>>& plants,
                               const Vector& v, const Matrix& K, TimeKind tk, double eta) {
    require((v.array() > 0).all(), "verify_controller: v must be positive");
    VerifyReport rep;
    rep.pass = true;
    for (const auto& [A, B] : plants) {
        const double viol = closed_loop_violation(A, B, K, v, tk, eta / 2.0);
        rep.max_violation = std::max(rep.max_violation, viol);
        if (viol > 0) rep.pass = false;
        ++rep.samples_checked;
    }
    return rep;
}

namespace {

// Shared solve-and-recover path for single-consistency-set syntheses
// (stabilization and p2p differ only in rhs shift, extra rows and objective).
ControllerResult run_single_synthesis(const ConsistencySet& cs, const SynthesisOptions& opts,
                                      const ExtendedPlant* ext) {
    require(cs.is_single(), "synthesis: consistency set is not single-variant");
    const Eigen::Index n = cs.n, m = cs.m;
    if (opts.sign_pattern)
        require(opts.sign_pattern->m == m && opts.sign_pattern->n == n,
                "synthesis: sign pattern dimensions mismatch");
    ControllerResult res;

    int n_params = static_cast<int>(n);  // v first
    const std::vector<int> v_idx = iota_vec(0, static_cast<int>(n));
    const std::vector<int> y_idx = make_y_index(m, n, opts.sign_pattern, n_params);
    const int gamma_idx = ext ? n_params++ : -1;

    std::vector<double> lo(static_cast<std::size_t>(n_params), -lp::kInf);
    std::vector<double> hi(static_cast<std::size_t>(n_params), lp::kInf);
    for (Eigen::Index i = 0; i < n; ++i) lo[static_cast<std::size_t>(i)] = opts.eta;
    set_y_bounds(lo, hi, y_idx, m, n, opts.sign_pattern);
    if (ext) lo[static_cast<std::size_t>(gamma_idx)] = 0.0;

    std::optional<Vector> p2p_shift;
    if (ext) p2p_shift = Vector(ext->E * Vector::Ones(ext->E.cols()));

    FarkasPiece piece;
    piece.P1 = maybe_reduce(cs.polytope, opts.auto_reduce);
    piece.stab = build_affine_block(n, m, cs.time_kind, opts.eta, v_idx, y_idx, n_params,
                                    cs.polytope.dim(), 0, n * n, nullptr,
                                    ext ? &*p2p_shift : nullptr);

    Assembled asm_ = assemble_farkas({piece}, n_params, lo, hi);
    if (opts.normalize_v) {
        Vector row = Vector::Zero(asm_.p.n_vars);
        row.head(n).setOnes();
        asm_.p.add_eq_row(row, 1.0);
    }
    if (ext) {
        // output rows (gamma - eta) 1 - (C v + D Y 1) - F 1 >= 0 and CX + DY >= 0
        const Eigen::Index pdim = ext->C.rows();
        const Vector F1 = ext->F * Vector::Ones(ext->F.cols());
        for (Eigen::Index i = 0; i < pdim; ++i) {
            Vector row = Vector::Zero(asm_.p.n_vars);
            for (Eigen::Index j = 0; j < n; ++j) row(j) += ext->C(i, j);
            for (Eigen::Index k = 0; k < m; ++k)
                for (Eigen::Index j = 0; j < n; ++j) {
                    const int q = y_idx[static_cast<std::size_t>(k * n + j)];
                    if (q >= 0) row(q) += ext->D(i, k);
                }
            row(gamma_idx) = -1.0;
            asm_.p.add_ineq_row(row, -opts.eta - F1(i));
        }
        for (Eigen::Index i = 0; i < pdim; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                Vector row = Vector::Zero(asm_.p.n_vars);
                row(j) -= ext->C(i, j);
                for (Eigen::Index k = 0; k < m; ++k) {
                    const int q = y_idx[static_cast<std::size_t>(k * n + j)];
                    if (q >= 0) row(q) -= ext->D(i, k);
                }
                asm_.p.add_ineq_row(row, 0.0);
            }
        asm_.p.objective = Vector::Zero(asm_.p.n_vars);
        asm_.p.objective(gamma_idx) = 1.0;
    }

    lp::LpSolution sol;
    try {
        sol = ext ? lp::solve(asm_.p) : lp::solve_feasibility(asm_.p);
    } catch (const numerical_error& e) {
        if (std::getenv("POSDD_DEBUG")) std::fprintf(stderr, "numerical: %s\n", e.what());
        res.status = SynthStatus::NumericalFailure;
        return res;
    }
    res.status = status_from_lp(sol.status);
    res.lp_iterations = sol.iterations;
    if (res.status != SynthStatus::Feasible) return res;

    res.v = sol.x.head(n);
    res.Y = gather_Y(sol.x, y_idx, m, n);
    res.K = recover_K(res.Y, res.v);
    res.Z = gather_Z(sol.x, asm_.z_offset[0], asm_.z_shape[0].first, asm_.z_shape[0].second);
    res.max_residual = farkas_residual(piece, res.Z, sol.x.head(n_params));
    if (ext) res.gamma = sol.x(gamma_idx);

    // certificate check against vertices or sampled consistent plants
    bool used_vertices = false;
    auto points =
        verification_points(piece.P1, opts.verify_samples, opts.verify_seed, used_vertices);
    std::vector<std::pair<Matrix, Matrix>> plants;
    for (const auto& pt : points) {
        Matrix A, B;
        unpack_plant(pt, n, m, A, B);
        plants.push_back({A, B});
    }
    res.verification = verify_controller(plants, res.v, res.K, cs.time_kind, opts.eta);
    if (used_vertices) {
        res.verification.vertices_checked = res.verification.samples_checked;
        res.verification.samples_checked = 0;
    }

    // continuous-time certificates are homogeneous in (v, Y, Z); display at
    // unit scale 1'v = 1
    if (!opts.normalize_v && cs.time_kind == TimeKind::Continuous) {
        const double alpha = 1.0 / res.v.sum();
        res.v *= alpha;
        res.Y *= alpha;
        res.Z *= alpha;
        res.max_residual *= alpha;
        res.verification.max_violation *= alpha;
    }
    return res;
}

}  // namespace

ControllerResult synthesize_stabilizing(const ConsistencySet& cs, const SynthesisOptions& opts) {
    return run_single_synthesis(cs, opts, nullptr);
}

std::pair<double, ControllerResult> synthesize_p2p(const ConsistencySet& cs,
                                                   const ExtendedPlant& ext,
                                                   const SynthesisOptions& opts) {
    ext.validate(cs.n, cs.m);
    SynthesisOptions o = opts;
    o.normalize_v = false;  // gamma fixes the scale in the p2p program
    ControllerResult res = run_single_synthesis(cs, o, &ext);
    // p2p solutions are not rescaled: v carries the gain certificate scale
    return {res.gamma.value_or(std::numeric_limits<double>::quiet_NaN()), res};
}

namespace {

// Nominal (known-plant) designs share one assembly: LP over (v, Y[, gamma]).
ControllerResult nominal_design(const Matrix& A, const Matrix& B, TimeKind tk,
                                const SynthesisOptions& opts, const ExtendedPlant* ext,
                                double* gamma_out) {
    require(A.rows() == A.cols(), "nominal design: A must be square");
    require(B.rows() == A.rows(), "nominal design: B row count mismatch");
    const Eigen::Index n = A.rows(), m = B.cols();
    if (opts.sign_pattern)
        require(opts.sign_pattern->m == m && opts.sign_pattern->n == n,
                "nominal design: sign pattern dimensions mismatch");

    int n_params = static_cast<int>(n);
    const std::vector<int> y_idx = make_y_index(m, n, opts.sign_pattern, n_params);
    const int gamma_idx = ext ? n_params++ : -1;

    lp::LpProblem p = lp::LpProblem::make(n_params);
    for (Eigen::Index i = 0; i < n; ++i) p.lower[static_cast<std::size_t>(i)] = opts.eta;
    set_y_bounds(p.lower, p.upper, y_idx, m, n, opts.sign_pattern);
    if (ext) p.lower[static_cast<std::size_t>(gamma_idx)] = 0.0;

    const Vector E1 = ext ? Vector(ext->E * Vector::Ones(ext->E.cols()))
                          : Vector(Vector::Zero(n));
    // DLCLF decrease rows: (A X + B Y) 1 <= -eta - E1 (continuous) or
    // <= v - eta - E1 (discrete)
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector row = Vector::Zero(n_params);
        for (Eigen::Index j = 0; j < n; ++j) row(j) += A(i, j);
        if (tk == TimeKind::Discrete) row(i) -= 1.0;
        for (Eigen::Index k = 0; k < m; ++k)
            for (Eigen::Index j = 0; j < n; ++j) {
                const int q = y_idx[static_cast<std::size_t>(k * n + j)];
                if (q >= 0) row(q) += B(i, k);
            }
        p.add_ineq_row(row, -opts.eta - E1(i));
    }
    // positivity of AX + BY
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (tk == TimeKind::Continuous && i == j) continue;
            Vector row = Vector::Zero(n_params);
            row(j) -= A(i, j);
            for (Eigen::Index k = 0; k < m; ++k) {
                const int q = y_idx[static_cast<std::size_t>(k * n + j)];
                if (q >= 0) row(q) -= B(i, k);
            }
            p.add_ineq_row(row, 0.0);
        }
    if (ext) {
        const Eigen::Index pdim = ext->C.rows();
        const Vector F1 = ext->F * Vector::Ones(ext->F.cols());
        for (Eigen::Index i = 0; i < pdim; ++i) {
            Vector row = Vector::Zero(n_params);
            for (Eigen::Index j = 0; j < n; ++j) row(j) += ext->C(i, j);
            for (Eigen::Index k = 0; k < m; ++k)
                for (Eigen::Index j = 0; j < n; ++j) {
                    const int q = y_idx[static_cast<std::size_t>(k * n + j)];
                    if (q >= 0) row(q) += ext->D(i, k);
                }
            row(gamma_idx) = -1.0;
            p.add_ineq_row(row, -opts.eta - F1(i));
        }
        for (Eigen::Index i = 0; i < pdim; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                Vector row = Vector::Zero(n_params);
                row(j) -= ext->C(i, j);
                for (Eigen::Index k = 0; k < m; ++k) {
                    const int q = y_idx[static_cast<std::size_t>(k * n + j)];
                    if (q >= 0) row(q) -= ext->D(i, k);
                }
                p.add_ineq_row(row, 0.0);
            }
        p.objective = Vector::Zero(n_params);
        p.objective(gamma_idx) = 1.0;
    }
    if (opts.normalize_v) {
        Vector row = Vector::Zero(n_params);
        row.head(n).setOnes();
        p.add_eq_row(row, 1.0);
    }

    ControllerResult res;
    lp::LpSolution sol;
    try {
        sol = ext ? lp::solve(p) : lp::solve_feasibility(p);
    } catch (const numerical_error& e) {
        if (std::getenv("POSDD_DEBUG")) std::fprintf(stderr, "numerical: %s\n", e.what());
        res.status = SynthStatus::NumericalFailure;
        return res;
    }
    res.status = status_from_lp(sol.status);
    res.lp_iterations = sol.iterations;
    if (res.status != SynthStatus::Feasible) return res;
    res.v = sol.x.head(n);
    res.Y = gather_Y(sol.x, y_idx, m, n);
    res.K = recover_K(res.Y, res.v);
    if (ext) {
        res.gamma = sol.x(gamma_idx);
        if (gamma_out) *gamma_out = *res.gamma;
    }
    res.verification = verify_controller({{A, B}}, res.v, res.K, tk, opts.eta);
    if (!ext && !opts.normalize_v && tk == TimeKind::Continuous) {
        const double alpha = 1.0 / res.v.sum();
        res.v *= alpha;
        res.Y *= alpha;
        res.verification.max_violation *= alpha;
    }
    return res;
}

}  // namespace

ControllerResult nominal_stabilize(const Matrix& A, const Matrix& B, TimeKind tk,
                                   const SynthesisOptions& opts) {
    return nominal_design(A, B, tk, opts, nullptr, nullptr);
}

std::pair<double, ControllerResult> nominal_p2p(const Matrix& A, const Matrix& B,
                                                const ExtendedPlant& ext, TimeKind tk,
                                                const SynthesisOptions& opts,
                                                const std::optional<Matrix>& K_fixed) {
    ext.validate(A.rows(), B.cols());
    double gamma = std::numeric_limits<double>::quiet_NaN();
    if (!K_fixed) {
        ControllerResult res = nominal_design(A, B, tk, opts, &ext, &gamma);
        return {gamma, res};
    }
    // Y is eliminated: fold K into the plant (AX + BY = (A + B K) X) and pin
    // the remaining Y variables to zero.
    require(K_fixed->rows() == B.cols() && K_fixed->cols() == A.rows(),
            "nominal_p2p: K_fixed dimension mismatch");
    const Matrix Acl = A + B * (*K_fixed);
    ExtendedPlant ext_cl = ext;
    ext_cl.C = ext.C + ext.D * (*K_fixed);
    SynthesisOptions o = opts;
    SignPattern zero;
    zero.m = B.cols();
    zero.n = A.rows();
    zero.cells.assign(static_cast<std::size_t>(zero.m * zero.n), Sign::Zero);
    o.sign_pattern = zero;
    ControllerResult res = nominal_design(Acl, B, tk, o, &ext_cl, &gamma);
    if (res.status == SynthStatus::Feasible) {
        res.K = *K_fixed;
        res.Y = *K_fixed * res.v.asDiagonal();
        res.verification = verify_controller({{A, B}}, res.v, res.K, tk, opts.eta);
    }
    return {gamma, res};
}

namespace {

// Switched synthesis: one Farkas piece per mode on its own coordinate block,
// sharing v and either one Y (common controller) or per-mode Y_s.
std::vector<ControllerResult> run_switched(const ConsistencySet& cs,
                                           const SynthesisOptions& opts, bool common) {
    require(cs.is_switched(), "switched synthesis: consistency set is not switched");
    const auto& sv = std::get<SwitchedVariant>(cs.variant);
    const Eigen::Index n = cs.n;
    if (common)
        for (int ms : sv.m_s)
            require(ms == sv.m_s[0],
                    "switched common-controller synthesis requires equal input counts "
                    "across modes");

    int n_params = static_cast<int>(n);
    const std::vector<int> v_idx = iota_vec(0, static_cast<int>(n));
    std::vector<std::vector<int>> y_idx_per_mode;
    for (int s = 0; s < sv.n_modes; ++s) {
        if (common && s > 0) {
            y_idx_per_mode.push_back(y_idx_per_mode[0]);
            continue;
        }
        y_idx_per_mode.push_back(
            make_y_index(sv.m_s[static_cast<std::size_t>(s)], n, opts.sign_pattern, n_params));
    }

    std::vector<double> lo(static_cast<std::size_t>(n_params), -lp::kInf);
    std::vector<double> hi(static_cast<std::size_t>(n_params), lp::kInf);
    for (Eigen::Index i = 0; i < n; ++i) lo[static_cast<std::size_t>(i)] = opts.eta;
    for (int s = 0; s < sv.n_modes; ++s)
        set_y_bounds(lo, hi, y_idx_per_mode[static_cast<std::size_t>(s)],
                     sv.m_s[static_cast<std::size_t>(s)], n, opts.sign_pattern);

    // each mode's piece lives on its own coordinate block of the stacked layout
    std::vector<FarkasPiece> pieces;
    std::vector<Polytope> mode_polys;
    Eigen::Index col0 = 0;
    for (int s = 0; s < sv.n_modes; ++s) {
        const Eigen::Index ms = sv.m_s[static_cast<std::size_t>(s)];
        const Eigen::Index block = n * (n + ms);
        // extract the mode's faces (rows touching only this block)
        std::vector<Eigen::Index> rows;
        for (Eigen::Index r = 0; r < cs.polytope.faces(); ++r) {
            bool in_block = false, outside = false;
            for (Eigen::Index c = 0; c < cs.polytope.dim(); ++c) {
                if (cs.polytope.G(r, c) == 0.0) continue;
                if (c >= col0 && c < col0 + block)
                    in_block = true;
                else
                    outside = true;
            }
            if (in_block && !outside) rows.push_back(r);
        }
        Polytope Ps;
        Ps.G.resize(static_cast<Eigen::Index>(rows.size()), block);
        Ps.h.resize(static_cast<Eigen::Index>(rows.size()));
        for (Eigen::Index k = 0; k < Ps.faces(); ++k) {
            Ps.G.row(k) = cs.polytope.G.row(rows[static_cast<std::size_t>(k)])
                              .segment(col0, block);
            Ps.h(k) = cs.polytope.h(rows[static_cast<std::size_t>(k)]);
        }
        mode_polys.push_back(Ps);
        FarkasPiece pc;
        pc.P1 = maybe_reduce(Ps, opts.auto_reduce);
        pc.stab = build_affine_block(n, ms, cs.time_kind, opts.eta, v_idx,
                                     y_idx_per_mode[static_cast<std::size_t>(s)], n_params,
                                     block, 0, n * n, nullptr, nullptr);
        pieces.push_back(std::move(pc));
        col0 += block;
    }

    Assembled asm_ = assemble_farkas(pieces, n_params, lo, hi);
    if (opts.normalize_v) {
        Vector row = Vector::Zero(asm_.p.n_vars);
        row.head(n).setOnes();
        asm_.p.add_eq_row(row, 1.0);
    }

    std::vector<ControllerResult> out(static_cast<std::size_t>(sv.n_modes));
    lp::LpSolution sol;
    try {
        sol = lp::solve_feasibility(asm_.p);
    } catch (const numerical_error& e) {
        if (std::getenv("POSDD_DEBUG")) std::fprintf(stderr, "numerical: %s\n", e.what());
        for (auto& r : out) r.status = SynthStatus::NumericalFailure;
        return out;
    }
    const SynthStatus st = status_from_lp(sol.status);
    for (auto& r : out) {
        r.status = st;
        r.lp_iterations = sol.iterations;
    }
    if (st != SynthStatus::Feasible) return out;

    Vector v = sol.x.head(n);
    double alpha = 1.0;
    if (!opts.normalize_v && cs.time_kind == TimeKind::Continuous) alpha = 1.0 / v.sum();

    for (int s = 0; s < sv.n_modes; ++s) {
        auto& r = out[static_cast<std::size_t>(s)];
        r.v = alpha * v;
        r.Y = alpha * gather_Y(sol.x, y_idx_per_mode[static_cast<std::size_t>(s)],
                               sv.m_s[static_cast<std::size_t>(s)], n);
        r.K = recover_K(r.Y, r.v);
        r.Z = alpha * gather_Z(sol.x, asm_.z_offset[static_cast<std::size_t>(s)],
                               asm_.z_shape[static_cast<std::size_t>(s)].first,
                               asm_.z_shape[static_cast<std::size_t>(s)].second);
        r.max_residual =
            farkas_residual(pieces[static_cast<std::size_t>(s)], r.Z / alpha,
                            sol.x.head(n_params)) * alpha;

        bool used_vertices = false;
        auto points = verification_points(pieces[static_cast<std::size_t>(s)].P1,
                                          opts.verify_samples,
                                          opts.verify_seed + static_cast<std::uint64_t>(s),
                                          used_vertices);
        std::vector<std::pair<Matrix, Matrix>> plants;
        for (const auto& pt : points) {
            Matrix A, B;
            unpack_plant(pt, n, sv.m_s[static_cast<std::size_t>(s)], A, B);
            plants.push_back({A, B});
        }
        r.verification = verify_controller(plants, v, r.K, cs.time_kind, opts.eta);
        r.verification.max_violation *= alpha;
        if (used_vertices) {
            r.verification.vertices_checked = r.verification.samples_checked;
            r.verification.samples_checked = 0;
        }
    }
    return out;
}

}  // namespace

ControllerResult synthesize_switched_common(const ConsistencySet& cs,
                                            const SynthesisOptions& opts) {
    auto results = run_switched(cs, opts, /*common=*/true);
    // all modes share (v, Y, K); fold verification into one result
    ControllerResult res = results[0];
    for (std::size_t s = 1; s < results.size(); ++s) {
        const auto& r = results[s];
        res.verification.pass = res.verification.pass && r.verification.pass;
        res.verification.max_violation =
            std::max(res.verification.max_violation, r.verification.max_violation);
        res.verification.vertices_checked += r.verification.vertices_checked;
        res.verification.samples_checked += r.verification.samples_checked;
    }
    return res;
}

std::vector<ControllerResult> synthesize_switched_per_mode(const ConsistencySet& cs,
                                                           const SynthesisOptions& opts) {
    return run_switched(cs, opts, /*common=*/false);
}

LpvaControllerResult synthesize_lpva(const ConsistencySet& cs,
                                     const std::vector<Vector>& omega,
                                     const SynthesisOptions& opts) {
    require(cs.is_lpva(), "synthesize_lpva: consistency set is not LPVA");
    require(!omega.empty(), "synthesize_lpva: at least one vertex required");
    const auto& lv = std::get<LpvaVariant>(cs.variant);
    const Eigen::Index n = cs.n, m = cs.m;
    const int L = lv.L;
    for (const auto& w : omega)
        require(w.size() == L, "synthesize_lpva: vertex dimension must equal L");
    const auto Nc = omega.size();

    int n_params = static_cast<int>(n);
    const std::vector<int> v_idx = iota_vec(0, static_cast<int>(n));
    std::vector<std::vector<int>> y_idx_per_vertex;
    for (std::size_t c = 0; c < Nc; ++c)
        y_idx_per_vertex.push_back(make_y_index(m, n, opts.sign_pattern, n_params));

    std::vector<double> lo(static_cast<std::size_t>(n_params), -lp::kInf);
    std::vector<double> hi(static_cast<std::size_t>(n_params), lp::kInf);
    for (Eigen::Index i = 0; i < n; ++i) lo[static_cast<std::size_t>(i)] = opts.eta;
    for (std::size_t c = 0; c < Nc; ++c)
        set_y_bounds(lo, hi, y_idx_per_vertex[c], m, n, opts.sign_pattern);

    // one piece per vertex, all against the same consistency polytope
    const Polytope P1 = maybe_reduce(cs.polytope, opts.auto_reduce);
    std::vector<FarkasPiece> pieces;
    for (std::size_t c = 0; c < Nc; ++c) {
        FarkasPiece pc;
        pc.P1 = P1;
        pc.stab = build_affine_block(n, m, cs.time_kind, opts.eta, v_idx, y_idx_per_vertex[c],
                                     n_params, cs.polytope.dim(), 0,
                                     static_cast<Eigen::Index>(L) * n * n, &omega[c], nullptr);
        pieces.push_back(std::move(pc));
    }

    Assembled asm_ = assemble_farkas(pieces, n_params, lo, hi);
    if (opts.normalize_v) {
        Vector row = Vector::Zero(asm_.p.n_vars);
        row.head(n).setOnes();
        asm_.p.add_eq_row(row, 1.0);
    }

    LpvaControllerResult res;
    lp::LpSolution sol;
    try {
        sol = lp::solve_feasibility(asm_.p);
    } catch (const numerical_error& e) {
        if (std::getenv("POSDD_DEBUG")) std::fprintf(stderr, "numerical: %s\n", e.what());
        res.status = SynthStatus::NumericalFailure;
        return res;
    }
    res.status = status_from_lp(sol.status);
    res.lp_iterations = sol.iterations;
    if (res.status != SynthStatus::Feasible) return res;

    Vector v = sol.x.head(n);
    double alpha = 1.0;
    if (!opts.normalize_v && cs.time_kind == TimeKind::Continuous) alpha = 1.0 / v.sum();
    res.v = alpha * v;
    for (std::size_t c = 0; c < Nc; ++c) {
        const Matrix Y = gather_Y(sol.x, y_idx_per_vertex[c], m, n);
        res.gains.push_back(recover_K(Y, v));
    }
    // stack the per-vertex Farkas multipliers
    res.Z = Matrix::Zero(static_cast<Eigen::Index>(Nc) * pieces[0].stab.q, P1.faces());
    for (std::size_t c = 0; c < Nc; ++c)
        res.Z.middleRows(static_cast<Eigen::Index>(c) * pieces[0].stab.q, pieces[0].stab.q) =
            alpha * gather_Z(sol.x, asm_.z_offset[c], asm_.z_shape[c].first,
                             asm_.z_shape[c].second);

    // verification: every consistent plant's vertex closed loops
    bool used_vertices = false;
    auto points = verification_points(P1, opts.verify_samples, opts.verify_seed, used_vertices);
    res.verification.pass = true;
    for (const auto& pt : points) {
        std::vector<Matrix> A_l;
        Matrix B;
        unpack_lpva(pt, n, m, L, A_l, B);
        for (std::size_t c = 0; c < Nc; ++c) {
            Matrix Ac = Matrix::Zero(n, n);
            for (int l = 0; l < L; ++l) Ac += omega[c](l) * A_l[static_cast<std::size_t>(l)];
            const double viol = closed_loop_violation(Ac, B, res.gains[c], v, cs.time_kind,
                                                      opts.eta / 2.0);
            res.verification.max_violation =
                std::max(res.verification.max_violation, viol * alpha);
            if (viol > 0) res.verification.pass = false;
        }
        if (used_vertices)
            ++res.verification.vertices_checked;
        else
            ++res.verification.samples_checked;
    }
    return res;
}

Matrix gain_schedule(const Vector& theta, const std::vector<Vector>& omega,
                     const std::vector<Matrix>& gains) {
    require(!omega.empty() && omega.size() == gains.size(),
            "gain_schedule: vertex/gain count mismatch");
    const auto Nc = static_cast<int>(omega.size());
    const auto L = omega[0].size();
    require(theta.size() == L, "gain_schedule: theta dimension mismatch");

    lp::LpProblem p = lp::LpProblem::make(Nc);
    for (int c = 0; c < Nc; ++c) p.lower[static_cast<std::size_t>(c)] = 0.0;
    p.eq_lhs = Matrix::Zero(L + 1, Nc);
    p.eq_rhs = Vector::Zero(L + 1);
    p.eq_lhs.row(0).setOnes();
    p.eq_rhs(0) = 1.0;
    for (Eigen::Index l = 0; l < L; ++l) {
        for (int c = 0; c < Nc; ++c) p.eq_lhs(1 + l, c) = omega[static_cast<std::size_t>(c)](l);
        p.eq_rhs(1 + l) = theta(l);
    }
    auto sol = lp::solve_feasibility(p);
    if (sol.status != lp::LpStatus::Optimal)
        throw std::invalid_argument("gain_schedule: theta outside the vertex hull");
    Matrix K = Matrix::Zero(gains[0].rows(), gains[0].cols());
    for (int c = 0; c < Nc; ++c) K += sol.x(c) * gains[static_cast<std::size_t>(c)];
    return K;
}

}  // namespace posdd
