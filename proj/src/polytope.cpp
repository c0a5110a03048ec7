#include "posdd/polytope.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <exception>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "posdd/lp.hpp"

namespace posdd {

bool contains_point(const Polytope& P, const Vector& x, double tol) {
    P.validate();
    require(x.size() == P.dim(), "contains_point: dimension mismatch");
    if (P.faces() == 0) return true;
    return ((P.G * x - P.h).array() <= tol).all();
}

ChebyshevResult chebyshev_center(const Polytope& P) {
    P.validate();
    const auto d = P.dim();
    lp::LpProblem p = lp::LpProblem::make(static_cast<int>(d) + 1);
    p.lower[d] = 0.0;  // radius
    p.objective = Vector::Zero(d + 1);
    p.objective(d) = -1.0;  // maximize r
    for (Eigen::Index i = 0; i < P.faces(); ++i) {
        Vector row(d + 1);
        row.head(d) = P.G.row(i).transpose();
        row(d) = P.G.row(i).norm();
        p.add_ineq_row(row, P.h(i));
    }
    auto sol = lp::solve(p);
    if (sol.status == lp::LpStatus::Infeasible)
        throw std::invalid_argument("chebyshev_center: empty polytope");
    ChebyshevResult out;
    out.center = sol.x.head(d);
    out.radius = sol.x(d);
    out.radius_unbounded = (sol.status == lp::LpStatus::Unbounded);
    return out;
}

namespace {

// Verdict for one face against a fixed set of other faces, via the dual LP:
// max g.x s.t. G x <= h equals min h.y s.t. G^T y = g, y >= 0 whenever both
// sides are feasible; dual infeasibility means the primal is unbounded in the
// g direction. This keeps the simplex basis at dim x dim.
bool face_redundant(const Matrix& G, const Vector& h, const Vector& g, double hi) {
    const auto f = static_cast<int>(G.rows());
    lp::LpProblem p = lp::LpProblem::make(f);
    for (int i = 0; i < f; ++i) p.lower[i] = 0.0;
    p.objective = h;
    p.eq_lhs = G.transpose();
    p.eq_rhs = g;
    lp::LpSolution sol;
    try {
        sol = lp::solve(p);
    } catch (const numerical_error&) {
        return false;  // solver gave up: keep the face (conservative)
    }
    if (sol.status != lp::LpStatus::Optimal) return false;  // unbounded direction: keep
    return sol.objective_value <= hi + 1e-8;
}

struct NormalizedFaces {
    Matrix G;
    Vector h;
    std::vector<int> index;  // original face index
};

// Row normalization plus exact-duplicate collapse (keeps the tighter rhs).
NormalizedFaces normalize_faces(const Polytope& P) {
    NormalizedFaces out;
    const auto d = P.dim();
    std::vector<Vector> rows;
    std::vector<double> rhs;
    for (Eigen::Index i = 0; i < P.faces(); ++i) {
        const double nrm = P.G.row(i).norm();
        require(nrm > 1e-14, "remove_redundant_faces: zero face normal");
        Vector g = P.G.row(i).transpose() / nrm;
        const double b = P.h(i) / nrm;
        bool dup = false;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if ((rows[k] - g).lpNorm<Eigen::Infinity>() < 1e-9) {
                dup = true;
                if (b < rhs[k] - 1e-12) {  // tighter duplicate replaces
                    rows[k] = g;
                    rhs[k] = b;
                    out.index[k] = static_cast<int>(i);
                }
                break;
            }
        }
        if (!dup) {
            rows.push_back(std::move(g));
            rhs.push_back(b);
            out.index.push_back(static_cast<int>(i));
        }
    }
    out.G.resize(static_cast<Eigen::Index>(rows.size()), d);
    out.h.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.G.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
        out.h(static_cast<Eigen::Index>(k)) = rhs[k];
    }
    return out;
}

std::pair<Polytope, std::vector<int>> remove_redundant_impl(const Polytope& P, bool parallel) {
    P.validate();
    NormalizedFaces nf = normalize_faces(P);
    const auto f = static_cast<int>(nf.G.rows());
    std::vector<char> keep(f, 1);

    // Implicit equalities (antipodal tight face pairs) are never dropped: on
    // a set with empty interior every such face looks redundant given the
    // rest, and removing them simultaneously would discard the equality.
    std::vector<char> protect(f, 0);
    for (int i = 0; i < f; ++i)
        for (int j = i + 1; j < f; ++j)
            if (!(protect[i] && protect[j]) &&
                (nf.G.row(i) + nf.G.row(j)).cwiseAbs().maxCoeff() <= 1e-10 &&
                std::abs(nf.h(i) + nf.h(j)) <= 1e-10)
                protect[i] = protect[j] = 1;

    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 0; i < f; ++i) {
        if (protect[i]) continue;
        try {
            Matrix Go(f - 1, nf.G.cols());
            Vector ho(f - 1);
            int k = 0;
            for (int j = 0; j < f; ++j) {
                if (j == i) continue;
                Go.row(k) = nf.G.row(j);
                ho(k) = nf.h(j);
                ++k;
            }
            if (face_redundant(Go, ho, nf.G.row(i).transpose(), nf.h(i))) keep[i] = 0;
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    std::vector<int> kept;
    int nk = 0;
    for (int i = 0; i < f; ++i) nk += keep[i];
    Polytope out;
    out.G.resize(nk, P.dim());
    out.h.resize(nk);
    int k = 0;
    for (int i = 0; i < f; ++i) {
        if (!keep[i]) continue;
        const int oi = nf.index[i];
        out.G.row(k) = P.G.row(oi);
        out.h(k) = P.h(oi);
        kept.push_back(oi);
        ++k;
    }
    return {out, kept};
}

}  // namespace

std::pair<Polytope, std::vector<int>> remove_redundant_faces(const Polytope& P) {
    return remove_redundant_impl(P, true);
}

std::pair<Polytope, std::vector<int>> remove_redundant_faces_serial(const Polytope& P) {
    return remove_redundant_impl(P, false);
}

namespace {

std::uint64_t binomial_capped(int n, int k, std::uint64_t cap) {
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
        if (r > cap) return cap + 1;
    }
    return r;
}

void check_bounded(const Polytope& P) {
    const auto d = P.dim();
    for (Eigen::Index i = 0; i < d; ++i) {
        for (double s : {1.0, -1.0}) {
            lp::LpProblem p = lp::LpProblem::make(static_cast<int>(d));
            p.objective = Vector::Zero(d);
            p.objective(i) = -s;  // maximize s * x_i
            p.ineq_lhs = P.G;
            p.ineq_rhs = P.h;
            auto sol = lp::solve(p);
            if (sol.status == lp::LpStatus::Unbounded)
                throw std::invalid_argument("enumerate_vertices: unbounded polytope");
            if (sol.status == lp::LpStatus::Infeasible) return;  // empty: no vertices
        }
    }
}

std::vector<Vector> enumerate_vertices_impl(const Polytope& P, bool parallel) {
    P.validate();
    const auto d = static_cast<int>(P.dim());
    require(d <= kVertexEnumMaxDim, "enumerate_vertices: dimension guard exceeded");
    const auto f = static_cast<int>(P.faces());
    if (f < d) throw std::invalid_argument("enumerate_vertices: unbounded polytope");
    require(binomial_capped(f, d, kVertexEnumMaxSubsets) <= kVertexEnumMaxSubsets,
            "enumerate_vertices: subset cap exceeded");
    check_bounded(P);

    std::vector<Vector> verts;
    auto push_unique = [&](const Vector& x) {
        for (const auto& v : verts)
            if ((v - x).lpNorm<Eigen::Infinity>() < kVertexDedupTol) return;
        verts.push_back(x);
    };

    // combinations in lexicographic order, solved in chunks
    std::vector<int> comb(d);
    for (int i = 0; i < d; ++i) comb[i] = i;
    const int chunk = 8192;
    std::vector<std::vector<int>> buf;
    std::vector<std::pair<char, Vector>> results;
    bool more = f >= d;
    while (more) {
        buf.clear();
        while (static_cast<int>(buf.size()) < chunk && more) {
            buf.push_back(comb);
            // advance
            int i = d - 1;
            while (i >= 0 && comb[i] == f - d + i) --i;
            if (i < 0) {
                more = false;
            } else {
                ++comb[i];
                for (int j = i + 1; j < d; ++j) comb[j] = comb[j - 1] + 1;
            }
        }
        results.assign(buf.size(), {0, Vector()});
#pragma omp parallel for schedule(dynamic) if (parallel)
        for (int k = 0; k < static_cast<int>(buf.size()); ++k) {
            Matrix Gs(d, d);
            Vector hs(d);
            for (int i = 0; i < d; ++i) {
                Gs.row(i) = P.G.row(buf[k][i]);
                hs(i) = P.h(buf[k][i]);
            }
            Eigen::FullPivLU<Matrix> lu(Gs);
            lu.setThreshold(1e-10);
            if (!lu.isInvertible()) continue;
            Vector x = lu.solve(hs);
            if (((P.G * x - P.h).array() <= 1e-8).all()) results[k] = {1, std::move(x)};
        }
        for (auto& [ok, x] : results)
            if (ok) push_unique(x);
    }
    return verts;
}

}  // namespace

std::vector<Vector> enumerate_vertices(const Polytope& P) {
    return enumerate_vertices_impl(P, true);
}

std::vector<Vector> enumerate_vertices_serial(const Polytope& P) {
    return enumerate_vertices_impl(P, false);
}

ContainmentCertificate check_containment_farkas(const Polytope& P1, const Polytope& P2) {
    P1.validate();
    P2.validate();
    require(P1.dim() == P2.dim(), "check_containment_farkas: dimension mismatch");
    const auto f1 = static_cast<int>(P1.faces());
    const auto f2 = static_cast<int>(P2.faces());
    const auto d = static_cast<int>(P1.dim());

    // variables: Z row-major, Z >= 0
    lp::LpProblem p = lp::LpProblem::make(f2 * f1);
    for (int i = 0; i < f2 * f1; ++i) p.lower[i] = 0.0;
    p.eq_lhs = Matrix::Zero(f2 * d, f2 * f1);
    p.eq_rhs = Vector::Zero(f2 * d);
    for (int r = 0; r < f2; ++r)
        for (int c = 0; c < d; ++c) {
            const int row = r * d + c;
            for (int ff = 0; ff < f1; ++ff) p.eq_lhs(row, r * f1 + ff) = P1.G(ff, c);
            p.eq_rhs(row) = P2.G(r, c);
        }
    p.ineq_lhs = Matrix::Zero(f2, f2 * f1);
    p.ineq_rhs = P2.h;
    for (int r = 0; r < f2; ++r)
        for (int ff = 0; ff < f1; ++ff) p.ineq_lhs(r, r * f1 + ff) = P1.h(ff);

    ContainmentCertificate cert;
    auto sol = lp::solve_feasibility(p);
    if (sol.status == lp::LpStatus::Optimal) {
        cert.contained = true;
        Matrix Z(f2, f1);
        for (int r = 0; r < f2; ++r)
            for (int ff = 0; ff < f1; ++ff) Z(r, ff) = sol.x(r * f1 + ff);
        cert.Z = std::move(Z);
        return cert;
    }
    cert.contained = false;
    if (d <= kVertexEnumMaxDim) {
        try {
            double worst = 1e-7;
            for (const auto& vtx : enumerate_vertices(P1)) {
                const double viol = (P2.G * vtx - P2.h).maxCoeff();
                if (viol > worst) {
                    worst = viol;
                    cert.witness = vtx;
                }
            }
        } catch (const std::exception&) {
            // witness extraction is best-effort
        }
    }
    return cert;
}

std::vector<Vector> sample_interior(const Polytope& P, int count, std::uint64_t seed) {
    P.validate();
    require(count >= 0, "sample_interior: negative count");
    auto cheb = chebyshev_center(P);
    if (cheb.radius_unbounded)
        throw std::invalid_argument("sample_interior: unbounded polytope");
    require(cheb.radius > 1e-9, "sample_interior: degenerate polytope (zero inradius)");
    const auto d = P.dim();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Vector x = cheb.center;
    auto step = [&]() {
        Vector dir(d);
        for (Eigen::Index i = 0; i < d; ++i) dir(i) = gauss(rng);
        const double nrm = dir.norm();
        if (nrm < 1e-14) return;
        dir /= nrm;
        // chord extent along dir
        double t_lo = -std::numeric_limits<double>::infinity();
        double t_hi = std::numeric_limits<double>::infinity();
        const Vector gd = P.G * dir;
        const Vector slack = P.h - P.G * x;
        for (Eigen::Index i = 0; i < P.faces(); ++i) {
            if (gd(i) > 1e-14)
                t_hi = std::min(t_hi, slack(i) / gd(i));
            else if (gd(i) < -1e-14)
                t_lo = std::max(t_lo, slack(i) / gd(i));
        }
        if (!std::isfinite(t_lo) || !std::isfinite(t_hi))
            throw std::invalid_argument("sample_interior: unbounded chord");
        if (t_hi <= t_lo) return;
        x += (t_lo + unif(rng) * (t_hi - t_lo)) * dir;
    };

    const auto burn = 100 * static_cast<int>(d);
    for (int i = 0; i < burn; ++i) step();
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        for (Eigen::Index i = 0; i < d; ++i) step();
        // clip rounding noise back onto the polytope boundary tolerance
        out.push_back(x);
    }
    return out;
}

}  // namespace posdd
