#include "posdd/lp.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

namespace posdd::lp {

LpProblem LpProblem::make(int n) {
    LpProblem p;
    p.n_vars = n;
    p.objective = Vector::Zero(n);
    p.eq_lhs = Matrix::Zero(0, n);
    p.eq_rhs = Vector::Zero(0);
    p.ineq_lhs = Matrix::Zero(0, n);
    p.ineq_rhs = Vector::Zero(0);
    p.lower.assign(n, -kInf);
    p.upper.assign(n, kInf);
    return p;
}

namespace {
void append_row(Matrix& lhs, Vector& rhs, const Vector& a, double b) {
    lhs.conservativeResize(lhs.rows() + 1, Eigen::NoChange);
    lhs.row(lhs.rows() - 1) = a.transpose();
    rhs.conservativeResize(rhs.size() + 1);
    rhs(rhs.size() - 1) = b;
}
}  // namespace

void LpProblem::add_eq_row(const Vector& a, double b) {
    require(a.size() == n_vars, "add_eq_row: size mismatch");
    append_row(eq_lhs, eq_rhs, a, b);
}

void LpProblem::add_ineq_row(const Vector& a, double b) {
    require(a.size() == n_vars, "add_ineq_row: size mismatch");
    append_row(ineq_lhs, ineq_rhs, a, b);
}

void LpProblem::validate() const {
    require(objective.size() == n_vars, "LpProblem: objective size mismatch");
    require(eq_lhs.cols() == n_vars && eq_lhs.rows() == eq_rhs.size(),
            "LpProblem: equality block size mismatch");
    require(ineq_lhs.cols() == n_vars && ineq_lhs.rows() == ineq_rhs.size(),
            "LpProblem: inequality block size mismatch");
    require(static_cast<int>(lower.size()) == n_vars && static_cast<int>(upper.size()) == n_vars,
            "LpProblem: bound vectors size mismatch");
    for (int i = 0; i < n_vars; ++i)
        require(lower[i] <= upper[i], "LpProblem: lower bound exceeds upper bound");
    require(eq_lhs.allFinite() && ineq_lhs.allFinite() && eq_rhs.allFinite() &&
                ineq_rhs.allFinite() && objective.allFinite(),
            "LpProblem: non-finite data");
}

namespace {

// How an original variable maps onto standard-form columns.
struct VarMap {
    enum Kind { Shifted, Mirrored, Split } kind = Shifted;
    int col = -1;       // first standard column
    double offset = 0;  // x = offset + t (Shifted), x = offset - t (Mirrored)
};

// Standard-form core: min c.t s.t. A t = b, t >= 0, solved by revised simplex
// with an explicit basis inverse maintained by product-form updates and
// periodic refactorization.
class Simplex {
public:
    // robust: Bland's rule from the first pivot and frequent refactorization;
    // slower, used as a clean retry after a numerical failure.
    Simplex(const LpProblem& p, bool feasibility_only, bool robust)
        : orig_(p), feas_only_(feasibility_only), robust_(robust) {
        build_standard_form();
    }

    LpSolution run() {
        LpSolution out;
        if (rows_ == 0 && n_art_ == 0) {
            // No constraints at all: every variable sits at its canonical point.
            out.status = finish_unconstrained(out);
            return out;
        }
        init_basis();
        if (n_art_ > 0) {
            Vector c1 = Vector::Zero(total_cols_);
            c1.tail(n_art_).setOnes();
            Phase r = iterate(c1, /*phase1=*/true);
            if (r == Phase::IterCap)
                throw numerical_error("lp: iteration cap exceeded in phase 1");
            double p1 = current_objective(c1);
            if (p1 > kFeasTol) {
                // marginal residuals are treated as numerical noise: retry
                // cleanly (via the caller) instead of declaring infeasibility
                if (p1 <= 100 * kFeasTol)
                    throw numerical_error("lp: phase 1 finished in the marginal zone");
                out.status = LpStatus::Infeasible;
                out.iterations = iters_;
                return out;
            }
            drive_out_artificials();
        }
        if (feas_only_ || orig_.objective.lpNorm<Eigen::Infinity>() == 0.0) {
            extract(out, LpStatus::Optimal);
            return out;
        }
        Vector c2 = Vector::Zero(total_cols_);
        for (int j = 0; j < struct_cols_; ++j) c2(j) = cost_std_(j);
        Phase r = iterate(c2, /*phase1=*/false);
        if (r == Phase::IterCap) throw numerical_error("lp: iteration cap exceeded in phase 2");
        extract(out, r == Phase::Unbounded ? LpStatus::Unbounded : LpStatus::Optimal);
        return out;
    }

private:
    enum class Phase { Optimal, Unbounded, IterCap };

    const LpProblem& orig_;
    bool feas_only_;
    bool robust_ = false;

    // standard form
    Matrix A_;        // rows_ x total_cols_ (structural + slack + artificial)
    Vector b_;        // rows_ >= 0
    Vector cost_std_; // structural+slack costs (phase 2)
    int rows_ = 0, struct_cols_ = 0, n_art_ = 0, total_cols_ = 0;
    std::vector<VarMap> vmap_;
    std::vector<int> row_origin_;  // original row id: eq rows 0..e-1, ineq rows e..e+i-1, -1 bound rows
    std::vector<double> row_sign_; // +-1 applied when normalizing b >= 0
    double obj_shift_ = 0.0;

    // simplex state
    std::vector<int> basis_;
    std::vector<char> in_basis_;
    Matrix Binv_;
    Vector xB_;
    long iters_ = 0;
    long iter_cap_ = 0;

    void build_standard_form() {
        const int n = orig_.n_vars;
        const auto e_rows = static_cast<int>(orig_.eq_lhs.rows());
        const auto i_rows = static_cast<int>(orig_.ineq_lhs.rows());

        vmap_.resize(n);
        struct_cols_ = 0;
        std::vector<std::pair<int, double>> bound_rows;  // var, span for doubly bounded
        for (int j = 0; j < n; ++j) {
            const double lo = orig_.lower[j], hi = orig_.upper[j];
            auto& m = vmap_[j];
            m.col = struct_cols_;
            if (lo == -kInf && hi == kInf) {
                m.kind = VarMap::Split;
                struct_cols_ += 2;
            } else if (lo != -kInf) {
                m.kind = VarMap::Shifted;
                m.offset = lo;
                struct_cols_ += 1;
                if (hi != kInf) bound_rows.push_back({j, hi - lo});
            } else {
                m.kind = VarMap::Mirrored;
                m.offset = hi;
                struct_cols_ += 1;
            }
        }
        const auto n_bound = static_cast<int>(bound_rows.size());
        const int n_ineq_all = i_rows + n_bound;
        rows_ = e_rows + n_ineq_all;
        const int slack_cols = n_ineq_all;

        Matrix A = Matrix::Zero(rows_, struct_cols_ + slack_cols);
        Vector b = Vector::Zero(rows_);
        row_origin_.assign(rows_, -1);
        row_sign_.assign(rows_, 1.0);

        auto emit_var = [&](int row, int j, double coef) {
            const auto& m = vmap_[j];
            switch (m.kind) {
                case VarMap::Shifted: A(row, m.col) += coef; break;
                case VarMap::Mirrored: A(row, m.col) -= coef; break;
                case VarMap::Split:
                    A(row, m.col) += coef;
                    A(row, m.col + 1) -= coef;
                    break;
            }
        };
        for (int r = 0; r < e_rows; ++r) {
            double rhs = orig_.eq_rhs(r);
            for (int j = 0; j < n; ++j) {
                const double c = orig_.eq_lhs(r, j);
                if (c == 0.0) continue;
                emit_var(r, j, c);
                rhs -= c * vmap_[j].offset;
            }
            b(r) = rhs;
            row_origin_[r] = r;
        }
        for (int r = 0; r < i_rows; ++r) {
            const int row = e_rows + r;
            double rhs = orig_.ineq_rhs(r);
            for (int j = 0; j < n; ++j) {
                const double c = orig_.ineq_lhs(r, j);
                if (c == 0.0) continue;
                emit_var(row, j, c);
                rhs -= c * vmap_[j].offset;
            }
            A(row, struct_cols_ + r) = 1.0;
            b(row) = rhs;
            row_origin_[row] = e_rows + r;
        }
        for (int k = 0; k < n_bound; ++k) {
            const int row = e_rows + i_rows + k;
            const auto [j, span] = bound_rows[k];
            A(row, vmap_[j].col) = 1.0;
            A(row, struct_cols_ + i_rows + k) = 1.0;
            b(row) = span;
        }

        // Costs on structural columns (phase 2), plus the constant shift from
        // variable offsets.
        cost_std_ = Vector::Zero(struct_cols_ + slack_cols);
        obj_shift_ = 0.0;
        for (int j = 0; j < n; ++j) {
            const double c = orig_.objective(j);
            const auto& m = vmap_[j];
            obj_shift_ += c * m.offset;
            switch (m.kind) {
                case VarMap::Shifted: cost_std_(m.col) += c; break;
                case VarMap::Mirrored: cost_std_(m.col) -= c; break;
                case VarMap::Split:
                    cost_std_(m.col) += c;
                    cost_std_(m.col + 1) -= c;
                    break;
            }
        }

        // Equilibrate (geometric-mean row/column scaling): simplex bases of
        // badly scaled certificate LPs are otherwise too ill-conditioned for
        // the dense inverse to survive.
        row_scale_.assign(rows_, 1.0);
        col_scale_.assign(struct_cols_ + slack_cols, 1.0);
        for (int pass = 0; pass < 2; ++pass) {
            for (int r = 0; r < rows_; ++r) {
                double lo = kInf, hi = 0.0;
                for (int j = 0; j < struct_cols_ + slack_cols; ++j) {
                    const double a = std::abs(A(r, j));
                    if (a == 0.0) continue;
                    lo = std::min(lo, a);
                    hi = std::max(hi, a);
                }
                if (hi == 0.0) continue;
                const double s = 1.0 / std::sqrt(lo * hi);
                A.row(r) *= s;
                b(r) *= s;
                row_scale_[r] *= s;
            }
            for (int j = 0; j < struct_cols_; ++j) {
                double lo = kInf, hi = 0.0;
                for (int r = 0; r < rows_; ++r) {
                    const double a = std::abs(A(r, j));
                    if (a == 0.0) continue;
                    lo = std::min(lo, a);
                    hi = std::max(hi, a);
                }
                if (hi == 0.0) continue;
                const double s = 1.0 / std::sqrt(lo * hi);
                A.col(j) *= s;
                cost_std_(j) *= s;
                col_scale_[j] *= s;
            }
        }

        // Normalize b >= 0 and decide which rows need artificials. Inequality
        // rows with b >= 0 start with their slack basic.
        std::vector<int> art_rows;
        for (int r = 0; r < rows_; ++r) {
            if (b(r) < 0) {
                A.row(r) = -A.row(r);
                b(r) = -b(r);
                row_sign_[r] = -1.0;
            }
        }
        for (int r = 0; r < rows_; ++r) {
            const bool slack_ok =
                r >= e_rows && row_sign_[r] > 0;  // slack coefficient stayed +1
            if (!slack_ok) art_rows.push_back(r);
        }
        n_art_ = static_cast<int>(art_rows.size());
        total_cols_ = struct_cols_ + slack_cols + n_art_;
        A_ = Matrix::Zero(rows_, total_cols_);
        A_.leftCols(struct_cols_ + slack_cols) = A;
        for (int k = 0; k < n_art_; ++k) A_(art_rows[k], struct_cols_ + slack_cols + k) = 1.0;
        // every row owns one unit column (its slack or its artificial); basis
        // repair relies on this
        unit_col_.assign(rows_, -1);
        for (int r = e_rows; r < rows_; ++r)
            if (row_sign_[r] > 0) unit_col_[r] = struct_cols_ + (r - e_rows);
        for (int k = 0; k < n_art_; ++k) unit_col_[art_rows[k]] = struct_cols_ + slack_cols + k;
        b_ = b;
        struct_slack_cols_ = struct_cols_ + slack_cols;
        art_rows_ = std::move(art_rows);
        iter_cap_ = std::max<long>(20000, 50L * (rows_ + total_cols_));
    }

    int struct_slack_cols_ = 0;
    std::vector<int> art_rows_;
    std::vector<int> unit_col_;
    std::vector<double> row_scale_, col_scale_;

    void init_basis() {
        basis_.assign(rows_, -1);
        in_basis_.assign(total_cols_, 0);
        int k = 0;
        const int e_rows = static_cast<int>(orig_.eq_lhs.rows());
        for (int r = 0; r < rows_; ++r) {
            const bool slack_ok = r >= e_rows && row_sign_[r] > 0;
            if (slack_ok) {
                basis_[r] = struct_cols_ + (r - e_rows);
            } else {
                basis_[r] = struct_slack_cols_ + k;
                ++k;
            }
            in_basis_[basis_[r]] = 1;
        }
        refactorize();
    }

    void refactorize() {
        Matrix B(rows_, rows_);
        for (int r = 0; r < rows_; ++r) B.col(r) = A_.col(basis_[r]);
        Eigen::PartialPivLU<Matrix> lu(B);
        Binv_ = lu.inverse();
        if (!Binv_.allFinite()) {
            repair_basis(B);
            for (int r = 0; r < rows_; ++r) B.col(r) = A_.col(basis_[r]);
            Binv_ = Eigen::PartialPivLU<Matrix>(B).inverse();
            if (!Binv_.allFinite())
                throw numerical_error("lp: singular basis during refactorization");
        }
        xB_ = Binv_ * b_;
    }

    // A numerically dependent set of basic columns cannot be inverted. Swap
    // the dependent ones for unit columns (each row owns a slack or an
    // artificial). Phase 1 stays exact -- re-entering artificials just raise
    // its objective -- and an artificial stuck at a nonzero level in phase 2
    // is caught at extraction.
    void repair_basis(const Matrix& B) {
        Eigen::ColPivHouseholderQR<Matrix> qr(B);
        qr.setThreshold(1e-11);
        const int rank = static_cast<int>(qr.rank());
        if (rank >= rows_) throw numerical_error("lp: singular basis during refactorization");
        const auto& perm = qr.colsPermutation().indices();
        std::vector<char> indep(rows_, 0);
        for (int k = 0; k < rank; ++k) indep[perm(k)] = 1;
        Matrix S(rows_, rank);
        int c = 0;
        for (int pos = 0; pos < rows_; ++pos)
            if (indep[pos]) S.col(c++) = B.col(pos);
        // orthonormal span of the independent columns, extended greedily by
        // the unit vector farthest from it
        Eigen::HouseholderQR<Matrix> hqr(S);
        Matrix Q = hqr.householderQ() * Matrix::Identity(rows_, rank);
        for (int pos = 0; pos < rows_; ++pos) {
            if (indep[pos]) continue;
            int best_row = -1;
            double best = 1e-8;
            for (int r = 0; r < rows_; ++r) {
                if (in_basis_[unit_col_[r]]) continue;
                const double res = 1.0 - Q.row(r).squaredNorm();
                if (res > best) {
                    best = res;
                    best_row = r;
                }
            }
            if (best_row < 0)
                throw numerical_error("lp: singular basis during refactorization");
            in_basis_[basis_[pos]] = 0;
            basis_[pos] = unit_col_[best_row];
            in_basis_[basis_[pos]] = 1;
            Vector w = Vector::Unit(rows_, best_row);
            w -= Q * Q.row(best_row).transpose();
            Q.conservativeResize(Eigen::NoChange, Q.cols() + 1);
            Q.col(Q.cols() - 1) = w / w.norm();
        }
    }

    double current_objective(const Vector& c) const {
        double v = 0;
        for (int r = 0; r < rows_; ++r) v += c(basis_[r]) * xB_(r);
        return v;
    }

    Phase iterate(const Vector& c, bool phase1) {
        const int priced_cols = phase1 ? total_cols_ : struct_slack_cols_;
        long stall = 0;
        bool bland = robust_;
        double last_obj = current_objective(c);
        int since_refactor = 0;
        while (true) {
            if (++iters_ > iter_cap_) return Phase::IterCap;
            if (std::getenv("POSDD_DEBUG") && iters_ % 2000 == 0)
                std::fprintf(stderr, "lp: iters=%ld phase%d obj=%.6g bland=%d rows=%d\n", iters_,
                             phase1 ? 1 : 2, current_objective(c), bland ? 1 : 0, rows_);
            // reduced costs
            Vector y(rows_);
            for (int r = 0; r < rows_; ++r) y(r) = c(basis_[r]);
            Vector yT = y.transpose() * Binv_;
            int enter = -1;
            double best = -kOptTol;
            for (int j = 0; j < priced_cols; ++j) {
                if (in_basis_[j]) continue;
                const double d = c(j) - yT.dot(A_.col(j));
                if (bland) {
                    if (d < -kOptTol) {
                        enter = j;
                        break;
                    }
                } else if (d < best) {
                    best = d;
                    enter = j;
                }
            }
            if (enter < 0) return Phase::Optimal;

            Vector w = Binv_ * A_.col(enter);
            // Pivots must be large relative to the column, otherwise round-off
            // in the product-form Binv can masquerade as a pivot and leave a
            // singular basis behind. When only marginal pivots exist, redo the
            // computation against a fresh factorization before trusting them.
            double piv_tol = std::max(kPivotTol, 1e-7 * w.cwiseAbs().maxCoeff());
            if (!(w.array() > piv_tol).any()) {
                refactorize();
                since_refactor = 0;
                w = Binv_ * A_.col(enter);
                piv_tol = std::max(kPivotTol, 1e-7 * w.cwiseAbs().maxCoeff());
                if (!(w.array() > piv_tol).any()) piv_tol = kPivotTol;
                Vector y2(rows_);
                for (int r = 0; r < rows_; ++r) y2(r) = c(basis_[r]);
                const double d2 = c(enter) - (y2.transpose() * Binv_).dot(A_.col(enter));
                if (d2 >= -kOptTol) continue;  // stale reduced cost, re-price
            }
            // Harris-style two-pass ratio test: the feasibility tolerance
            // widens the candidate set so the leaving row can be chosen for
            // pivot magnitude (degenerate bases otherwise force tiny pivots
            // that destroy the conditioning of Binv). Under Bland's rule the
            // smallest basis index wins instead.
            double t_max = kInf;
            for (int r = 0; r < rows_; ++r)
                if (w(r) > piv_tol) t_max = std::min(t_max, (xB_(r) + kFeasTol) / w(r));
            if (t_max == kInf) return Phase::Unbounded;
            int leave = -1;
            double best_piv = 0.0;
            for (int r = 0; r < rows_; ++r) {
                if (w(r) <= piv_tol) continue;
                if (xB_(r) / w(r) > t_max) continue;
                if (bland) {
                    if (leave < 0 || basis_[r] < basis_[leave]) leave = r;
                } else if (w(r) > best_piv) {
                    best_piv = w(r);
                    leave = r;
                }
            }
            const double t = std::max(xB_(leave) / w(leave), 0.0);

            // pivot
            xB_ -= t * w;
            xB_(leave) = t;
            for (int r = 0; r < rows_; ++r)
                if (xB_(r) < 0 && xB_(r) > -kFeasTol) xB_(r) = 0;
            in_basis_[basis_[leave]] = 0;
            in_basis_[enter] = 1;
            basis_[leave] = enter;
            const double piv = w(leave);
            Vector brow = Binv_.row(leave) / piv;
            for (int r = 0; r < rows_; ++r)
                if (r != leave) Binv_.row(r) -= w(r) * brow.transpose();
            Binv_.row(leave) = brow.transpose();

            if (++since_refactor >= (robust_ ? 20 : 100)) {
                refactorize();
                since_refactor = 0;
            }

            const double obj = current_objective(c);
            if (obj < last_obj - 1e-12) {
                stall = 0;
            } else if (!bland && ++stall > 3L * rows_) {
                bland = true;  // anti-cycling fallback
            }
            last_obj = obj;
        }
    }

    // After phase 1, pivot remaining artificials out of the basis; rows where
    // no structural pivot exists are linearly dependent and are deleted.
    void drive_out_artificials() {
        refactorize();  // pivot decisions below need an accurate Binv
        std::vector<int> dead_rows;
        for (int r = 0; r < rows_; ++r) {
            if (basis_[r] < struct_slack_cols_) continue;
            Vector row = Binv_.row(r) * A_.leftCols(struct_slack_cols_);
            int pivot_col = -1;
            double best = kPivotTol * 10;
            for (int j = 0; j < struct_slack_cols_; ++j) {
                if (in_basis_[j]) continue;
                if (std::abs(row(j)) > best) {
                    best = std::abs(row(j));
                    pivot_col = j;
                }
            }
            if (pivot_col < 0) {
                dead_rows.push_back(r);
                continue;
            }
            Vector w = Binv_ * A_.col(pivot_col);
            in_basis_[basis_[r]] = 0;
            in_basis_[pivot_col] = 1;
            basis_[r] = pivot_col;
            const double piv = w(r);
            Vector brow = Binv_.row(r) / piv;
            for (int k = 0; k < rows_; ++k)
                if (k != r) Binv_.row(k) -= w(k) * brow.transpose();
            Binv_.row(r) = brow.transpose();
            xB_(r) = 0.0;
        }
        if (dead_rows.empty()) return;
        std::vector<char> dead(rows_, 0);
        for (int r : dead_rows) dead[r] = 1;
        Matrix A2(rows_ - static_cast<int>(dead_rows.size()), total_cols_);
        Vector b2(A2.rows());
        std::vector<int> basis2, origin2, unit2;
        std::vector<double> sign2, scale2;
        int k = 0;
        for (int r = 0; r < rows_; ++r) {
            if (dead[r]) {
                in_basis_[basis_[r]] = 0;
                continue;
            }
            A2.row(k) = A_.row(r);
            b2(k) = b_(r);
            basis2.push_back(basis_[r]);
            origin2.push_back(row_origin_[r]);
            sign2.push_back(row_sign_[r]);
            scale2.push_back(row_scale_[r]);
            unit2.push_back(unit_col_[r]);
            ++k;
        }
        A_ = std::move(A2);
        b_ = std::move(b2);
        basis_ = std::move(basis2);
        row_origin_ = std::move(origin2);
        row_sign_ = std::move(sign2);
        row_scale_ = std::move(scale2);
        unit_col_ = std::move(unit2);
        rows_ = static_cast<int>(basis_.size());
        refactorize();
    }

    LpStatus finish_unconstrained(LpSolution& out) {
        Vector x(orig_.n_vars);
        for (int j = 0; j < orig_.n_vars; ++j)
            x(j) = (vmap_[j].kind == VarMap::Split) ? 0.0 : vmap_[j].offset;
        LpStatus st = LpStatus::Optimal;
        if (!feas_only_) {
            for (int j = 0; j < orig_.n_vars; ++j) {
                const double c = orig_.objective(j);
                if ((c > 0 && orig_.lower[j] == -kInf) || (c < 0 && orig_.upper[j] == kInf)) {
                    st = LpStatus::Unbounded;
                    break;
                }
                if (c > 0)
                    x(j) = orig_.lower[j];
                else if (c < 0)
                    x(j) = orig_.upper[j];
            }
        }
        out.x = x;
        out.objective_value = orig_.objective.dot(x);
        out.dual_eq = Vector::Zero(orig_.eq_lhs.rows());
        out.dual_ineq = Vector::Zero(orig_.ineq_lhs.rows());
        return st;
    }

    void extract(LpSolution& out, LpStatus status) {
        for (int r = 0; r < rows_; ++r)
            if (basis_[r] >= struct_slack_cols_ && xB_(r) > 10 * kFeasTol)
                throw numerical_error("lp: artificial variable stuck in the basis");
        Vector t = Vector::Zero(total_cols_);
        for (int r = 0; r < rows_; ++r) t(basis_[r]) = xB_(r);
        Vector x(orig_.n_vars);
        for (int j = 0; j < orig_.n_vars; ++j) {
            const auto& m = vmap_[j];
            switch (m.kind) {
                case VarMap::Shifted: x(j) = m.offset + t(m.col) * col_scale_[m.col]; break;
                case VarMap::Mirrored: x(j) = m.offset - t(m.col) * col_scale_[m.col]; break;
                case VarMap::Split:
                    x(j) = t(m.col) * col_scale_[m.col] - t(m.col + 1) * col_scale_[m.col + 1];
                    break;
            }
        }
        out.status = status;
        out.x = x;
        out.iterations = static_cast<int>(iters_);
        out.objective_value = orig_.objective.dot(x);

        // duals of original rows from the final basis
        Vector cB(rows_);
        for (int r = 0; r < rows_; ++r)
            cB(r) = basis_[r] < struct_slack_cols_ ? cost_std_(basis_[r]) : 0.0;
        Vector y = cB.transpose() * Binv_;
        out.dual_eq = Vector::Zero(orig_.eq_lhs.rows());
        out.dual_ineq = Vector::Zero(orig_.ineq_lhs.rows());
        const auto e_rows = static_cast<int>(orig_.eq_lhs.rows());
        for (int r = 0; r < rows_; ++r) {
            const int o = row_origin_[r];
            if (o < 0) continue;
            const double yo = y(r) * row_sign_[r] * row_scale_[r];
            if (o < e_rows)
                out.dual_eq(o) = yo;
            else
                out.dual_ineq(o - e_rows) = yo;
        }
    }
};

}  // namespace

LpSolution solve(const LpProblem& p) {
    p.validate();
    try {
        return Simplex(p, /*feasibility_only=*/false, /*robust=*/false).run();
    } catch (const numerical_error&) {
        return Simplex(p, /*feasibility_only=*/false, /*robust=*/true).run();
    }
}

LpSolution solve_feasibility(const LpProblem& p) {
    p.validate();
    try {
        return Simplex(p, /*feasibility_only=*/true, /*robust=*/false).run();
    } catch (const numerical_error&) {
        return Simplex(p, /*feasibility_only=*/true, /*robust=*/true).run();
    }
}

}  // namespace posdd::lp
