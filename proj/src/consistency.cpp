#include "posdd/consistency.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "posdd/linalg.hpp"

namespace posdd {

void Dataset::validate() const {
    require(X.cols() >= 1, "Dataset: at least one sample required");
    require(U.cols() == X.cols() && Xdelta.cols() == X.cols(),
            "Dataset: X, U, Xdelta must share the sample count");
    require(Xdelta.rows() == X.rows(), "Dataset: Xdelta row count must match X");
    require(epsilon >= 0.0, "Dataset: negative epsilon");
    if (switching)
        require(static_cast<Eigen::Index>(switching->size()) == X.cols(),
                "Dataset: switching label count must match samples");
    if (theta)
        require(theta->cols() == X.cols(), "Dataset: theta must have one column per sample");
}

Vector pack_plant(const Matrix& A, const Matrix& B) {
    Vector out(A.size() + B.size());
    out.head(A.size()) = vec(A);
    out.tail(B.size()) = vec(B);
    return out;
}

void unpack_plant(const Vector& x, Eigen::Index n, Eigen::Index m, Matrix& A, Matrix& B) {
    require(x.size() == n * (n + m), "unpack_plant: size mismatch");
    A = unvec(x.head(n * n), n, n);
    B = unvec(x.tail(n * m), n, m);
}

Vector pack_switched(const std::vector<Matrix>& A, const std::vector<Matrix>& B) {
    require(A.size() == B.size(), "pack_switched: mode count mismatch");
    Eigen::Index total = 0;
    for (std::size_t s = 0; s < A.size(); ++s) total += A[s].size() + B[s].size();
    Vector out(total);
    Eigen::Index at = 0;
    for (std::size_t s = 0; s < A.size(); ++s) {
        out.segment(at, A[s].size()) = vec(A[s]);
        at += A[s].size();
        out.segment(at, B[s].size()) = vec(B[s]);
        at += B[s].size();
    }
    return out;
}

Vector pack_lpva(const std::vector<Matrix>& A_l, const Matrix& B) {
    Eigen::Index total = B.size();
    for (const auto& A : A_l) total += A.size();
    Vector out(total);
    Eigen::Index at = 0;
    for (const auto& A : A_l) {
        out.segment(at, A.size()) = vec(A);
        at += A.size();
    }
    out.tail(B.size()) = vec(B);
    return out;
}

void unpack_lpva(const Vector& x, Eigen::Index n, Eigen::Index m, int L,
                 std::vector<Matrix>& A_l, Matrix& B) {
    require(x.size() == n * (L * n + m), "unpack_lpva: size mismatch");
    A_l.resize(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) A_l[l] = unvec(x.segment(l * n * n, n * n), n, n);
    B = unvec(x.tail(n * m), n, m);
}

Vector switched_block(const ConsistencySet& cs, const Vector& x, int mode) {
    const auto& sv = std::get<SwitchedVariant>(cs.variant);
    require(mode >= 1 && mode <= sv.n_modes, "switched_block: mode out of range");
    Eigen::Index at = 0;
    for (int s = 0; s < mode - 1; ++s) at += cs.n * (cs.n + sv.m_s[s]);
    return x.segment(at, cs.n * (cs.n + sv.m_s[mode - 1]));
}

namespace {

// Data faces of Eq-style consistency blocks: coefficient block stacked with
// its negation, rhs eps*1 +- vec(Xdelta).
void append_data_faces(Matrix& G, Vector& h, Eigen::Index& at, const Matrix& coeff,
                       const Matrix& Xdelta, double eps, Eigen::Index col0) {
    const Vector xd = vec(Xdelta);
    const auto r = coeff.rows();
    G.block(at, col0, r, coeff.cols()) = coeff;
    h.segment(at, r) = Vector::Constant(r, eps) + xd;
    G.block(at + r, col0, r, coeff.cols()) = -coeff;
    h.segment(at + r, r) = Vector::Constant(r, eps) - xd;
    at += 2 * r;
}

// Positivity prior rows on one [a; b] block (or on stacked a-blocks for LPVA).
Eigen::Index prior_row_count(const Prior& pr, TimeKind tk, Eigen::Index n, Eigen::Index m,
                             int n_a_blocks) {
    Eigen::Index r = 0;
    if (pr.a_positive)
        r += n_a_blocks * (tk == TimeKind::Continuous ? n * (n - 1) : n * n);
    if (pr.b_nonnegative) r += n * m;
    return r;
}

void append_prior_faces(Matrix& G, Vector& h, Eigen::Index& at, const Prior& pr, TimeKind tk,
                        Eigen::Index n, Eigen::Index m, Eigen::Index col0, int n_a_blocks) {
    if (pr.a_positive) {
        if (tk == TimeKind::Continuous) {
            const Matrix Mn = metzler_index_matrix(n);
            for (int blk = 0; blk < n_a_blocks; ++blk) {
                G.block(at, col0 + blk * n * n, Mn.rows(), n * n) = -Mn;
                h.segment(at, Mn.rows()).setZero();
                at += Mn.rows();
            }
        } else {
            for (int blk = 0; blk < n_a_blocks; ++blk) {
                G.block(at, col0 + blk * n * n, n * n, n * n) =
                    -Matrix::Identity(n * n, n * n);
                h.segment(at, n * n).setZero();
                at += n * n;
            }
        }
    }
    if (pr.b_nonnegative) {
        const Eigen::Index bcol = col0 + n_a_blocks * n * n;
        G.block(at, bcol, n * m, n * m) = -Matrix::Identity(n * m, n * m);
        h.segment(at, n * m).setZero();
        at += n * m;
    }
}

}  // namespace

ConsistencySet build_consistency(const Dataset& d, const Prior& prior) {
    d.validate();
    require(!d.switching && !d.theta,
            "build_consistency: use the switched/lpva builders for labeled data");
    const auto n = d.n(), m = d.m(), T = d.T();
    const Eigen::Index dim = n * (n + m);
    const Eigen::Index pr = prior_row_count(prior, d.time_kind, n, m, 1);

    Matrix coeff(n * T, dim);
    coeff.leftCols(n * n) = kron(d.X.transpose(), Matrix::Identity(n, n));
    coeff.rightCols(n * m) = kron(d.U.transpose(), Matrix::Identity(n, n));

    ConsistencySet cs;
    cs.n = static_cast<int>(n);
    cs.m = static_cast<int>(m);
    cs.time_kind = d.time_kind;
    cs.variant = SingleVariant{};
    cs.polytope.G = Matrix::Zero(2 * n * T + pr, dim);
    cs.polytope.h = Vector::Zero(2 * n * T + pr);
    Eigen::Index at = 0;
    append_data_faces(cs.polytope.G, cs.polytope.h, at, coeff, d.Xdelta, d.epsilon, 0);
    append_prior_faces(cs.polytope.G, cs.polytope.h, at, prior, d.time_kind, n, m, 0, 1);
    return cs;
}

Polytope switched_mode_polytope(const Dataset& d, const Prior& prior, int mode) {
    d.validate();
    require(d.switching.has_value(), "switched_mode_polytope: no switching labels");
    const auto n = d.n(), m = d.m();
    std::vector<Eigen::Index> cols;
    for (Eigen::Index t = 0; t < d.T(); ++t)
        if ((*d.switching)[static_cast<std::size_t>(t)] == mode) cols.push_back(t);
    const auto Ts = static_cast<Eigen::Index>(cols.size());
    Matrix Xs(n, Ts), Us(m, Ts), Xds(n, Ts);
    for (Eigen::Index k = 0; k < Ts; ++k) {
        Xs.col(k) = d.X.col(cols[static_cast<std::size_t>(k)]);
        Us.col(k) = d.U.col(cols[static_cast<std::size_t>(k)]);
        Xds.col(k) = d.Xdelta.col(cols[static_cast<std::size_t>(k)]);
    }
    const Eigen::Index dim = n * (n + m);
    const Eigen::Index pr = prior_row_count(prior, d.time_kind, n, m, 1);
    Polytope P;
    P.G = Matrix::Zero(2 * n * Ts + pr, dim);
    P.h = Vector::Zero(2 * n * Ts + pr);
    Eigen::Index at = 0;
    if (Ts > 0) {
        Matrix coeff(n * Ts, dim);
        coeff.leftCols(n * n) = kron(Xs.transpose(), Matrix::Identity(n, n));
        coeff.rightCols(n * m) = kron(Us.transpose(), Matrix::Identity(n, n));
        append_data_faces(P.G, P.h, at, coeff, Xds, d.epsilon, 0);
    }
    append_prior_faces(P.G, P.h, at, prior, d.time_kind, n, m, 0, 1);
    return P;
}

ConsistencySet build_switched_consistency(const Dataset& d, const Prior& prior, int n_modes) {
    d.validate();
    require(d.switching.has_value(), "build_switched_consistency: no switching labels");
    require(n_modes >= 1, "build_switched_consistency: n_modes must be >= 1");
    for (int lbl : *d.switching)
        require(lbl >= 1 && lbl <= n_modes, "build_switched_consistency: label out of range");
    const auto n = d.n(), m = d.m();
    const Eigen::Index block = n * (n + m);

    ConsistencySet cs;
    cs.n = static_cast<int>(n);
    cs.m = static_cast<int>(m);
    cs.time_kind = d.time_kind;
    SwitchedVariant sv;
    sv.n_modes = n_modes;
    sv.m_s.assign(static_cast<std::size_t>(n_modes), static_cast<int>(m));
    cs.variant = sv;

    std::vector<Polytope> per_mode;
    Eigen::Index total_rows = 0;
    for (int s = 1; s <= n_modes; ++s) {
        per_mode.push_back(switched_mode_polytope(d, prior, s));
        total_rows += per_mode.back().faces();
        bool has_data = false;
        for (int lbl : *d.switching)
            if (lbl == s) has_data = true;
        if (!has_data) cs.modes_without_data.push_back(s);
    }
    cs.polytope.G = Matrix::Zero(total_rows, block * n_modes);
    cs.polytope.h = Vector::Zero(total_rows);
    Eigen::Index at = 0;
    for (int s = 0; s < n_modes; ++s) {
        const auto& P = per_mode[static_cast<std::size_t>(s)];
        cs.polytope.G.block(at, s * block, P.faces(), block) = P.G;
        cs.polytope.h.segment(at, P.faces()) = P.h;
        at += P.faces();
    }
    return cs;
}

ConsistencySet build_lpva_consistency(const Dataset& d, const Prior& prior, int L) {
    d.validate();
    require(d.theta.has_value(), "build_lpva_consistency: no parameter channel");
    require(d.theta->rows() == L, "build_lpva_consistency: L mismatch with theta rows");
    const auto n = d.n(), m = d.m(), T = d.T();
    const Eigen::Index dim = n * (L * n + m);
    const Eigen::Index pr = prior_row_count(prior, d.time_kind, n, m, L);

    // column t of the Khatri-Rao block is kron(theta(t), x(t)), matching the
    // stacked [a_1; ...; a_L; b] coordinate layout
    const Matrix XT = khatri_rao_col(*d.theta, d.X);  // (L n) x T
    Matrix coeff(n * T, dim);
    coeff.leftCols(L * n * n) = kron(XT.transpose(), Matrix::Identity(n, n));
    coeff.rightCols(n * m) = kron(d.U.transpose(), Matrix::Identity(n, n));

    ConsistencySet cs;
    cs.n = static_cast<int>(n);
    cs.m = static_cast<int>(m);
    cs.time_kind = d.time_kind;
    cs.variant = LpvaVariant{L};
    cs.polytope.G = Matrix::Zero(2 * n * T + pr, dim);
    cs.polytope.h = Vector::Zero(2 * n * T + pr);
    Eigen::Index at = 0;
    append_data_faces(cs.polytope.G, cs.polytope.h, at, coeff, d.Xdelta, d.epsilon, 0);
    append_prior_faces(cs.polytope.G, cs.polytope.h, at, prior, d.time_kind, n, m, 0, L);
    return cs;
}

namespace {

Vector uniform_vec(std::mt19937_64& rng, Eigen::Index len, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v(len);
    for (Eigen::Index i = 0; i < len; ++i) v(i) = u(rng);
    return v;
}

}  // namespace

Dataset generate_dataset(const PlantSingle& p, TimeKind tk, const GenOptions& o) {
    require(o.T >= 1, "generate_dataset: T must be >= 1");
    require(o.epsilon >= 0.0, "generate_dataset: negative epsilon");
    const auto n = p.A.rows(), m = p.B.cols();
    require(p.A.cols() == n && p.B.rows() == n, "generate_dataset: plant dimension mismatch");
    std::mt19937_64 rng(o.seed);

    Dataset d;
    d.time_kind = tk;
    d.epsilon = o.epsilon;
    d.X.resize(n, o.T);
    d.U.resize(m, o.T);
    d.Xdelta.resize(n, o.T);
    Vector x = uniform_vec(rng, n, 0.0, 1.0);
    for (int t = 0; t < o.T; ++t) {
        const Vector u = uniform_vec(rng, m, o.input_lo, o.input_hi);
        const Vector w = uniform_vec(rng, n, -o.epsilon, o.epsilon);
        const Vector deriv = p.A * x + p.B * u + w;
        d.X.col(t) = x;
        d.U.col(t) = u;
        if (tk == TimeKind::Discrete) {
            d.Xdelta.col(t) = deriv;
            x = deriv;
        } else {
            const Vector x_next = x + o.dt_sample * deriv;
            d.Xdelta.col(t) = o.finite_difference ? Vector((x_next - x) / o.dt_sample) : deriv;
            x = x_next;
        }
    }
    return d;
}

Dataset generate_dataset(const PlantSwitched& p, TimeKind tk, const GenOptions& o) {
    require(o.T >= 1, "generate_dataset: T must be >= 1");
    require(!p.A.empty() && p.A.size() == p.B.size(),
            "generate_dataset: switched plant needs matching A/B lists");
    const auto n = p.A[0].rows(), m = p.B[0].cols();
    std::mt19937_64 rng(o.seed);
    std::uniform_int_distribution<int> mode_draw(1, static_cast<int>(p.A.size()));

    Dataset d;
    d.time_kind = tk;
    d.epsilon = o.epsilon;
    d.X.resize(n, o.T);
    d.U.resize(m, o.T);
    d.Xdelta.resize(n, o.T);
    d.switching = std::vector<int>(static_cast<std::size_t>(o.T));
    Vector x = uniform_vec(rng, n, 0.0, 1.0);
    for (int t = 0; t < o.T; ++t) {
        const int s = mode_draw(rng);
        const auto& A = p.A[static_cast<std::size_t>(s - 1)];
        const auto& B = p.B[static_cast<std::size_t>(s - 1)];
        const Vector u = uniform_vec(rng, m, o.input_lo, o.input_hi);
        const Vector w = uniform_vec(rng, n, -o.epsilon, o.epsilon);
        const Vector deriv = A * x + B * u + w;
        d.X.col(t) = x;
        d.U.col(t) = u;
        (*d.switching)[static_cast<std::size_t>(t)] = s;
        if (tk == TimeKind::Discrete) {
            d.Xdelta.col(t) = deriv;
            x = deriv;
        } else {
            d.Xdelta.col(t) = deriv;
            x += o.dt_sample * deriv;
        }
    }
    return d;
}

Dataset generate_dataset(const PlantLpva& p, TimeKind tk, const GenOptions& o) {
    require(o.T >= 1, "generate_dataset: T must be >= 1");
    require(!p.A.empty(), "generate_dataset: LPVA plant needs at least one A matrix");
    const auto n = p.A[0].rows(), m = p.B.cols();
    const auto L = static_cast<Eigen::Index>(p.A.size());
    require(p.theta_lo.size() == L && p.theta_hi.size() == L,
            "generate_dataset: theta box size must match L");
    std::mt19937_64 rng(o.seed);

    Dataset d;
    d.time_kind = tk;
    d.epsilon = o.epsilon;
    d.X.resize(n, o.T);
    d.U.resize(m, o.T);
    d.Xdelta.resize(n, o.T);
    d.theta = Matrix(L, o.T);
    Vector x = uniform_vec(rng, n, 0.0, 1.0);
    for (int t = 0; t < o.T; ++t) {
        Vector th(L);
        for (Eigen::Index l = 0; l < L; ++l) {
            std::uniform_real_distribution<double> u(p.theta_lo(l), p.theta_hi(l));
            th(l) = p.theta_lo(l) == p.theta_hi(l) ? p.theta_lo(l) : u(rng);
        }
        Matrix Ath = Matrix::Zero(n, n);
        for (Eigen::Index l = 0; l < L; ++l) Ath += th(l) * p.A[static_cast<std::size_t>(l)];
        const Vector u = uniform_vec(rng, m, o.input_lo, o.input_hi);
        const Vector w = uniform_vec(rng, n, -o.epsilon, o.epsilon);
        const Vector deriv = Ath * x + p.B * u + w;
        d.X.col(t) = x;
        d.U.col(t) = u;
        d.theta->col(t) = th;
        if (tk == TimeKind::Discrete) {
            d.Xdelta.col(t) = deriv;
            x = deriv;
        } else {
            d.Xdelta.col(t) = deriv;
            x += o.dt_sample * deriv;
        }
    }
    return d;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_dataset_csv(std::ostream& os, const Dataset& d) {
    d.validate();
    const auto n = d.n(), m = d.m();
    os << "t";
    for (Eigen::Index i = 1; i <= n; ++i) os << ",x" << i;
    for (Eigen::Index i = 1; i <= m; ++i) os << ",u" << i;
    for (Eigen::Index i = 1; i <= n; ++i) os << ",dx" << i;
    if (d.switching) os << ",s";
    if (d.theta)
        for (Eigen::Index i = 1; i <= d.theta->rows(); ++i) os << ",th" << i;
    os << "\n";
    for (Eigen::Index t = 0; t < d.T(); ++t) {
        os << t;
        for (Eigen::Index i = 0; i < n; ++i) os << "," << fmt17(d.X(i, t));
        for (Eigen::Index i = 0; i < m; ++i) os << "," << fmt17(d.U(i, t));
        for (Eigen::Index i = 0; i < n; ++i) os << "," << fmt17(d.Xdelta(i, t));
        if (d.switching) os << "," << (*d.switching)[static_cast<std::size_t>(t)];
        if (d.theta)
            for (Eigen::Index i = 0; i < d.theta->rows(); ++i)
                os << "," << fmt17((*d.theta)(i, t));
        os << "\n";
    }
}

Dataset read_dataset_csv(std::istream& is, TimeKind tk, double epsilon) {
    std::string line;
    require(static_cast<bool>(std::getline(is, line)), "dataset csv: missing header");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) header.push_back(tok);
    }
    require(!header.empty() && header[0] == "t", "dataset csv: header must start with t");
    Eigen::Index n = 0, m = 0, L = 0;
    bool has_s = false;
    for (std::size_t i = 1; i < header.size(); ++i) {
        const auto& hn = header[i];
        if (hn.rfind("dx", 0) == 0)
            continue;  // counted via x columns
        else if (hn.rfind("th", 0) == 0)
            ++L;
        else if (hn[0] == 'x')
            ++n;
        else if (hn[0] == 'u')
            ++m;
        else if (hn == "s")
            has_s = true;
        else
            throw std::invalid_argument("dataset csv: unknown column " + hn);
    }
    require(n >= 1, "dataset csv: no state columns");
    const std::size_t expect = 1 + 2 * static_cast<std::size_t>(n) +
                               static_cast<std::size_t>(m) + (has_s ? 1 : 0) +
                               static_cast<std::size_t>(L);
    require(header.size() == expect, "dataset csv: header/column mismatch");

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> r;
        while (std::getline(ss, tok, ',')) r.push_back(std::stod(tok));
        require(r.size() == expect, "dataset csv: row width mismatch");
        rows.push_back(std::move(r));
    }
    const auto T = static_cast<Eigen::Index>(rows.size());
    require(T >= 1, "dataset csv: no samples");

    Dataset d;
    d.time_kind = tk;
    d.epsilon = epsilon;
    d.X.resize(n, T);
    d.U.resize(m, T);
    d.Xdelta.resize(n, T);
    if (has_s) d.switching = std::vector<int>(static_cast<std::size_t>(T));
    if (L > 0) d.theta = Matrix(L, T);
    for (Eigen::Index t = 0; t < T; ++t) {
        const auto& r = rows[static_cast<std::size_t>(t)];
        std::size_t at = 1;
        for (Eigen::Index i = 0; i < n; ++i) d.X(i, t) = r[at++];
        for (Eigen::Index i = 0; i < m; ++i) d.U(i, t) = r[at++];
        for (Eigen::Index i = 0; i < n; ++i) d.Xdelta(i, t) = r[at++];
        if (has_s) (*d.switching)[static_cast<std::size_t>(t)] = static_cast<int>(r[at++]);
        for (Eigen::Index i = 0; i < L; ++i) (*d.theta)(i, t) = r[at++];
    }
    d.validate();
    return d;
}

void write_dataset_csv_file(const std::string& path, const Dataset& d) {
    std::ofstream os(path);
    require(static_cast<bool>(os), "cannot open for writing: " + path);
    write_dataset_csv(os, d);
}

Dataset read_dataset_csv_file(const std::string& path, TimeKind tk, double epsilon) {
    std::ifstream is(path);
    require(static_cast<bool>(is), "cannot open dataset: " + path);
    return read_dataset_csv(is, tk, epsilon);
}

}  // namespace posdd
