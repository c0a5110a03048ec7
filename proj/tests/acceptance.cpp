// End-to-end acceptance checks for the posdd library: one pass/fail line per
// criterion, nonzero exit when any fails. Tolerances are pinned inline.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <random>
#include <vector>

#include "posdd/consistency.hpp"
#include "posdd/linalg.hpp"
#include "posdd/lp.hpp"
#include "posdd/polytope.hpp"
#include "posdd/simulate.hpp"
#include "posdd/synthesis.hpp"

using namespace posdd;

namespace {

int g_failures = 0;

void criterion(int id, const char* what, bool pass) {
    std::printf("[%s] %2d: %s\n", pass ? "PASS" : "FAIL", id, what);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- reference plants ----

Matrix plant3_A() {  // 3-state continuous benchmark, unstable, Metzler
    Matrix A(3, 3);
    A << -0.55, 0.3, 0.65, 0.06, -1.35, 0.25, 0.1, 0.15, 0.4;
    return A;
}
Matrix plant3_B() {
    Matrix B(3, 2);
    B << 0.18, 0.08, 0.47, 0.25, 0.07, 0.95;
    return B;
}
Matrix p2p_A() {  // stable Metzler plant for peak-to-peak studies
    Matrix A(3, 3);
    A << -0.2, 0.2, 0.2, 0.4, -0.7, 0.2, 0, 0.8, -3;
    return A;
}
Matrix p2p_B() {
    Matrix B(3, 2);
    B << -0.4, 0.5, 0.2, -0.8, -1, 2;
    return B;
}
ExtendedPlant p2p_ext() {  // z = [x; u], disturbance on the first two states
    ExtendedPlant e;
    e.C = Matrix::Zero(5, 3);
    e.C.topRows(3).setIdentity();
    e.D = Matrix::Zero(5, 2);
    e.D.bottomRows(2).setIdentity();
    e.E = Matrix::Zero(3, 2);
    e.E.topRows(2).setIdentity();
    e.F = Matrix::Zero(5, 2);
    return e;
}

Polytope random_bounded_polytope(Eigen::Index d, Eigen::Index extra, std::mt19937_64& rng,
                                 double scale) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Polytope P;
    P.G = Matrix(2 * d + extra, d);
    P.h = Vector(2 * d + extra);
    P.G.topRows(d) = Matrix::Identity(d, d);
    P.G.middleRows(d, d) = -Matrix::Identity(d, d);
    P.h.head(2 * d).setConstant(scale);
    for (Eigen::Index r = 2 * d; r < P.faces(); ++r) {
        for (Eigen::Index j = 0; j < d; ++j) P.G(r, j) = u(rng);
        P.h(r) = scale * (0.5 + std::abs(u(rng)));
    }
    return P;
}

// Direct vertex-enumeration synthesis oracle: the consistency set is contained
// in the stabilizing polytope iff every vertex is, which is one feasibility LP
// over (v, Y) with the same eta and variable bounds as the library route.
bool vertex_synthesis_feasible(const ConsistencySet& cs, double eta) {
    const Eigen::Index n = cs.n, m = cs.m;
    auto stab = stab_polytope_rows(n, m, cs.time_kind, eta);
    auto verts = enumerate_vertices(cs.polytope);
    const Eigen::Index nv = n + m * n;
    lp::LpProblem p = lp::LpProblem::make(nv);
    for (Eigen::Index i = 0; i < n; ++i) p.lower[static_cast<std::size_t>(i)] = eta;
    p.ineq_lhs = Matrix::Zero(stab.q * static_cast<Eigen::Index>(verts.size()), nv);
    p.ineq_rhs = Vector::Zero(p.ineq_lhs.rows());
    Eigen::Index row = 0;
    for (const auto& x : verts) {
        for (Eigen::Index r = 0; r < stab.q; ++r, ++row) {
            for (Eigen::Index i = 0; i < n; ++i)
                p.ineq_lhs(row, i) = stab.G2_dv[static_cast<std::size_t>(i)].row(r) * x -
                                     stab.h2_dv(r, i);
            for (Eigen::Index k = 0; k < m * n; ++k)
                p.ineq_lhs(row, n + k) =
                    stab.G2_dY[static_cast<std::size_t>(k)].row(r) * x - stab.h2_dY(r, k);
            p.ineq_rhs(row) = stab.h2_const(r) - stab.G2_const.row(r) * x;
        }
    }
    return lp::solve_feasibility(p).status == lp::LpStatus::Optimal;
}

// ---- criteria ----

void c1_nominal_p2p() {
    const auto t0 = std::chrono::steady_clock::now();
    SynthesisOptions o;
    auto [g_open, r_open] = nominal_p2p(p2p_A(), p2p_B(), p2p_ext(), TimeKind::Continuous,
                                        o, Matrix(Matrix::Zero(2, 3)));
    auto [g_ctrl, r_ctrl] =
        nominal_p2p(p2p_A(), p2p_B(), p2p_ext(), TimeKind::Continuous, o);
    const double dt = seconds_since(t0);
    criterion(1, "nominal peak-to-peak gains 32.178 +/- 0.05 and 3.742 +/- 0.01, < 1 s",
              r_open.status == SynthStatus::Feasible &&
                  r_ctrl.status == SynthStatus::Feasible &&
                  std::abs(g_open - 32.178) <= 0.05 && std::abs(g_ctrl - 3.742) <= 0.01 &&
                  dt < 1.0);
}

void c2_poles() {
    auto eig = eigenvalues(plant3_A());
    std::vector<double> re;
    for (const auto& z : eig) re.push_back(z.real());
    std::sort(re.begin(), re.end());
    const bool poles_ok = eig.size() == 3 && std::abs(re[0] + 1.3851) <= 1e-3 &&
                          std::abs(re[1] + 0.6055) <= 1e-3 &&
                          std::abs(re[2] - 0.4907) <= 1e-3;
    Matrix A1(2, 2), A2(2, 2), A3(2, 2);
    A1 << -0.9190, 0.5555, 0.4936, -0.5761;
    A2 << -1.2653, 0.0574, 0.2981, 0.2455;
    A3 << 0.9328, 0.5702, 0.0636, -1.0487;
    const double worst = spectral_abscissa(A1 - A2 + 0.9 * A3);
    criterion(2, "open-loop eigenvalues match references within 1e-3",
              poles_ok && std::abs(worst - 1.2700) <= 1e-3);
}

void c3_printed_certificates() {
    Vector v3(3);
    v3 << 0.5570, 0.1401, 0.3029;
    Matrix K3(2, 3);
    K3 << 0.0279, -0.2660, 0.5041, 0.0107, -0.0222, -0.8650;
    bool ok = verify_controller({{plant3_A(), plant3_B()}}, v3, K3,
                                TimeKind::Continuous, 1e-3)
                  .pass;

    Matrix A1(2, 2), A2(2, 2), A3(2, 2), B(2, 2);
    A1 << -0.9190, 0.5555, 0.4936, -0.5761;
    A2 << -1.2653, 0.0574, 0.2981, 0.2455;
    A3 << 0.9328, 0.5702, 0.0636, -1.0487;
    B << 0.4570, 0.2828, 0.2115, 0.8863;
    Vector v2(2);
    v2 << 0.4482, 0.5518;
    const double w2[4] = {-1, -1, 1, 1}, w3[4] = {-0.5, 0.9, -0.5, 0.9};
    std::vector<Matrix> K(4, Matrix(2, 2));
    K[0] << -14.2950, 9.9057, 6.2326, -5.8745;
    K[1] << -20.8043, 9.7975, 8.5165, -6.9282;
    K[2] << -6.9969, 6.5542, 2.5340, -4.3078;
    K[3] << -5.2847, 2.3813, 2.0480, -2.3017;
    for (int c = 0; c < 4; ++c) {
        Matrix Aw = A1 + w2[c] * A2 + w3[c] * A3;
        ok = ok && verify_controller({{Aw, B}}, v2, K[c], TimeKind::Continuous, 1e-3).pass;
    }
    criterion(3, "published certificates verify against their ground-truth plants", ok);
}

void c4_end_to_end_ct() {
    const auto t0 = std::chrono::steady_clock::now();
    PlantSingle p{plant3_A(), plant3_B()};
    GenOptions g;
    g.T = 5;
    g.epsilon = 0.1;
    g.seed = 7;
    Dataset d = generate_dataset(p, TimeKind::Continuous, g);
    auto cs = build_consistency(d, Prior{true, true});
    SynthesisOptions o;  // eta = 1e-3
    auto res = synthesize_stabilizing(cs, o);
    bool ok = res.status == SynthStatus::Feasible;
    if (ok) {
        const Matrix Acl = p.A + p.B * res.K;
        ok = is_metzler(Acl, 1e-9) && spectral_abscissa(Acl) < 0.0;
        std::vector<std::pair<Matrix, Matrix>> plants;
        for (const auto& x : sample_interior(cs.polytope, 100, 2)) {
            Matrix A, B;
            unpack_plant(x, 3, 2, A, B);
            plants.emplace_back(A, B);
        }
        ok = ok && verify_controller(plants, res.v, res.K, TimeKind::Continuous, o.eta).pass;
        EnsembleOptions eo;
        eo.t_end = 10.0;
        auto trajs = ensemble(cs, res.K, res.v, Vector::Ones(3), 100, 2, eo);
        ok = ok && max_lyapunov_increase(trajs) <= 1e-6;
    }
    criterion(4,
              "noisy 5-sample synthesis stabilizes truth and 100 sampled plants, < 10 s",
              ok && seconds_since(t0) < 10.0);
}

void c5_farkas_oracle() {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int agree = 0, contained = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index d = 2 + trial % 3;
        Polytope P1 = random_bounded_polytope(d, 3, rng, 1.0);
        Polytope P2 = random_bounded_polytope(d, 3, rng, 1.0 + 0.8 * u(rng));
        auto cert = check_containment_farkas(P1, P2);
        auto verts = enumerate_vertices(P1);
        const bool oracle = std::all_of(verts.begin(), verts.end(), [&](const Vector& v) {
            return contains_point(P2, v, 1e-7);
        });
        if (cert.contained == oracle) ++agree;
        if (oracle) ++contained;
    }
    criterion(5, "Farkas containment agrees with the vertex oracle on 200/200 pairs",
              agree == 200 && contained > 10 && contained < 190);
}

void c6_synthesis_exactness() {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int agree = 0, feas = 0;
    const double eta = 1e-3;
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 1 + trial % 3;  // plant-vector dimension 1*(1+m) <= 4
        PlantSingle p;
        p.A = Matrix::Constant(1, 1, u(rng));
        p.B = Matrix(1, m);
        for (int j = 0; j < m; ++j) p.B(0, j) = 0.5 * u(rng);
        const TimeKind tk = trial % 2 ? TimeKind::Discrete : TimeKind::Continuous;
        GenOptions g;
        g.T = 8;
        g.epsilon = trial % 5 < 2 ? 0.6 : 0.05;
        g.seed = 1000 + static_cast<std::uint64_t>(trial);
        auto cs = build_consistency(generate_dataset(p, tk, g), Prior{});
        SynthesisOptions o;
        o.eta = eta;
        const bool farkas = synthesize_stabilizing(cs, o).status == SynthStatus::Feasible;
        const bool oracle = vertex_synthesis_feasible(cs, eta);
        if (farkas == oracle) ++agree;
        if (oracle) ++feas;
    }
    criterion(6, "robust synthesis feasibility matches vertex enumeration on 50/50 sets",
              agree == 50 && feas > 5 && feas < 45);
}

void c7_lp_correctness() {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    bool ok = true;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index d = 2 + trial % 3;
        Polytope P = random_bounded_polytope(d, 4, rng, 1.0);
        Vector c(d);
        for (Eigen::Index j = 0; j < d; ++j) c(j) = u(rng);
        lp::LpProblem p = lp::LpProblem::make(d);
        p.objective = c;
        p.ineq_lhs = P.G;
        p.ineq_rhs = P.h;
        auto sol = lp::solve(p);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& v : enumerate_vertices(P)) best = std::min(best, c.dot(v));
        ok = ok && sol.status == lp::LpStatus::Optimal &&
             std::abs(sol.objective_value - best) <= 1e-6;
    }
    // degenerate instance that cycles under naive Dantzig pricing
    lp::LpProblem p = lp::LpProblem::make(4);
    p.objective << -0.75, 150.0, -0.02, 6.0;
    p.lower = {0.0, 0.0, 0.0, 0.0};
    Vector r1(4), r2(4), r3(4);
    r1 << 0.25, -60.0, -1.0 / 25.0, 9.0;
    r2 << 0.5, -90.0, -1.0 / 50.0, 3.0;
    r3 << 0.0, 0.0, 1.0, 0.0;
    p.add_ineq_row(r1, 0.0);
    p.add_ineq_row(r2, 0.0);
    p.add_ineq_row(r3, 1.0);
    auto sol = lp::solve(p);
    ok = ok && sol.status == lp::LpStatus::Optimal &&
         std::abs(sol.objective_value + 0.05) <= 1e-9;
    criterion(7, "simplex matches vertex-enumeration optima; cycling instance terminates",
              ok);
}

void c8_p2p_monotone() {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    PlantSingle p{p2p_A(), p2p_B()};
    SynthesisOptions o;
    GenOptions g;
    g.T = 120;
    g.epsilon = 0.1;
    g.seed = 30;
    Dataset full = generate_dataset(p, TimeKind::Continuous, g);
    bool ok = true;
    double prev_m = kInf, prev_n = kInf;
    for (int T : {20, 30, 50, 80, 120}) {
        Dataset d = full;
        d.X = full.X.leftCols(T);
        d.U = full.U.leftCols(T);
        d.Xdelta = full.Xdelta.leftCols(T);
        auto [gm, rm] = synthesize_p2p(build_consistency(d, Prior{true, false}), p2p_ext(), o);
        auto [gn, rn] = synthesize_p2p(build_consistency(d, Prior{false, false}), p2p_ext(), o);
        // infeasible => gamma* = +inf (infimum over an empty set)
        const double vm = rm.status == SynthStatus::Feasible ? gm : kInf;
        const double vn = rn.status == SynthStatus::Feasible ? gn : kInf;
        ok = ok && vm < kInf && vm <= prev_m + 1e-9 && vn <= prev_n + 1e-9 &&
             vm <= vn + 1e-9 && vm >= 3.742 - 0.01;
        prev_m = vm;
        prev_n = vn;
    }
    GenOptions ge;
    ge.T = 30;
    ge.epsilon = 0.0;
    ge.seed = 30;
    Dataset exact = generate_dataset(p, TimeKind::Continuous, ge);
    auto [gx, rx] = synthesize_p2p(build_consistency(exact, Prior{true, false}), p2p_ext(), o);
    ok = ok && rx.status == SynthStatus::Feasible && std::abs(gx - 3.742) <= 0.02;
    criterion(8, "gamma* non-increasing in T, prior helps, floor 3.742; exact data hits it",
              ok);
}

void c9_sign_pattern() {
    Matrix A(3, 3), B(3, 2);
    A << 0.6, 0.3, 0.2, 0.1, 0.7, 0.3, 0.2, 0.2, 0.8;
    B << 1, 0, 0.2, 0.3, 0, 1;
    PlantSingle p{A, B};
    GenOptions g;
    g.T = 60;
    g.epsilon = 0.1;
    g.seed = 100;
    auto cs = build_consistency(generate_dataset(p, TimeKind::Discrete, g), Prior{true, true});
    SynthesisOptions o;
    SignPattern sp;
    sp.m = 2;
    sp.n = 3;
    sp.cells = {Sign::Zero,         Sign::NonPos, Sign::Unrestricted,
                Sign::Unrestricted, Sign::Zero,   Sign::NonNeg};
    o.sign_pattern = sp;
    auto res = synthesize_stabilizing(cs, o);
    criterion(9, "discrete-time gain honors its sign pattern exactly",
              res.status == SynthStatus::Feasible && res.K(0, 0) == 0.0 &&
                  res.K(1, 1) == 0.0 && res.K(0, 1) <= 0.0 && res.K(1, 2) >= -1e-9 &&
                  res.verification.pass);
}

void c10_face_count() {
    PlantSingle p{plant3_A(), plant3_B()};
    GenOptions g;
    g.T = 50;
    g.epsilon = 0.1;
    g.seed = 3;
    auto cs = build_consistency(generate_dataset(p, TimeKind::Continuous, g),
                                Prior{true, false});
    // 2nT data faces plus n(n-1) Metzler prior faces: 300 + 6
    criterion(10, "Metzler-prior consistency polytope has exactly 306 faces",
              cs.polytope.faces() == 306);
}

void c11_switched_lpv() {
    PlantSwitched ps;
    ps.A = {plant3_A(), Matrix(3, 3)};
    ps.A[1] << 0.1, 0.1, 0.1, 0.1, -1.9, 0.15, 0.1, 0.1, 0.6;
    ps.B = {plant3_B(), Matrix(3, 2)};
    ps.B[1] << 1, 0, 0, 0, 0, 1;
    GenOptions g;
    g.T = 100;
    g.epsilon = 0.01;
    g.seed = 1;
    Dataset d = generate_dataset(ps, TimeKind::Continuous, g);
    auto cs = build_switched_consistency(d, Prior{true, true}, 2);
    SynthesisOptions o;
    o.normalize_v = true;
    auto common = synthesize_switched_common(cs, o);
    auto per = synthesize_switched_per_mode(cs, o);
    bool ok = common.status != SynthStatus::Feasible ||
              per[0].status == SynthStatus::Feasible;  // restriction property
    ok = ok && common.status == SynthStatus::Feasible;

    PlantLpva pl;
    pl.A = {Matrix(2, 2), Matrix(2, 2), Matrix(2, 2)};
    pl.A[0] << -0.9190, 0.5555, 0.4936, -0.5761;
    pl.A[1] << -1.2653, 0.0574, 0.2981, 0.2455;
    pl.A[2] << 0.9328, 0.5702, 0.0636, -1.0487;
    pl.B = Matrix(2, 2);
    pl.B << 0.4570, 0.2828, 0.2115, 0.8863;
    pl.theta_lo = Vector(3);
    pl.theta_lo << 1, -1, -0.5;
    pl.theta_hi = Vector(3);
    pl.theta_hi << 1, 1, 0.9;
    GenOptions gl;
    gl.T = 60;
    gl.epsilon = 0.02;
    gl.seed = 12;
    auto csl = build_lpva_consistency(generate_dataset(pl, TimeKind::Continuous, gl),
                                      Prior{false, false}, 3);
    auto vx = [](double a, double b) {
        Vector w(3);
        w << 1, a, b;
        return w;
    };
    std::vector<Vector> omega = {vx(-1, -0.5), vx(-1, 0.9), vx(1, -0.5), vx(1, 0.9)};
    auto res = synthesize_lpva(csl, omega, o);
    ok = ok && res.status == SynthStatus::Feasible;
    if (res.status == SynthStatus::Feasible) {
        ThetaProcess tp;
        tp.lo = pl.theta_lo;
        tp.hi = pl.theta_hi;
        tp.seed = 3;
        Vector x0(2);
        x0 << 0.5, 1.5;
        auto tr = simulate_lpv(pl.A, pl.B, omega, res.gains, x0, 20.0, tp, 0.01);
        ok = ok && tr.states.col(tr.samples() - 1).norm() < 0.01;
    }
    criterion(11, "per-mode synthesis inherits common feasibility; scheduled loop decays",
              ok);
}

}  // namespace

int main() {
    c1_nominal_p2p();
    c2_poles();
    c3_printed_certificates();
    c4_end_to_end_ct();
    c5_farkas_oracle();
    c6_synthesis_exactness();
    c7_lp_correctness();
    c8_p2p_monotone();
    c9_sign_pattern();
    c10_face_count();
    c11_switched_lpv();
    std::printf("%s (%d of 11 criteria failed)\n", g_failures ? "FAILURE" : "SUCCESS",
                g_failures);
    return g_failures ? 1 : 0;
}
