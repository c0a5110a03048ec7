#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "posdd/linalg.hpp"
#include "posdd/simulate.hpp"
#include "posdd/synthesis.hpp"

using namespace posdd;

namespace {

Matrix A24() {
    Matrix A(3, 3);
    A << -0.55, 0.3, 0.65, 0.06, -1.35, 0.25, 0.1, 0.15, 0.4;
    return A;
}
Matrix B24() {
    Matrix B(3, 2);
    B << 0.18, 0.08, 0.47, 0.25, 0.07, 0.95;
    return B;
}

}  // namespace

TEST_CASE("RK4 matches the scalar exponential at fourth order") {
    Matrix A(1, 1), B(1, 1), K(1, 1);
    A << -1.0;
    B << 0.0;
    K << 0.0;
    Vector x0(1);
    x0 << 1.0;
    auto coarse = simulate_ct(A, B, K, x0, 1.0, 0.1);
    auto fine = simulate_ct(A, B, K, x0, 1.0, 0.05);
    const double exact = std::exp(-1.0);
    const double e_coarse = std::abs(coarse.states(0, coarse.samples() - 1) - exact);
    const double e_fine = std::abs(fine.states(0, fine.samples() - 1) - exact);
    CHECK(e_coarse < 1e-6);
    // halving dt should shrink the error by about 2^4
    CHECK(e_fine < e_coarse / 12.0);
}

TEST_CASE("discrete iteration is exact") {
    Matrix A(2, 2), B = Matrix::Zero(2, 1), K = Matrix::Zero(1, 2);
    A << 0.5, 0.1, 0.2, 0.4;
    Vector x0(2);
    x0 << 1, 2;
    auto tr = simulate_dt(A, B, K, x0, 3);
    REQUIRE(tr.samples() == 4);
    Vector expect = A * A * A * x0;
    CHECK((tr.states.col(3) - expect).cwiseAbs().maxCoeff() ==
          doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("positivity closure and Lyapunov monotonicity on a certified loop") {
    SynthesisOptions o;
    o.normalize_v = true;
    auto res = nominal_stabilize(A24(), B24(), TimeKind::Continuous, o);
    REQUIRE(res.status == SynthStatus::Feasible);
    Vector x0(3);
    x0 << 0.5, 1.5, 1.0;
    auto tr = simulate_ct(A24(), B24(), res.K, x0, 20.0, 0.01);
    CHECK(tr.states.minCoeff() >= -1e-9);
    Vector V = lyapunov_trace(tr, res.v);
    for (Eigen::Index k = 0; k + 1 < V.size(); ++k)
        CHECK(V(k + 1) <= V(k) + kLyapunovSlack);
    CHECK(V(V.size() - 1) < V(0));
}

TEST_CASE("divergence guard fires on an unstable loop") {
    Matrix A(1, 1), B = Matrix::Zero(1, 1), K = Matrix::Zero(1, 1);
    A << 5.0;
    Vector x0(1);
    x0 << 1.0;
    CHECK_THROWS_AS(simulate_ct(A, B, K, x0, 20.0, 0.01), numerical_error);
}

TEST_CASE("switched simulation: determinism, labels, single-mode degeneracy") {
    Matrix A2(3, 3), B2(3, 2);
    A2 << 0.1, 0.1, 0.1, 0.1, -1.9, 0.15, 0.1, 0.1, 0.6;
    B2 << 1, 0, 0, 0, 0, 1;
    Matrix K(2, 3);
    K << -0.5, -0.3, -0.2, -0.1, -0.2, -1.0;
    Vector x0(3);
    x0 << 0.5, 1.5, 1.0;
    SwitchingProcess proc;
    proc.n_modes = 2;
    proc.seed = 5;
    auto t1 = simulate_switched({A24(), A2}, {B24(), B2}, {K}, x0, 5.0, proc, 0.01);
    auto t2 = simulate_switched({A24(), A2}, {B24(), B2}, {K}, x0, 5.0, proc, 0.01);
    CHECK((t1.states - t2.states).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(t1.modes.has_value());
    bool saw2 = false;
    for (int s : *t1.modes) {
        CHECK((s == 1 || s == 2));
        if (s == 2) saw2 = true;
    }
    CHECK(saw2);

    SwitchingProcess one;
    one.n_modes = 1;
    one.seed = 5;
    auto single = simulate_switched({A24()}, {B24()}, {K}, x0, 5.0, one, 0.01);
    auto plain = simulate_ct(A24(), B24(), K, x0, 5.0, 0.01);
    CHECK((single.states - plain.states).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("common DLCLF keeps V non-increasing across switches") {
    PlantSwitched p;
    p.A = {A24(), Matrix(3, 3)};
    p.A[1] << 0.1, 0.1, 0.1, 0.1, -1.9, 0.15, 0.1, 0.1, 0.6;
    p.B = {B24(), Matrix(3, 2)};
    p.B[1] << 1, 0, 0, 0, 0, 1;
    GenOptions g;
    g.T = 100;
    g.epsilon = 0.01;
    g.seed = 1;
    Dataset d = generate_dataset(p, TimeKind::Continuous, g);
    auto cs = build_switched_consistency(d, Prior{true, true}, 2);
    SynthesisOptions o;
    o.normalize_v = true;
    auto res = synthesize_switched_common(cs, o);
    REQUIRE(res.status == SynthStatus::Feasible);
    Vector x0(3);
    x0 << 0.5, 1.5, 1.0;
    SwitchingProcess proc;
    proc.n_modes = 2;
    proc.mean_dwell = 0.3;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        proc.seed = seed;
        auto tr = simulate_switched(p.A, p.B, {res.K}, x0, 10.0, proc, 0.01);
        Vector V = lyapunov_trace(tr, res.v);
        for (Eigen::Index k = 0; k + 1 < V.size(); ++k)
            CHECK(V(k + 1) <= V(k) + kLyapunovSlack);
    }
}

TEST_CASE("lpv simulation schedules gains and decays") {
    std::vector<Matrix> A_l(3, Matrix(2, 2));
    A_l[0] << -0.9190, 0.5555, 0.4936, -0.5761;
    A_l[1] << -1.2653, 0.0574, 0.2981, 0.2455;
    A_l[2] << 0.9328, 0.5702, 0.0636, -1.0487;
    Matrix B(2, 2);
    B << 0.4570, 0.2828, 0.2115, 0.8863;
    auto vx = [](double a, double b) {
        Vector w(3);
        w << 1, a, b;
        return w;
    };
    std::vector<Vector> omega = {vx(-1, -0.5), vx(-1, 0.9), vx(1, -0.5), vx(1, 0.9)};
    std::vector<Matrix> gains(4, Matrix(2, 2));
    gains[0] << -14.2950, 9.9057, 6.2326, -5.8745;
    gains[1] << -20.8043, 9.7975, 8.5165, -6.9282;
    gains[2] << -6.9969, 6.5542, 2.5340, -4.3078;
    gains[3] << -5.2847, 2.3813, 2.0480, -2.3017;
    ThetaProcess tp;
    tp.lo = vx(-1, -0.5);
    tp.hi = vx(1, 0.9);
    tp.seed = 3;
    Vector x0(2);
    x0 << 0.5, 1.5;
    auto tr = simulate_lpv(A_l, B, omega, gains, x0, 20.0, tp, 0.01);
    REQUIRE(tr.thetas.has_value());
    CHECK(tr.thetas->row(0).minCoeff() == 1.0);
    CHECK(tr.thetas->row(1).minCoeff() >= -1.0);
    CHECK(tr.thetas->row(2).maxCoeff() <= 0.9);
    CHECK(tr.states.col(tr.samples() - 1).norm() < 0.01);

    // constant theta pinned at a vertex reproduces the plain closed loop
    ThetaProcess fixed;
    fixed.lo = omega[3];
    fixed.hi = omega[3];
    fixed.seed = 1;
    auto at_vertex = simulate_lpv(A_l, B, omega, gains, x0, 2.0, fixed, 0.01);
    Matrix Ac = A_l[0] + A_l[1] + 0.9 * A_l[2];
    auto plain = simulate_ct(Ac, B, gains[3], x0, 2.0, 0.01);
    CHECK((at_vertex.states - plain.states).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("ensemble: determinism, parallel/serial equality, Lyapunov bound") {
    PlantSingle p{A24(), B24()};
    GenOptions g;
    g.T = 5;
    g.epsilon = 0.1;
    g.seed = 7;
    Dataset d = generate_dataset(p, TimeKind::Continuous, g);
    auto cs = build_consistency(d, Prior{true, true});
    SynthesisOptions o;
    o.normalize_v = true;
    auto res = synthesize_stabilizing(cs, o);
    REQUIRE(res.status == SynthStatus::Feasible);
    Vector x0(3);
    x0 << 0.5, 1.5, 1.0;
    EnsembleOptions eo;
    eo.t_end = 10.0;
    auto par = ensemble(cs, res.K, res.v, x0, 20, 42, eo);
    auto ser = ensemble_serial(cs, res.K, res.v, x0, 20, 42, eo);
    REQUIRE(par.size() == 20);
    REQUIRE(ser.size() == 20);
    for (std::size_t i = 0; i < par.size(); ++i)
        CHECK((par[i].states - ser[i].states).cwiseAbs().maxCoeff() == 0.0);
    CHECK(max_lyapunov_increase(par) <= kLyapunovSlack);
    CHECK(ensemble(cs, res.K, res.v, x0, 0, 1, eo).empty());
}

TEST_CASE("trajectory csv export") {
    Matrix A(2, 2), B = Matrix::Zero(2, 1), K = Matrix::Zero(1, 2);
    A << -1, 0.1, 0.1, -1;
    Vector x0(2);
    x0 << 1, 1;
    auto tr = simulate_ct(A, B, K, x0, 0.1, 0.05);
    Vector v(2);
    v << 1, 1;
    tr.lyapunov = lyapunov_trace(tr, v);
    const std::string path = "traj_test.csv";
    write_trajectory_csv(path, tr);
    std::ifstream f(path);
    std::string header;
    std::getline(f, header);
    CHECK(header == "t,x1,x2,V");
    int rows = 0;
    std::string line;
    while (std::getline(f, line))
        if (!line.empty()) ++rows;
    CHECK(rows == tr.samples());
    std::remove(path.c_str());
}
