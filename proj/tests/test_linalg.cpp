#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "posdd/linalg.hpp"

using namespace posdd;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Matrix M(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) M(i, j) = u(rng);
    return M;
}

}  // namespace

TEST_CASE("kron basics") {
    Matrix A(2, 2), B(2, 2);
    A << 1, 2, 3, 4;
    B << 0, 1, 1, 0;
    Matrix K = kron(A, B);
    CHECK(K.rows() == 4);
    CHECK(K(0, 1) == doctest::Approx(1.0));
    CHECK(K(0, 3) == doctest::Approx(2.0));
    CHECK(K(2, 1) == doctest::Approx(3.0));

    // mixed-product identity (W' kron U) vec(V) = vec(U V W)
    std::mt19937_64 rng(7);
    Matrix U = random_matrix(3, 2, rng), V = random_matrix(2, 4, rng),
           W = random_matrix(4, 3, rng);
    Vector lhs = kron(W.transpose(), U) * vec(V);
    Vector rhs = vec(Matrix(U * V * W));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("khatri_rao_col columnwise kron") {
    std::mt19937_64 rng(11);
    Matrix M1 = random_matrix(2, 3, rng), M2 = random_matrix(4, 3, rng);
    Matrix KR = khatri_rao_col(M1, M2);
    REQUIRE(KR.rows() == 8);
    for (Eigen::Index j = 0; j < 3; ++j) {
        Vector expect = kron(M1.col(j), M2.col(j));
        CHECK((KR.col(j) - expect).cwiseAbs().maxCoeff() ==
              doctest::Approx(0.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(khatri_rao_col(M1, random_matrix(2, 4, rng)), std::invalid_argument);
}

TEST_CASE("vec/unvec round trip, column-major") {
    Matrix M(2, 2);
    M << 1, 3, 2, 4;
    Vector v = vec(M);
    CHECK(v(0) == 1);
    CHECK(v(1) == 2);
    CHECK(v(2) == 3);
    CHECK(v(3) == 4);
    CHECK((unvec(v, 2, 2) - M).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(unvec(v, 3, 2), std::invalid_argument);
}

TEST_CASE("metzler index matrix selects off-diagonal vec entries") {
    Matrix M2 = metzler_index_matrix(2);
    Matrix X(2, 2);
    X << 1, 3, 2, 4;
    Vector sel = M2 * vec(X);
    REQUIRE(sel.size() == 2);
    CHECK(sel(0) == 2);
    CHECK(sel(1) == 3);
    CHECK(metzler_index_matrix(3).rows() == 6);
    CHECK((metzler_index_matrix(3).rowwise().sum().array() == 1.0).all());
}

TEST_CASE("metzler / nonnegative predicates") {
    Matrix A(2, 2);
    A << -5, 0.1, 0.2, -3;
    CHECK(is_metzler(A));
    CHECK_FALSE(is_nonnegative(A));
    A(0, 1) = -1e-3;
    CHECK_FALSE(is_metzler(A));
    A(0, 1) = -1e-15;  // within tolerance
    CHECK(is_metzler(A));
}

TEST_CASE("eigenvalues of a known matrix") {
    Matrix A(3, 3);
    A << -0.55, 0.3, 0.65, 0.06, -1.35, 0.25, 0.1, 0.15, 0.4;
    auto ev = eigenvalues(A);
    std::vector<double> re;
    for (auto& l : ev) {
        CHECK(std::abs(l.imag()) < 1e-9);
        re.push_back(l.real());
    }
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(-1.3851).epsilon(1e-3));
    CHECK(re[1] == doctest::Approx(-0.6055).epsilon(1e-3));
    CHECK(re[2] == doctest::Approx(0.4907).epsilon(1e-3));
    CHECK(spectral_abscissa(A) == doctest::Approx(0.4907).epsilon(1e-3));
}

TEST_CASE("stability report and DLCLF vector") {
    Matrix A(2, 2);
    A << -2, 0.5, 0.3, -1;
    auto rep = check_positive_stability(A, TimeKind::Continuous);
    CHECK(rep.is_metzler);
    CHECK(rep.is_hurwitz);
    REQUIRE(rep.dlclf_vector.has_value());
    Vector v = *rep.dlclf_vector;
    CHECK((v.array() > 0).all());
    CHECK(((A * v).array() < 0).all());
    // C1 equivalence: positive leading minors of -A
    CHECK(principal_minors_positive(A, TimeKind::Continuous));

    Matrix Ad(2, 2);
    Ad << 0.5, 0.2, 0.1, 0.6;
    auto repd = check_positive_stability(Ad, TimeKind::Discrete);
    CHECK(repd.is_nonnegative);
    CHECK(repd.is_schur);
    REQUIRE(repd.dlclf_vector.has_value());
    CHECK(((Ad * *repd.dlclf_vector).array() < repd.dlclf_vector->array()).all());
    CHECK(principal_minors_positive(Ad, TimeKind::Discrete));

    // unstable positive system: no DLCLF, minors fail
    Matrix Au(2, 2);
    Au << 0.1, 1.2, 1.1, 0.1;
    auto repu = check_positive_stability(Au, TimeKind::Continuous);
    CHECK_FALSE(repu.dlclf_vector.has_value());
    CHECK_FALSE(principal_minors_positive(Au, TimeKind::Continuous));
}

TEST_CASE("randomized C1 <-> C4 equivalence for Metzler matrices") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> off(0.0, 1.0), diag(-3.0, 1.0);
    int stable_seen = 0, unstable_seen = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(trial % 3);
        Matrix A(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i) A(i, j) = (i == j) ? diag(rng) : off(rng);
        const bool hurwitz = spectral_abscissa(A) < -1e-6;
        if (spectral_abscissa(A) > -1e-6 && spectral_abscissa(A) < 1e-6) continue;
        CHECK(principal_minors_positive(A, TimeKind::Continuous) == hurwitz);
        auto rep = check_positive_stability(A, TimeKind::Continuous);
        CHECK(rep.dlclf_vector.has_value() == hurwitz);
        (hurwitz ? stable_seen : unstable_seen)++;
    }
    CHECK(stable_seen > 10);
    CHECK(unstable_seen > 10);
}
