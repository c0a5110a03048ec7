#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "posdd/polytope.hpp"

using namespace posdd;

namespace {

Polytope box(Eigen::Index d, double lo, double hi) {
    Polytope P;
    P.G = Matrix::Zero(2 * d, d);
    P.h = Vector::Zero(2 * d);
    for (Eigen::Index j = 0; j < d; ++j) {
        P.G(2 * j, j) = 1.0;
        P.h(2 * j) = hi;
        P.G(2 * j + 1, j) = -1.0;
        P.h(2 * j + 1) = -lo;
    }
    return P;
}

Polytope simplex2() {
    // x >= 0, y >= 0, x + y <= 1
    Polytope P;
    P.G = Matrix(3, 2);
    P.G << -1, 0, 0, -1, 1, 1;
    P.h = Vector(3);
    P.h << 0, 0, 1;
    return P;
}

bool has_vertex(const std::vector<Vector>& verts, const Vector& v, double tol = 1e-7) {
    return std::any_of(verts.begin(), verts.end(), [&](const Vector& w) {
        return (w - v).cwiseAbs().maxCoeff() <= tol;
    });
}

}  // namespace

TEST_CASE("containment and Chebyshev center of the unit box") {
    Polytope P = box(3, -1.0, 1.0);
    CHECK(contains_point(P, Vector::Zero(3)));
    CHECK_FALSE(contains_point(P, Vector::Constant(3, 1.5)));
    auto ch = chebyshev_center(P);
    CHECK_FALSE(ch.radius_unbounded);
    CHECK(ch.radius == doctest::Approx(1.0));
    CHECK(ch.center.cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("Chebyshev radius of the right-triangle simplex") {
    auto ch = chebyshev_center(simplex2());
    CHECK(ch.radius == doctest::Approx(1.0 / (2.0 + std::sqrt(2.0))).epsilon(1e-8));
}

TEST_CASE("Chebyshev on an unbounded set reports an unbounded radius") {
    Polytope P;  // x >= 0 only
    P.G = Matrix(1, 1);
    P.G << -1;
    P.h = Vector(1);
    P.h << 0;
    auto ch = chebyshev_center(P);
    CHECK(ch.radius_unbounded);
}

TEST_CASE("empty polytope throws") {
    Polytope P;
    P.G = Matrix(2, 1);
    P.G << 1, -1;
    P.h = Vector(2);
    P.h << -1, -1;  // x <= -1 and x >= 1
    CHECK_THROWS_AS(chebyshev_center(P), std::invalid_argument);
}

TEST_CASE("redundant face removal") {
    Polytope P = box(2, 0.0, 1.0);
    // add a loose face, a duplicated face and a tangent face
    Polytope Q;
    Q.G = Matrix(P.faces() + 3, 2);
    Q.h = Vector(P.faces() + 3);
    Q.G.topRows(P.faces()) = P.G;
    Q.h.head(P.faces()) = P.h;
    Q.G.row(4) << 1, 1;
    Q.h(4) = 5.0;  // loose
    Q.G.row(5) << 1, 0;
    Q.h(5) = 1.0;  // duplicate of face 0
    Q.G.row(6) << 1, 1;
    Q.h(6) = 2.0;  // tangent at the corner, still redundant
    auto [R, kept] = remove_redundant_faces(Q);
    CHECK(R.faces() == 4);
    for (const auto& pt : {Vector(Vector::Zero(2)), Vector(Vector::Ones(2))})
        CHECK(contains_point(R, pt));
    // the kept faces describe the same set: corners remain vertices
    auto verts = enumerate_vertices(R);
    CHECK(verts.size() == 4);

    auto [Rs, kept_s] = remove_redundant_faces_serial(Q);
    CHECK(Rs.faces() == R.faces());
    CHECK((Rs.G - R.G).cwiseAbs().maxCoeff() == 0.0);
    CHECK(kept_s == kept);
}

TEST_CASE("redundancy removal never drops implicit equalities") {
    // a single point written as tight antipodal pairs: every face looks
    // redundant given the rest, but dropping them all would unbound the set
    Polytope P;
    P.G = Matrix(5, 2);
    P.G << 1, 0, -1, 0, 0, 1, 0, -1, 1, 1;
    P.h = Vector(5);
    P.h << 1, -1, 2, -2, 5;  // x = 1, y = 2, one loose face
    auto [R, kept] = remove_redundant_faces(P);
    CHECK(R.faces() == 4);
    Vector pt(2);
    pt << 1, 2;
    CHECK(contains_point(R, pt));
    auto c = chebyshev_center(R);
    CHECK(!c.radius_unbounded);
    CHECK(c.radius <= 1e-9);
    CHECK((c.center - pt).norm() <= 1e-7);
}

TEST_CASE("redundancy removal keeps unbounded sets intact") {
    Polytope P;  // x >= 0, y >= 0, plus a redundant x + y >= -1
    P.G = Matrix(3, 2);
    P.G << -1, 0, 0, -1, -1, -1;
    P.h = Vector(3);
    P.h << 0, 0, 1;
    auto [R, kept] = remove_redundant_faces(P);
    CHECK(R.faces() == 2);
}

TEST_CASE("vertex enumeration of box and simplex") {
    auto bv = enumerate_vertices(box(2, -1.0, 2.0));
    REQUIRE(bv.size() == 4);
    CHECK(has_vertex(bv, (Vector(2) << -1, -1).finished()));
    CHECK(has_vertex(bv, (Vector(2) << 2, 2).finished()));

    auto sv = enumerate_vertices(simplex2());
    REQUIRE(sv.size() == 3);
    CHECK(has_vertex(sv, Vector::Zero(2)));
    CHECK(has_vertex(sv, (Vector(2) << 1, 0).finished()));
    CHECK(has_vertex(sv, (Vector(2) << 0, 1).finished()));

    auto svs = enumerate_vertices_serial(simplex2());
    REQUIRE(svs.size() == sv.size());
    for (const auto& v : sv) CHECK(has_vertex(svs, v));
}

TEST_CASE("vertex enumeration rejects unbounded polytopes") {
    Polytope P;
    P.G = Matrix(1, 2);
    P.G << 1, 0;
    P.h = Vector(1);
    P.h << 1;
    CHECK_THROWS_AS(enumerate_vertices(P), std::invalid_argument);
}

TEST_CASE("Farkas containment certificate on nested boxes") {
    Polytope inner = box(2, -1.0, 1.0), outer = box(2, -2.0, 2.0);
    auto cert = check_containment_farkas(inner, outer);
    REQUIRE(cert.contained);
    REQUIRE(cert.Z.has_value());
    CHECK((cert.Z->array() >= -1e-12).all());
    CHECK((*cert.Z * inner.G - outer.G).cwiseAbs().maxCoeff() ==
          doctest::Approx(0.0).epsilon(1e-8));
    CHECK(((*cert.Z * inner.h - outer.h).array() <= 1e-8).all());

    auto rev = check_containment_farkas(outer, inner);
    CHECK_FALSE(rev.contained);
    if (rev.witness) {
        CHECK(contains_point(outer, *rev.witness));
        CHECK_FALSE(contains_point(inner, *rev.witness));
    }
}

TEST_CASE("Farkas matches the vertex oracle on random pairs") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int agree_contained = 0, agree_not = 0;
    for (int trial = 0; trial < 80; ++trial) {
        const Eigen::Index d = 2 + trial % 2;
        auto rand_poly = [&](double scale) {
            Polytope P = box(d, -scale, scale);
            Matrix extra(3, d);
            Vector eh(3);
            for (Eigen::Index r = 0; r < 3; ++r) {
                for (Eigen::Index j = 0; j < d; ++j) extra(r, j) = u(rng);
                eh(r) = scale * (0.5 + std::abs(u(rng)));
            }
            Polytope Q;
            Q.G = Matrix(P.faces() + 3, d);
            Q.h = Vector(P.faces() + 3);
            Q.G << P.G, extra;
            Q.h << P.h, eh;
            return Q;
        };
        Polytope P1 = rand_poly(1.0), P2 = rand_poly(1.0 + u(rng) * 0.8);
        auto cert = check_containment_farkas(P1, P2);
        auto verts = enumerate_vertices(P1);
        bool oracle = std::all_of(verts.begin(), verts.end(), [&](const Vector& v) {
            return contains_point(P2, v, 1e-7);
        });
        CHECK(cert.contained == oracle);
        (oracle ? agree_contained : agree_not)++;
    }
    CHECK(agree_contained > 5);
    CHECK(agree_not > 5);
}

TEST_CASE("hit-and-run sampling: determinism, membership, coverage") {
    Polytope P = box(3, 0.0, 1.0);
    auto s1 = sample_interior(P, 400, 42);
    auto s2 = sample_interior(P, 400, 42);
    REQUIRE(s1.size() == 400);
    for (std::size_t i = 0; i < s1.size(); ++i)
        CHECK((s1[i] - s2[i]).cwiseAbs().maxCoeff() == 0.0);
    Vector mean = Vector::Zero(3);
    for (const auto& s : s1) {
        CHECK(contains_point(P, s, 1e-9));
        mean += s;
    }
    mean /= static_cast<double>(s1.size());
    CHECK((mean.array() - 0.5).abs().maxCoeff() < 0.1);
    auto s3 = sample_interior(P, 10, 43);
    CHECK((s3[0] - s1[0]).cwiseAbs().maxCoeff() > 1e-12);
}

TEST_CASE("sampling an unbounded or degenerate set throws") {
    Polytope P;
    P.G = Matrix(1, 2);
    P.G << 1, 0;
    P.h = Vector(1);
    P.h << 1;
    CHECK_THROWS(sample_interior(P, 5, 0));
}
