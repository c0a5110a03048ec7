#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "posdd/types.hpp"

namespace posdd {

/// H-representation polytope {x : G x <= h}.
struct Polytope {
    Matrix G;  // faces x dim
    Vector h;  // faces

    Eigen::Index dim() const { return G.cols(); }
    Eigen::Index faces() const { return G.rows(); }

    void validate() const {
        require(G.rows() == h.size(), "Polytope: G rows must match h length");
    }
};

bool contains_point(const Polytope& P, const Vector& x, double tol = 1e-9);

struct ChebyshevResult {
    Vector center;
    double radius = 0.0;
    bool radius_unbounded = false;
};

/// Largest inscribed ball via one LP. Throws invalid_argument on an empty
/// polytope; an unbounded inradius is reported through radius_unbounded.
ChebyshevResult chebyshev_center(const Polytope& P);

/// Drops faces whose removal does not change the set. Face i is kept iff
/// maximizing g_i.x over the remaining faces exceeds h_i (or is unbounded).
/// Parallel over faces; remove_redundant_faces_serial is the reference
/// implementation with identical output.
std::pair<Polytope, std::vector<int>> remove_redundant_faces(const Polytope& P);
std::pair<Polytope, std::vector<int>> remove_redundant_faces_serial(const Polytope& P);

inline constexpr Eigen::Index kVertexEnumMaxDim = 8;
inline constexpr std::uint64_t kVertexEnumMaxSubsets = 1'000'000;
inline constexpr double kVertexDedupTol = 1e-7;

/// Brute-force basic-feasible-point enumeration; a combinatorial test oracle,
/// hard-capped at dim 8 / 1e6 face subsets. Throws on unbounded polytopes.
std::vector<Vector> enumerate_vertices(const Polytope& P);
std::vector<Vector> enumerate_vertices_serial(const Polytope& P);

struct ContainmentCertificate {
    bool contained = false;
    std::optional<Matrix> Z;        // nonnegative, faces2 x faces1, Z G1 = G2, Z h1 <= h2
    std::optional<Vector> witness;  // a point of P1 outside P2, best-effort
};

/// Extended-Farkas containment test: P1 is a subset of P2 iff a nonnegative Z
/// with Z G1 = G2 and Z h1 <= h2 exists. The LP verdict is exact; the witness
/// on non-containment is attached only in small dimensions.
ContainmentCertificate check_containment_farkas(const Polytope& P1, const Polytope& P2);

/// Hit-and-run samples from the interior, started at the Chebyshev center.
/// Burn-in 100*dim steps, thinning dim steps, deterministic per seed.
std::vector<Vector> sample_interior(const Polytope& P, int count, std::uint64_t seed);

}  // namespace posdd
