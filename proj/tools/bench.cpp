// Benchmarks the OpenMP-parallel kernels against their serial reference
// implementations and checks that both produce identical results.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "posdd/consistency.hpp"
#include "posdd/polytope.hpp"
#include "posdd/simulate.hpp"
#include "posdd/synthesis.hpp"

using namespace posdd;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm-up
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms, bool match) {
    std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms,
                match ? "results match" : "RESULTS DIFFER");
}

ConsistencySet bench_consistency(int T, double epsilon, std::uint64_t seed) {
    PlantSingle p;
    p.A = Matrix(3, 3);
    p.A << -0.55, 0.3, 0.65, 0.06, -1.35, 0.25, 0.1, 0.15, 0.4;
    p.B = Matrix(3, 2);
    p.B << 0.18, 0.08, 0.47, 0.25, 0.07, 0.95;
    GenOptions g;
    g.T = T;
    g.epsilon = epsilon;
    g.seed = seed;
    return build_consistency(generate_dataset(p, TimeKind::Continuous, g),
                             Prior{true, true});
}

Polytope random_polytope(Eigen::Index d, Eigen::Index extra, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Polytope P;
    P.G = Matrix(2 * d + extra, d);
    P.h = Vector(2 * d + extra);
    P.G.topRows(d) = Matrix::Identity(d, d);
    P.G.middleRows(d, d) = -Matrix::Identity(d, d);
    P.h.head(2 * d).setOnes();
    for (Eigen::Index r = 2 * d; r < P.faces(); ++r) {
        for (Eigen::Index j = 0; j < d; ++j) P.G(r, j) = u(rng);
        P.h(r) = 0.6 + std::abs(u(rng));
    }
    return P;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads: %d\n\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serially\n\n");
#endif

    {  // face redundancy removal on a data consistency polytope (dim 15)
        auto cs = bench_consistency(50, 0.1, 5);
        const Polytope& P = cs.polytope;
        std::pair<Polytope, std::vector<int>> rs, rp;
        const double ts = time_ms([&] { rs = remove_redundant_faces_serial(P); }, 3);
        const double tp = time_ms([&] { rp = remove_redundant_faces(P); }, 3);
        report("remove_redundant_faces", ts, tp, rs.second == rp.second);
    }

    {  // brute-force vertex enumeration on a random 5-d polytope
        Polytope P = random_polytope(5, 12, 11);
        std::vector<Vector> vs, vp;
        const double ts = time_ms([&] { vs = enumerate_vertices_serial(P); }, 3);
        const double tp = time_ms([&] { vp = enumerate_vertices(P); }, 3);
        bool match = vs.size() == vp.size();
        for (std::size_t i = 0; match && i < vs.size(); ++i)
            match = (vs[i] - vp[i]).cwiseAbs().maxCoeff() <= 1e-12;
        report("enumerate_vertices", ts, tp, match);
    }

    {  // closed-loop ensemble over sampled consistent plants
        auto cs = bench_consistency(40, 0.05, 9);
        SynthesisOptions o;
        auto res = synthesize_stabilizing(cs, o);
        if (res.status != SynthStatus::Feasible) {
            std::printf("ensemble benchmark skipped: synthesis infeasible\n");
            return 0;
        }
        EnsembleOptions eo;
        eo.t_end = 10.0;
        Vector x0 = Vector::Ones(3);
        std::vector<Trajectory> es, ep;
        const double ts =
            time_ms([&] { es = ensemble_serial(cs, res.K, res.v, x0, 64, 2, eo); }, 3);
        const double tp =
            time_ms([&] { ep = ensemble(cs, res.K, res.v, x0, 64, 2, eo); }, 3);
        bool match = es.size() == ep.size();
        for (std::size_t i = 0; match && i < es.size(); ++i)
            match = (es[i].states - ep[i].states).cwiseAbs().maxCoeff() == 0.0;
        report("ensemble (64 members)", ts, tp, match);
    }
    return 0;
}
