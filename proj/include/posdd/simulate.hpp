#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "posdd/consistency.hpp"
#include "posdd/types.hpp"

namespace posdd {

// RK4 discretization noise allowance for Lyapunov monotonicity checks.
inline constexpr double kLyapunovSlack = 1e-6;
inline constexpr double kDivergenceGuard = 1e12;

struct Trajectory {
    Vector times;   // strictly increasing; step index in discrete time
    Matrix states;  // n x samples
    std::optional<std::vector<int>> modes;  // per-sample switching labels
    std::optional<Matrix> thetas;           // L x samples parameter traces
    std::optional<Vector> lyapunov;         // V(x(t)) when attached

    Eigen::Index samples() const { return times.size(); }
};

struct SwitchingProcess {
    double mean_dwell = 0.3;
    int n_modes = 1;
    std::uint64_t seed = 0;
};

/// Piecewise-constant parameter draw: uniform on a box, exponential dwell.
struct ThetaProcess {
    Vector lo, hi;
    double mean_dwell = 0.05;
    std::uint64_t seed = 0;
};

/// Fixed-step RK4 on xdot = (A+BK)x. Throws numerical_error past the
/// divergence guard.
Trajectory simulate_ct(const Matrix& A, const Matrix& B, const Matrix& K,
                       const Vector& x0, double t_end, double dt);

/// Exact iteration x+ = (A+BK)x.
Trajectory simulate_dt(const Matrix& A, const Matrix& B, const Matrix& K,
                       const Vector& x0, int steps);

/// V(t) = max_i x_i(t)/v_i per sample.
Vector lyapunov_trace(const Trajectory& traj, const Vector& v);

/// Switched closed loop with exponential mode arrivals (switch applied at the
/// next grid point; the new mode is drawn uniformly among the others). One
/// gain shared by all modes when `gains` has a single entry, else per-mode.
Trajectory simulate_switched(const std::vector<Matrix>& A, const std::vector<Matrix>& B,
                             const std::vector<Matrix>& gains, const Vector& x0,
                             double t_end, const SwitchingProcess& proc, double dt);

/// LPV closed loop: the gain is rescheduled at every step from the current
/// parameter value.
Trajectory simulate_lpv(const std::vector<Matrix>& A_l, const Matrix& B,
                        const std::vector<Vector>& omega, const std::vector<Matrix>& gains,
                        const Vector& x0, double t_end, const ThetaProcess& theta_proc,
                        double dt);

struct EnsembleOptions {
    double t_end = 20.0;
    double dt = 0.01;
    int steps = 100;  // discrete-time horizon
};

/// Samples `count` plants from the consistency set, simulates the closed loop
/// under (v, K), and attaches Lyapunov traces. Members use derived seeds
/// (seed + index), so results are deterministic regardless of scheduling.
/// Parallel over members; ensemble_serial is the reference implementation.
std::vector<Trajectory> ensemble(const ConsistencySet& cs, const Matrix& K, const Vector& v,
                                 const Vector& x0, int count, std::uint64_t seed,
                                 const EnsembleOptions& o);
std::vector<Trajectory> ensemble_serial(const ConsistencySet& cs, const Matrix& K,
                                        const Vector& v, const Vector& x0, int count,
                                        std::uint64_t seed, const EnsembleOptions& o);

/// Largest single-step increase of V across an ensemble (0 when all traces
/// are non-increasing).
double max_lyapunov_increase(const std::vector<Trajectory>& trajs);

/// CSV export: t,x1..xn[,V][,s|th1..thL], one row per sample.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

}  // namespace posdd
