#include "posdd/simulate.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "posdd/polytope.hpp"
#include "posdd/synthesis.hpp"

namespace posdd {

namespace {

void guard_state(const Vector& x) {
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceGuard)
        throw numerical_error("simulation diverged past the guard threshold");
}

Vector rk4_step(const Matrix& Acl, const Vector& x, double dt) {
    const Vector k1 = Acl * x;
    const Vector k2 = Acl * (x + 0.5 * dt * k1);
    const Vector k3 = Acl * (x + 0.5 * dt * k2);
    const Vector k4 = Acl * (x + dt * k3);
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

int grid_steps(double t_end, double dt) {
    require(t_end > 0 && dt > 0, "simulate: t_end and dt must be positive");
    return static_cast<int>(std::ceil(t_end / dt - 1e-12));
}

}  // namespace

Trajectory simulate_ct(const Matrix& A, const Matrix& B, const Matrix& K, const Vector& x0,
                       double t_end, double dt) {
    const Matrix Acl = A + B * K;
    const int steps = grid_steps(t_end, dt);
    Trajectory tr;
    tr.times.resize(steps + 1);
    tr.states.resize(x0.size(), steps + 1);
    Vector x = x0;
    for (int k = 0; k <= steps; ++k) {
        tr.times(k) = k * dt;
        tr.states.col(k) = x;
        if (k < steps) {
            x = rk4_step(Acl, x, dt);
            guard_state(x);
        }
    }
    return tr;
}

Trajectory simulate_dt(const Matrix& A, const Matrix& B, const Matrix& K, const Vector& x0,
                       int steps) {
    require(steps >= 0, "simulate_dt: steps must be nonnegative");
    const Matrix Acl = A + B * K;
    Trajectory tr;
    tr.times.resize(steps + 1);
    tr.states.resize(x0.size(), steps + 1);
    Vector x = x0;
    for (int k = 0; k <= steps; ++k) {
        tr.times(k) = k;
        tr.states.col(k) = x;
        if (k < steps) {
            x = Acl * x;
            guard_state(x);
        }
    }
    return tr;
}

Vector lyapunov_trace(const Trajectory& traj, const Vector& v) {
    require((v.array() > 0).all(), "lyapunov_trace: v must be positive");
    require(v.size() == traj.states.rows(), "lyapunov_trace: dimension mismatch");
    Vector V(traj.samples());
    for (Eigen::Index k = 0; k < traj.samples(); ++k)
        V(k) = (traj.states.col(k).array() / v.array()).maxCoeff();
    return V;
}

Trajectory simulate_switched(const std::vector<Matrix>& A, const std::vector<Matrix>& B,
                             const std::vector<Matrix>& gains, const Vector& x0, double t_end,
                             const SwitchingProcess& proc, double dt) {
    require(!A.empty() && A.size() == B.size(), "simulate_switched: mode count mismatch");
    require(gains.size() == 1 || gains.size() == A.size(),
            "simulate_switched: need one shared gain or one per mode");
    require(proc.n_modes == static_cast<int>(A.size()),
            "simulate_switched: process mode count mismatch");
    require(proc.mean_dwell > 0, "simulate_switched: mean dwell must be positive");

    std::mt19937_64 rng(proc.seed);
    std::exponential_distribution<double> dwell(1.0 / proc.mean_dwell);
    const int steps = grid_steps(t_end, dt);

    Trajectory tr;
    tr.times.resize(steps + 1);
    tr.states.resize(x0.size(), steps + 1);
    tr.modes = std::vector<int>(static_cast<std::size_t>(steps + 1));

    int mode = 0;
    double next_switch = dwell(rng);
    Vector x = x0;
    for (int k = 0; k <= steps; ++k) {
        const double t = k * dt;
        // switches take effect at the first grid point past the arrival
        while (A.size() > 1 && t >= next_switch) {
            std::uniform_int_distribution<int> pick(0, static_cast<int>(A.size()) - 2);
            int nm = pick(rng);
            if (nm >= mode) ++nm;
            mode = nm;
            next_switch += dwell(rng);
        }
        tr.times(k) = t;
        tr.states.col(k) = x;
        (*tr.modes)[static_cast<std::size_t>(k)] = mode + 1;
        if (k < steps) {
            const Matrix& K = gains.size() == 1 ? gains[0]
                                                : gains[static_cast<std::size_t>(mode)];
            x = rk4_step(A[static_cast<std::size_t>(mode)] +
                             B[static_cast<std::size_t>(mode)] * K,
                         x, dt);
            guard_state(x);
        }
    }
    return tr;
}

Trajectory simulate_lpv(const std::vector<Matrix>& A_l, const Matrix& B,
                        const std::vector<Vector>& omega, const std::vector<Matrix>& gains,
                        const Vector& x0, double t_end, const ThetaProcess& theta_proc,
                        double dt) {
    require(!A_l.empty(), "simulate_lpv: need at least one basis matrix");
    require(omega.size() == gains.size() && !omega.empty(),
            "simulate_lpv: vertex/gain count mismatch");
    const Eigen::Index L = theta_proc.lo.size();
    require(theta_proc.hi.size() == L && static_cast<std::size_t>(L) == A_l.size(),
            "simulate_lpv: parameter dimension mismatch");
    require((theta_proc.hi.array() >= theta_proc.lo.array()).all(),
            "simulate_lpv: empty parameter box");
    require(theta_proc.mean_dwell > 0, "simulate_lpv: mean dwell must be positive");

    std::mt19937_64 rng(theta_proc.seed);
    std::exponential_distribution<double> dwell(1.0 / theta_proc.mean_dwell);
    auto draw_theta = [&] {
        Vector th(L);
        for (Eigen::Index l = 0; l < L; ++l) {
            std::uniform_real_distribution<double> u(theta_proc.lo(l), theta_proc.hi(l));
            th(l) = theta_proc.lo(l) == theta_proc.hi(l) ? theta_proc.lo(l) : u(rng);
        }
        return th;
    };

    const int steps = grid_steps(t_end, dt);
    Trajectory tr;
    tr.times.resize(steps + 1);
    tr.states.resize(x0.size(), steps + 1);
    tr.thetas = Matrix(L, steps + 1);

    Vector theta = draw_theta();
    double next_jump = dwell(rng);
    Vector x = x0;
    for (int k = 0; k <= steps; ++k) {
        const double t = k * dt;
        while (t >= next_jump) {
            theta = draw_theta();
            next_jump += dwell(rng);
        }
        tr.times(k) = t;
        tr.states.col(k) = x;
        tr.thetas->col(k) = theta;
        if (k < steps) {
            Matrix A = Matrix::Zero(x0.size(), x0.size());
            for (Eigen::Index l = 0; l < L; ++l) A += theta(l) * A_l[static_cast<std::size_t>(l)];
            const Matrix K = gain_schedule(theta, omega, gains);
            x = rk4_step(A + B * K, x, dt);
            guard_state(x);
        }
    }
    return tr;
}

namespace {

Trajectory ensemble_member(const ConsistencySet& cs, const Matrix& K, const Vector& v,
                           const Vector& x0, std::uint64_t seed, const EnsembleOptions& o) {
    require(cs.is_single(), "ensemble: single-variant consistency sets only");
    const Vector plant = sample_interior(cs.polytope, 1, seed)[0];
    Matrix A, B;
    unpack_plant(plant, cs.n, cs.m, A, B);
    Trajectory tr = (cs.time_kind == TimeKind::Continuous)
                        ? simulate_ct(A, B, K, x0, o.t_end, o.dt)
                        : simulate_dt(A, B, K, x0, o.steps);
    tr.lyapunov = lyapunov_trace(tr, v);
    return tr;
}

}  // namespace

std::vector<Trajectory> ensemble_serial(const ConsistencySet& cs, const Matrix& K,
                                        const Vector& v, const Vector& x0, int count,
                                        std::uint64_t seed, const EnsembleOptions& o) {
    require(count >= 0, "ensemble: count must be nonnegative");
    std::vector<Trajectory> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            ensemble_member(cs, K, v, x0, seed + static_cast<std::uint64_t>(i), o);
    return out;
}

std::vector<Trajectory> ensemble(const ConsistencySet& cs, const Matrix& K, const Vector& v,
                                 const Vector& x0, int count, std::uint64_t seed,
                                 const EnsembleOptions& o) {
    require(count >= 0, "ensemble: count must be nonnegative");
    std::vector<Trajectory> out(static_cast<std::size_t>(count));
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] =
                ensemble_member(cs, K, v, x0, seed + static_cast<std::uint64_t>(i), o);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

double max_lyapunov_increase(const std::vector<Trajectory>& trajs) {
    double worst = 0.0;
    for (const auto& tr : trajs) {
        require(tr.lyapunov.has_value(), "max_lyapunov_increase: missing Lyapunov trace");
        for (Eigen::Index k = 0; k + 1 < tr.lyapunov->size(); ++k)
            worst = std::max(worst, (*tr.lyapunov)(k + 1) - (*tr.lyapunov)(k));
    }
    return worst;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream f(path);
    require(f.good(), "write_trajectory_csv: cannot open " + path);
    const Eigen::Index n = traj.states.rows();
    f << "t";
    for (Eigen::Index i = 0; i < n; ++i) f << ",x" << (i + 1);
    if (traj.lyapunov) f << ",V";
    if (traj.modes) f << ",s";
    if (traj.thetas)
        for (Eigen::Index l = 0; l < traj.thetas->rows(); ++l) f << ",th" << (l + 1);
    f << "\n";
    char buf[32];
    auto put = [&](double x) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        f << buf;
    };
    for (Eigen::Index k = 0; k < traj.samples(); ++k) {
        put(traj.times(k));
        for (Eigen::Index i = 0; i < n; ++i) {
            f << ',';
            put(traj.states(i, k));
        }
        if (traj.lyapunov) {
            f << ',';
            put((*traj.lyapunov)(k));
        }
        if (traj.modes) f << ',' << (*traj.modes)[static_cast<std::size_t>(k)];
        if (traj.thetas)
            for (Eigen::Index l = 0; l < traj.thetas->rows(); ++l) {
                f << ',';
                put((*traj.thetas)(l, k));
            }
        f << "\n";
    }
    require(f.good(), "write_trajectory_csv: write failed for " + path);
}

}  // namespace posdd
