#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "posdd/polytope.hpp"
#include "posdd/types.hpp"

namespace posdd {

/// Recorded state-input-transition data with an L-infinity noise bound.
/// Columns are samples; Xdelta holds derivatives (continuous) or next states
/// (discrete). Optional channels carry switching labels (1-based) or measured
/// parameters.
struct Dataset {
    TimeKind time_kind = TimeKind::Continuous;
    Matrix X;       // n x T
    Matrix U;       // m x T
    Matrix Xdelta;  // n x T
    double epsilon = 0.0;
    std::optional<std::vector<int>> switching;  // T labels in 1..n_modes
    std::optional<Matrix> theta;                // L x T

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index m() const { return U.rows(); }
    Eigen::Index T() const { return X.cols(); }
    void validate() const;
};

/// Prior structural knowledge about the plant.
struct Prior {
    bool a_positive = false;     // A Metzler (continuous) / A >= 0 (discrete)
    bool b_nonnegative = false;  // B >= 0
};

struct SingleVariant {};
struct SwitchedVariant {
    int n_modes = 0;
    std::vector<int> m_s;  // inputs per mode
};
struct LpvaVariant {
    int L = 0;
};

/// Consistency polytope over vectorized plant parameters, plus the coordinate
/// layout needed to pack/unpack plants.
struct ConsistencySet {
    Polytope polytope;
    int n = 0;
    int m = 0;  // single/lpva input count; per-mode counts live in the variant
    TimeKind time_kind = TimeKind::Continuous;
    std::variant<SingleVariant, SwitchedVariant, LpvaVariant> variant;
    std::vector<int> modes_without_data;  // switched only; warning surface

    bool is_single() const { return std::holds_alternative<SingleVariant>(variant); }
    bool is_switched() const { return std::holds_alternative<SwitchedVariant>(variant); }
    bool is_lpva() const { return std::holds_alternative<LpvaVariant>(variant); }
};

// Coordinate packing. Layout is [a; b] per block: single has one block, the
// switched set has one block per mode, LPVA stacks [a_1; ...; a_L; b].
Vector pack_plant(const Matrix& A, const Matrix& B);
void unpack_plant(const Vector& x, Eigen::Index n, Eigen::Index m, Matrix& A, Matrix& B);
Vector pack_switched(const std::vector<Matrix>& A, const std::vector<Matrix>& B);
Vector pack_lpva(const std::vector<Matrix>& A_l, const Matrix& B);
void unpack_lpva(const Vector& x, Eigen::Index n, Eigen::Index m, int L,
                 std::vector<Matrix>& A_l, Matrix& B);
/// Mode block [a_s; b_s] of a switched layout as a standalone plant vector.
Vector switched_block(const ConsistencySet& cs, const Vector& x, int mode);

ConsistencySet build_consistency(const Dataset& d, const Prior& prior);
ConsistencySet build_switched_consistency(const Dataset& d, const Prior& prior, int n_modes);
ConsistencySet build_lpva_consistency(const Dataset& d, const Prior& prior, int L);

/// The per-mode consistency polytope (mode-local coordinates) of a switched set.
Polytope switched_mode_polytope(const Dataset& d, const Prior& prior, int mode);

// Plant descriptions for the data generator.
struct PlantSingle {
    Matrix A, B;
};
struct PlantSwitched {
    std::vector<Matrix> A, B;
};
struct PlantLpva {
    std::vector<Matrix> A;  // L matrices
    Matrix B;
    Vector theta_lo, theta_hi;  // parameter box
};

struct GenOptions {
    int T = 1;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    double dt_sample = 0.1;  // continuous-time inter-sample Euler step
    double input_lo = -1.0, input_hi = 1.0;
    // When set, continuous-time Xdelta is a forward difference of the states
    // instead of the exact derivative; the truncation error is the caller's
    // to fold into epsilon.
    bool finite_difference = false;
};

Dataset generate_dataset(const PlantSingle& p, TimeKind tk, const GenOptions& o);
Dataset generate_dataset(const PlantSwitched& p, TimeKind tk, const GenOptions& o);
Dataset generate_dataset(const PlantLpva& p, TimeKind tk, const GenOptions& o);

// CSV round-trip: header t,x1..xn,u1..um,dx1..dxn[,s][,th1..thL].
// epsilon and time_kind travel out-of-band.
void write_dataset_csv(std::ostream& os, const Dataset& d);
Dataset read_dataset_csv(std::istream& is, TimeKind tk, double epsilon);
void write_dataset_csv_file(const std::string& path, const Dataset& d);
Dataset read_dataset_csv_file(const std::string& path, TimeKind tk, double epsilon);

}  // namespace posdd
