#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace posdd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class TimeKind { Continuous, Discrete };

inline const char* to_string(TimeKind tk) {
    return tk == TimeKind::Continuous ? "continuous" : "discrete";
}

/// Thrown when an algorithm fails numerically (iteration cap, lost precision).
/// Distinct from invalid_argument (bad input) and from an Infeasible verdict.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline void require_finite(const Matrix& m, const std::string& name) {
    if (!m.allFinite()) throw std::invalid_argument(name + " contains NaN/Inf");
}

}  // namespace posdd
