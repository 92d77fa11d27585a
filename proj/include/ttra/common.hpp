#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace ttra {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thrown on contract violations (bad shapes, out-of-range modes, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an operation would materialize a dense object above the cap.
class DenseBudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string &msg) {
    if (!cond) throw InvalidArgument(msg);
}

/// Default cap on dense materialization, in number of entries.
inline constexpr Index kDenseCapDefault = 10'000'000;

} // namespace ttra
