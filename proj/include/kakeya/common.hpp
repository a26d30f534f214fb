#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace kakeya {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Raised when an operation is called outside its documented domain.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised when a checked geometric claim fails at runtime (e.g. Bezout ceiling).
struct AssertionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised for malformed experiment configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw PreconditionError(what);
}

constexpr double kPi = 3.14159265358979323846;

// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

// Shortest round-trip decimal for a double ("%.17g").
std::string format_double(double x);

}  // namespace kakeya
