#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace roekit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input; `path` points at the offending element (e.g. "customers[2].phase").
class ParseError : public Error {
public:
    ParseError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// The optimization problem has no solution (empty region, no interior, ...).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// A numerical method failed to converge or broke down.
class NumericalError : public Error {
public:
    using Error::Error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace roekit
