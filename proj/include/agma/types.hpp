#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace agma {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Invalid parameters, malformed configs, contract violations.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A run produced a non-finite iterate.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int iteration)
        : std::runtime_error(what), iteration_(iteration) {}

    int iteration() const { return iteration_; }

private:
    int iteration_;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace agma
