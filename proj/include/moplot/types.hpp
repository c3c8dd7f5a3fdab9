#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace moplot {

/// Point or direction in a decision space of dimension 2 or 3. Fixed capacity, never heap allocated.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

/// Row i holds the gradient of objective i (k rows, p columns).
using GradientMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, 3, 3>;

/// p x p Jacobian of the descent field.
using SquareMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

using CellIndex = std::size_t;

/// Thrown when a point lies outside the feasible box.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Thrown for invalid problem specifications or unsupported family/dimension combinations.
class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation failure at a specific grid cell.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(CellIndex cell, const std::string& what)
        : std::runtime_error("cell " + std::to_string(cell) + ": " + what), cell_(cell) {}

    CellIndex cell() const noexcept { return cell_; }

private:
    CellIndex cell_;
};

} // namespace moplot
