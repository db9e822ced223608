#pragma once

#include <Eigen/Dense>

namespace carfin {

struct NnlsResult {
    Eigen::VectorXd x;
    double residual = 0.0;
    int iterations = 0;
};

/// Lawson-Hanson active-set solver for min ‖Ax - b‖_2 subject to x >= 0.
/// Terminates when no inactive coordinate has gradient above 'tol'
/// (negative tol selects a scale-aware default).
NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol = -1.0,
                int max_iterations = -1);

}  // namespace carfin
