#pragma once

#include "cbctl/core_model.hpp"

namespace cbctl {

/// Relative singular-value cutoff: max(rows, cols) * eps * slack.
double rank_threshold(Eigen::Index rows, Eigen::Index cols, double slack);

/// Count of singular values above rank_threshold * max(sigma_max, scale).
/// `scale` is the magnitude M would have without cancellation; when M is
/// pure rounding noise relative to it the rank is 0.
int numeric_rank(const Matrix& M, double slack, double scale = 0.0);

/// Descending singular values.
Vector singular_values(const Matrix& M);

/// Minimum-norm least-squares solve of M z = d through a thin SVD of M,
/// truncated at the numeric rank. Equivalent to M^T (M M^T)^+ d without
/// forming the squared matrix.
struct PseudoSolve {
    Vector solution;
    int rank = 0;
    double residual = 0.0;           //!< || d - M z ||_2 projected onto the retained range
    double relative_residual = 0.0;  //!< residual / ||d||_2 (0 when d = 0)
    Vector singular_values;
};

PseudoSolve pseudo_solve(const Matrix& M, const Vector& d, double slack, double scale = 0.0);

}  // namespace cbctl
