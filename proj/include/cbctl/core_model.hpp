#pragma once

#include <vector>

#include <Eigen/Dense>

namespace cbctl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Discrete-time plant x_{k+1} = A x_k + B u_k.
///
/// Immutable after construction; the constructor rejects non-square A,
/// row-count mismatch, empty B and non-finite entries.
class LtiSystem {
  public:
    LtiSystem(Matrix A, Matrix B);

    [[nodiscard]] const Matrix& A() const { return A_; }
    [[nodiscard]] const Matrix& B() const { return B_; }
    [[nodiscard]] int n() const { return static_cast<int>(A_.rows()); }
    [[nodiscard]] int m() const { return static_cast<int>(B_.cols()); }

  private:
    Matrix A_;
    Matrix B_;
};

struct Trajectory {
    std::vector<Vector> states;  //!< x_0 ... x_N
    std::vector<Vector> inputs;  //!< u_0 ... u_{N-1}
};

/// Rolls the plant forward from x0, recording every state.
/// Throws std::invalid_argument naming the first input whose length is not m.
Trajectory simulate(const LtiSystem& sys, const Vector& x0, const std::vector<Vector>& inputs);

/// A^h by repeated squaring. h = 0 yields the identity.
Matrix power(const Matrix& A, int h);
Matrix power(const LtiSystem& sys, int h);

}  // namespace cbctl
