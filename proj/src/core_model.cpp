#include "cbctl/core_model.hpp"

#include <stdexcept>
#include <string>

namespace cbctl {

LtiSystem::LtiSystem(Matrix A, Matrix B) : A_(std::move(A)), B_(std::move(B)) {
    if (A_.rows() == 0 || A_.rows() != A_.cols()) {
        throw std::invalid_argument("A must be square and non-empty, got " + std::to_string(A_.rows()) + "x" +
                                    std::to_string(A_.cols()));
    }
    if (B_.rows() != A_.rows()) {
        throw std::invalid_argument("B must have " + std::to_string(A_.rows()) + " rows, got " +
                                    std::to_string(B_.rows()));
    }
    if (B_.cols() < 1) {
        throw std::invalid_argument("B must have at least one column");
    }
    if (!A_.allFinite() || !B_.allFinite()) {
        throw std::invalid_argument("system matrices contain non-finite entries");
    }
}

Trajectory simulate(const LtiSystem& sys, const Vector& x0, const std::vector<Vector>& inputs) {
    if (x0.size() != sys.n()) {
        throw std::invalid_argument("x0 has length " + std::to_string(x0.size()) + ", expected " +
                                    std::to_string(sys.n()));
    }
    Trajectory traj;
    traj.states.reserve(inputs.size() + 1);
    traj.states.push_back(x0);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        if (inputs[k].size() != sys.m()) {
            throw std::invalid_argument("input " + std::to_string(k) + " has length " +
                                        std::to_string(inputs[k].size()) + ", expected " +
                                        std::to_string(sys.m()));
        }
        traj.states.push_back(sys.A() * traj.states.back() + sys.B() * inputs[k]);
    }
    traj.inputs = inputs;
    return traj;
}

Matrix power(const Matrix& A, int h) {
    if (h < 0) {
        throw std::invalid_argument("negative matrix power " + std::to_string(h));
    }
    Matrix result = Matrix::Identity(A.rows(), A.cols());
    Matrix base = A;
    while (h > 0) {
        if (h & 1) {
            result = result * base;
        }
        h >>= 1;
        if (h > 0) {
            base = base * base;
        }
    }
    return result;
}

Matrix power(const LtiSystem& sys, int h) { return power(sys.A(), h); }

}  // namespace cbctl
