#include "cbctl/lifting.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cbctl {

LiftedSystem lift(const LtiSystem& sys, const BlockScheme& scheme) {
    if (scheme.m != sys.m()) {
        throw std::invalid_argument("block scheme has m = " + std::to_string(scheme.m) + " but system has m = " +
                                    std::to_string(sys.m()));
    }
    const int n = sys.n();
    const int m = sys.m();
    const int h = scheme.h;

    LiftedSystem out;
    out.h = h;
    out.scheme = scheme;
    out.S.resize(n, m * h);
    // rightmost block is B, each step left multiplies by A once more
    Matrix AkB = sys.B();
    for (int i = h - 1; i >= 0; --i) {
        out.S.middleCols(i * m, m) = AkB;
        if (i > 0) {
            AkB = sys.A() * AkB;
        }
    }
    out.Abar = power(sys.A(), h);
    out.Bbar = out.S * scheme.Q;
    return out;
}

GramianBundle reachability_matrix(const LiftedSystem& lifted, int b) {
    if (b < 1) {
        throw std::invalid_argument("block horizon must be at least 1 (b = " + std::to_string(b) + ")");
    }
    const Eigen::Index n = lifted.Abar.rows();
    const Eigen::Index q = lifted.Bbar.cols();

    GramianBundle out;
    out.b = b;
    out.Rb.resize(n, b * q);
    Matrix block = lifted.Bbar;
    Matrix Ap = Matrix::Identity(n, n);
    double max_power = 1.0;
    for (int p = b - 1; p >= 0; --p) {
        out.Rb.middleCols(p * q, q) = block;
        if (p > 0) {
            block = lifted.Abar * block;
            Ap = lifted.Abar * Ap;
            max_power = std::max(max_power, Ap.norm());
        }
    }
    out.scale = lifted.S.norm() * max_power;
    out.G = out.Rb * out.Rb.transpose();
    return out;
}

Matrix h_sum(const LiftedSystem& lifted, int b) {
    if (b < 1) {
        throw std::invalid_argument("block horizon must be at least 1 (b = " + std::to_string(b) + ")");
    }
    const Matrix I = Matrix::Identity(lifted.Abar.rows(), lifted.Abar.cols());
    Matrix H = I;
    for (int k = 1; k < b; ++k) {
        H = H * lifted.Abar + I;
    }
    return H;
}

double h_sum_scale(const LiftedSystem& lifted, int b) {
    if (b < 1) {
        throw std::invalid_argument("block horizon must be at least 1 (b = " + std::to_string(b) + ")");
    }
    Matrix Ap = Matrix::Identity(lifted.Abar.rows(), lifted.Abar.cols());
    double sum = 1.0;
    for (int i = 1; i < b; ++i) {
        Ap = lifted.Abar * Ap;
        sum += Ap.norm();
    }
    return sum;
}

Vector lifted_step(const LiftedSystem& lifted, const Vector& x, const Vector& w) {
    return lifted.Abar * x + lifted.Bbar * w;
}

}  // namespace cbctl
