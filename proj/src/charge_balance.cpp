#include "cbctl/charge_balance.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace cbctl {

namespace {

Matrix constraint_matrix(int h, int m) {
    Matrix R(m, m * h);
    for (int i = 0; i < h; ++i) {
        R.middleCols(i * m, m).setIdentity();
    }
    return R;
}

void check_shape(int h, int m) {
    if (h < 2) {
        throw std::invalid_argument("charge balance needs at least two steps per block (h = " +
                                    std::to_string(h) + ")");
    }
    if (m < 1) {
        throw std::invalid_argument("input dimension must be positive (m = " + std::to_string(m) + ")");
    }
}

}  // namespace

Matrix zero_sum_basis(int h) {
    if (h < 2) {
        throw std::invalid_argument("zero-sum basis needs h >= 2");
    }
    Matrix V = Matrix::Zero(h, h - 1);
    for (int j = 0; j < h - 1; ++j) {
        Vector v = Vector::Zero(h);
        v(j) = 1.0;
        v(j + 1) = -1.0;
        // modified Gram-Schmidt against the columns already accepted
        for (int i = 0; i < j; ++i) {
            v -= V.col(i).dot(v) * V.col(i);
        }
        V.col(j) = v / v.norm();
    }
    return V;
}

BlockScheme build_scheme(int h, int m) {
    check_shape(h, m);
    BlockScheme s;
    s.h = h;
    s.m = m;
    s.R = constraint_matrix(h, m);
    if (h == 2) {
        const double c = 1.0 / std::sqrt(2.0);
        s.Q = Matrix::Zero(2 * m, m);
        s.Q.topRows(m).diagonal().setConstant(c);
        s.Q.bottomRows(m).diagonal().setConstant(-c);
    } else {
        const Matrix V = zero_sum_basis(h);
        s.Q = Matrix::Zero(m * h, m * (h - 1));
        for (int i = 0; i < h; ++i) {
            for (int j = 0; j < h - 1; ++j) {
                s.Q.block(i * m, j * m, m, m).diagonal().setConstant(V(i, j));
            }
        }
    }
    return s;
}

BlockScheme scheme_with_basis(int h, int m, Matrix Q) {
    check_shape(h, m);
    if (Q.rows() != m * h || Q.cols() != m * (h - 1)) {
        throw std::invalid_argument("kernel basis must be " + std::to_string(m * h) + "x" +
                                    std::to_string(m * (h - 1)));
    }
    BlockScheme s;
    s.h = h;
    s.m = m;
    s.R = constraint_matrix(h, m);
    if ((Q.transpose() * Q - Matrix::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff() > 1e-10 ||
        (s.R * Q).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("kernel basis is not orthonormal or not annihilated by R");
    }
    s.Q = std::move(Q);
    return s;
}

Vector block_imbalance(const Vector& U, const BlockScheme& scheme) {
    if (U.size() != scheme.block_size()) {
        throw std::invalid_argument("block vector has length " + std::to_string(U.size()) + ", expected " +
                                    std::to_string(scheme.block_size()));
    }
    return scheme.R * U;
}

Vector pack(const Vector& U, const BlockScheme& scheme, double tol_cb) {
    const Vector imbalance = block_imbalance(U, scheme);
    if (imbalance.size() > 0 && imbalance.cwiseAbs().maxCoeff() > tol_cb) {
        std::ostringstream msg;
        msg << "block is not charge balanced; per-channel sums:";
        for (Eigen::Index i = 0; i < imbalance.size(); ++i) {
            msg << ' ' << imbalance(i);
        }
        throw ConstraintViolation(msg.str(), imbalance);
    }
    return scheme.Q.transpose() * U;
}

Vector unpack(const Vector& w, const BlockScheme& scheme) {
    if (w.size() != scheme.latent_size()) {
        throw std::invalid_argument("latent vector has length " + std::to_string(w.size()) + ", expected " +
                                    std::to_string(scheme.latent_size()));
    }
    return scheme.Q * w;
}

std::vector<Vector> split_block(const Vector& U, int m) {
    std::vector<Vector> steps;
    steps.reserve(U.size() / m);
    for (Eigen::Index i = 0; i + m <= U.size(); i += m) {
        steps.emplace_back(U.segment(i, m));
    }
    return steps;
}

}  // namespace cbctl
