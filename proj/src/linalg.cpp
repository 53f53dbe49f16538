#include "cbctl/linalg.hpp"

#include <algorithm>
#include <limits>

namespace cbctl {

double rank_threshold(Eigen::Index rows, Eigen::Index cols, double slack) {
    return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * slack;
}

Vector singular_values(const Matrix& M) {
    if (M.size() == 0) {
        return Vector{};
    }
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues();
}

namespace {

int count_rank(const Vector& sv, double cutoff, double scale) {
    const double ref = std::max(sv.size() ? sv(0) : 0.0, scale);
    if (sv.size() == 0 || ref == 0.0) {
        return 0;
    }
    const double floor = cutoff * ref;
    return static_cast<int>((sv.array() > floor).count());
}

}  // namespace

int numeric_rank(const Matrix& M, double slack, double scale) {
    return count_rank(singular_values(M), rank_threshold(M.rows(), M.cols(), slack), scale);
}

PseudoSolve pseudo_solve(const Matrix& M, const Vector& d, double slack, double scale) {
    PseudoSolve out;
    out.solution = Vector::Zero(M.cols());
    if (M.size() == 0) {
        out.residual = d.norm();
        out.relative_residual = d.norm() > 0.0 ? 1.0 : 0.0;
        return out;
    }
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.singular_values = svd.singularValues();
    out.rank = count_rank(out.singular_values, rank_threshold(M.rows(), M.cols(), slack), scale);

    const int r = out.rank;
    const Matrix Ur = svd.matrixU().leftCols(r);
    const Vector coeff = Ur.transpose() * d;
    out.residual = (d - Ur * coeff).norm();
    const double dn = d.norm();
    out.relative_residual = dn > 0.0 ? out.residual / dn : 0.0;
    if (r > 0) {
        out.solution = svd.matrixV().leftCols(r) *
                       (coeff.array() / out.singular_values.head(r).array()).matrix();
    }
    return out;
}

}  // namespace cbctl
