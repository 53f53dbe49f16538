#pragma once

#include <stdexcept>
#include <vector>

#include "cbctl/core_model.hpp"

namespace cbctl {

/// Zero-net-charge constraint for blocks of h consecutive inputs.
///
/// R = 1_h^T (x) I_m sums each channel across the block. Q holds an
/// orthonormal basis of Ker(R): for h = 2 it is [I; -I]/sqrt(2), for h >= 3 it
/// is V (x) I_m with V the modified Gram-Schmidt orthonormalization of the
/// successive differences e_1 - e_2, ..., e_{h-1} - e_h.
struct BlockScheme {
    int h = 0;
    int m = 0;
    Matrix R;  //!< m x mh
    Matrix Q;  //!< mh x m(h-1)

    [[nodiscard]] int block_size() const { return m * h; }
    [[nodiscard]] int latent_size() const { return m * (h - 1); }
};

/// Raised when a block fails R U = 0. `imbalance` holds the per-channel sums.
class ConstraintViolation : public std::runtime_error {
  public:
    ConstraintViolation(const std::string& what, Vector imbalance)
        : std::runtime_error(what), imbalance_(std::move(imbalance)) {}
    [[nodiscard]] const Vector& imbalance() const { return imbalance_; }

  private:
    Vector imbalance_;
};

BlockScheme build_scheme(int h, int m);

/// Same R as build_scheme but with a caller-supplied kernel basis. Q must be
/// mh x m(h-1) with orthonormal columns annihilated by R.
BlockScheme scheme_with_basis(int h, int m, Matrix Q);

/// Orthonormal h x (h-1) basis of the zero-sum subspace of R^h.
Matrix zero_sum_basis(int h);

/// Per-channel sums R U.
Vector block_imbalance(const Vector& U, const BlockScheme& scheme);

/// w = Q^T U for a charge-balanced U; throws ConstraintViolation if any
/// channel sum exceeds tol_cb.
Vector pack(const Vector& U, const BlockScheme& scheme, double tol_cb = 1e-9);

/// U = Q w.
Vector unpack(const Vector& w, const BlockScheme& scheme);

/// Splits a stacked block vector into its h per-step m-vectors.
std::vector<Vector> split_block(const Vector& U, int m);

}  // namespace cbctl
