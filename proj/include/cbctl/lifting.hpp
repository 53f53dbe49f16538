#pragma once

#include "cbctl/charge_balance.hpp"
#include "cbctl/core_model.hpp"

namespace cbctl {

/// Block-to-block dynamics x_{(p+1)h} = Abar x_{ph} + Bbar w_p.
struct LiftedSystem {
    Matrix S;     //!< [A^{h-1}B, ..., AB, B], n x mh
    Matrix Abar;  //!< A^h
    Matrix Bbar;  //!< S Q, n x m(h-1)
    int h = 0;
    BlockScheme scheme;

    [[nodiscard]] int n() const { return static_cast<int>(Abar.rows()); }
};

/// b-block reachability matrix and Gramian of a lifted system.
struct GramianBundle {
    Matrix Rb;  //!< [Abar^{b-1} Bbar, ..., Abar Bbar, Bbar]
    Matrix G;   //!< Rb Rb^T
    int b = 0;
    double scale = 0.0;  //!< ||S|| max_p ||Abar^p||, the size of Rb before cancellation in S Q
};

LiftedSystem lift(const LtiSystem& sys, const BlockScheme& scheme);

GramianBundle reachability_matrix(const LiftedSystem& lifted, int b);

/// H_b = I + Abar + ... + Abar^{b-1}, accumulated Horner style.
Matrix h_sum(const LiftedSystem& lifted, int b);

/// sum_i ||Abar^i|| over i < b (the identity counted as 1): size of H_b before cancellation.
double h_sum_scale(const LiftedSystem& lifted, int b);

/// Propagates the lifted recursion over a sequence of latent block inputs.
Vector lifted_step(const LiftedSystem& lifted, const Vector& x, const Vector& w);

}  // namespace cbctl
