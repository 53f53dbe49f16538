#include "cbctl/design.hpp"

#include <algorithm>
#include <sstream>

#include "cbctl/linalg.hpp"

namespace cbctl {

namespace {

void check_task(const LiftedSystem& lifted, const SteeringTask& task) {
    const int n = lifted.n();
    if (task.x0.size() != n || task.xf.size() != n) {
        throw std::invalid_argument("task vectors must have length " + std::to_string(n));
    }
    if (task.b < 1) {
        throw std::invalid_argument("block horizon must be at least 1 (b = " + std::to_string(task.b) + ")");
    }
}

Vector displacement(const LiftedSystem& lifted, const SteeringTask& task) {
    return task.xf - power(lifted.Abar, task.b) * task.x0;
}

void require_reachable(const PseudoSolve& ps, const Tolerances& tol, const char* what) {
    if (ps.relative_residual > tol.reach) {
        std::ostringstream msg;
        msg << "target not reachable: residual " << ps.residual << " (relative " << ps.relative_residual
            << ") outside the range of " << what << " of rank " << ps.rank;
        throw ReachabilityError(msg.str(), ps.residual, ps.relative_residual, ps.rank);
    }
}

void finish(const LiftedSystem& lifted, const SteeringTask& task, ControlPlan& plan) {
    const int m = lifted.scheme.m;
    plan.h = lifted.h;
    plan.b = task.b;
    plan.energy = 0.0;
    plan.flat_inputs.clear();
    for (const auto& U : plan.blocks) {
        plan.energy += U.squaredNorm();
        for (auto& u : split_block(U, m)) {
            plan.flat_inputs.push_back(std::move(u));
        }
    }
    Vector x = task.x0;
    for (int p = 0; p < task.b; ++p) {
        const Vector& w = plan.regime == Regime::repetitive ? plan.latent.front() : plan.latent[p];
        x = lifted_step(lifted, x, w);
    }
    plan.residual = (task.xf - x).norm();
}

}  // namespace

ControlPlan design_nonrepetitive(const LiftedSystem& lifted, const SteeringTask& task, const Tolerances& tol) {
    check_task(lifted, task);
    const GramianBundle gram = reachability_matrix(lifted, task.b);
    // G^+ applied through the SVD of Rb: Rb^T (Rb Rb^T)^+ d = Rb^+ d, whose p-th
    // segment is Bbar^T (Abar^T)^{b-1-p} G^+ d = Q^T S^T (Abar^T)^{b-1-p} G^+ d.
    const PseudoSolve ps = pseudo_solve(gram.Rb, displacement(lifted, task), tol.rank_slack, gram.scale);
    require_reachable(ps, tol, "the reachability matrix");

    const int q = lifted.scheme.latent_size();
    ControlPlan plan;
    plan.regime = Regime::non_repetitive;
    for (int p = 0; p < task.b; ++p) {
        Vector w = ps.solution.segment(p * q, q);
        plan.blocks.push_back(unpack(w, lifted.scheme));
        plan.latent.push_back(std::move(w));
    }
    finish(lifted, task, plan);
    return plan;
}

ControlPlan design_repetitive(const LiftedSystem& lifted, const SteeringTask& task, const Tolerances& tol) {
    check_task(lifted, task);
    const Matrix M = h_sum(lifted, task.b) * lifted.Bbar;
    const PseudoSolve ps = pseudo_solve(M, displacement(lifted, task), tol.rank_slack,
                                        h_sum_scale(lifted, task.b) * lifted.S.norm());
    require_reachable(ps, tol, "H_b Bbar");

    ControlPlan plan;
    plan.regime = Regime::repetitive;
    plan.latent.push_back(ps.solution);
    const Vector U = unpack(ps.solution, lifted.scheme);
    plan.blocks.assign(task.b, U);
    finish(lifted, task, plan);
    return plan;
}

ControlPlan design(const LiftedSystem& lifted, const SteeringTask& task, const Tolerances& tol) {
    return task.regime == Regime::repetitive ? design_repetitive(lifted, task, tol)
                                             : design_nonrepetitive(lifted, task, tol);
}

PlanReport verify_plan(const LtiSystem& sys, const BlockScheme& scheme, const SteeringTask& task,
                       const ControlPlan& plan, const Tolerances& tol) {
    PlanReport rep;
    rep.trajectory = simulate(sys, task.x0, plan.flat_inputs);
    rep.terminal_error = (rep.trajectory.states.back() - task.xf).norm();

    const int per_block = scheme.h;
    const int nblocks = static_cast<int>(plan.flat_inputs.size()) / per_block;
    for (int p = 0; p < nblocks; ++p) {
        Vector sum = Vector::Zero(scheme.m);
        for (int i = 0; i < per_block; ++i) {
            sum += plan.flat_inputs[p * per_block + i];
        }
        const double imb = sum.cwiseAbs().maxCoeff();
        rep.imbalance.push_back(imb);
        if (imb > tol.charge_balance) {
            rep.unbalanced_blocks.push_back(p);
        }
    }
    for (const auto& u : plan.flat_inputs) {
        rep.step_energy.push_back(u.squaredNorm());
    }
    const bool whole_blocks = static_cast<int>(plan.flat_inputs.size()) == task.b * per_block;
    rep.pass = whole_blocks && rep.terminal_error <= tol.terminal && rep.unbalanced_blocks.empty();
    return rep;
}

}  // namespace cbctl
