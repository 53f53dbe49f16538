#pragma once

#include <stdexcept>
#include <vector>

#include "cbctl/analysis.hpp"
#include "cbctl/charge_balance.hpp"
#include "cbctl/lifting.hpp"
#include "cbctl/tolerances.hpp"

namespace cbctl {

struct SteeringTask {
    Vector x0;
    Vector xf;
    int b = 1;
    Regime regime = Regime::non_repetitive;
};

/// Minimum-energy charge-balanced input plan over b blocks of h steps.
struct ControlPlan {
    Regime regime = Regime::non_repetitive;
    int h = 0;
    int b = 0;
    std::vector<Vector> blocks;       //!< U_0 ... U_{b-1}, each mh
    std::vector<Vector> latent;       //!< w_p per block, or a single w in the repetitive regime
    std::vector<Vector> flat_inputs;  //!< u_0 ... u_{bh-1}
    double energy = 0.0;              //!< sum_p ||U_p||^2
    double residual = 0.0;            //!< ||x_f - x_{bh}|| along the lifted recursion
};

/// The target displacement x_f - Abar^b x_0 is outside the reachable subspace.
class ReachabilityError : public std::runtime_error {
  public:
    ReachabilityError(const std::string& what, double residual, double relative_residual, int rank)
        : std::runtime_error(what), residual_(residual), relative_residual_(relative_residual), rank_(rank) {}
    [[nodiscard]] double residual() const { return residual_; }
    [[nodiscard]] double relative_residual() const { return relative_residual_; }
    [[nodiscard]] int rank() const { return rank_; }

  private:
    double residual_;
    double relative_residual_;
    int rank_;
};

/// Distinct blocks: U_p = Q Q^T S^T (Abar^T)^{b-1-p} G^+ (x_f - Abar^b x_0).
ControlPlan design_nonrepetitive(const LiftedSystem& lifted, const SteeringTask& task, const Tolerances& tol = {});

/// Identical blocks: w = (H_b Bbar)^+ (x_f - Abar^b x_0), U_p = Q w for every p.
ControlPlan design_repetitive(const LiftedSystem& lifted, const SteeringTask& task, const Tolerances& tol = {});

/// Dispatches on task.regime.
ControlPlan design(const LiftedSystem& lifted, const SteeringTask& task, const Tolerances& tol = {});

struct PlanReport {
    Trajectory trajectory;
    double terminal_error = 0.0;
    std::vector<double> imbalance;    //!< ||R U_p||_inf per block
    std::vector<double> step_energy;  //!< ||u_k||^2 per step
    std::vector<int> unbalanced_blocks;
    bool pass = false;
};

/// Replays the plan through the per-step dynamics and checks the terminal
/// state and every block's charge balance.
PlanReport verify_plan(const LtiSystem& sys, const BlockScheme& scheme, const SteeringTask& task,
                       const ControlPlan& plan, const Tolerances& tol = {});

}  // namespace cbctl
