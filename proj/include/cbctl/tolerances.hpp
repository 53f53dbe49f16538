#pragma once

namespace cbctl {

/// Numeric thresholds shared by analysis, design and verification.
///
/// Every "is this zero / equal / a root of unity" decision in the library is
/// made against one of these fields, so a single value travels from the CLI
/// down to the lowest-level rank test.
struct Tolerances {
    double charge_balance = 1e-9;  //!< per-channel |sum of block inputs|
    double terminal = 1e-6;        //!< absolute terminal-state error
    double reach = 1e-8;           //!< relative residual of the reachability projection
    double rank_slack = 100.0;     //!< multiplier on max(rows, cols) * eps for numeric rank
    double eigen_unit = 1e-8;      //!< |lambda - 1| below this counts as an eigenvalue at 1
    double separation = 1e-8;      //!< eigenvalue separation, relative to spectral radius
    double modulus = 1e-9;         //!< ||r| - 1| window for unit-modulus ratios
    double root = 1e-8;            //!< |r^k - 1| threshold for root-of-unity detection
    int max_order = 64;            //!< largest root-of-unity order searched
};

}  // namespace cbctl
