#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbctl/core_model.hpp"
#include "cbctl/tolerances.hpp"

namespace cbctl {

using Complex = std::complex<double>;

enum class Regime { non_repetitive, repetitive };
enum class Verdict { yes, no, undetermined };

const char* to_string(Regime r);
const char* to_string(Verdict v);

/// Eigensolver failure or another numerical breakdown during analysis.
class AnalysisError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An operation was called on a system that violates its documented preconditions.
class PreconditionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SpectralReport {
    std::vector<Complex> eigenvalues;
    bool has_unit_eigenvalue = false;
    bool simple_spectrum_of_Ah = false;
    bool all_real = false;
    int h = 1;
};

/// Eigenvalues of A plus the flags derived from them for block length h.
SpectralReport spectral_report(const LtiSystem& sys, int h, const Tolerances& tol = {});

struct PbhResult {
    bool controllable = false;
    std::optional<Complex> eigenvalue;  //!< offending eigenvalue on failure
    Eigen::VectorXcd witness;           //!< left eigenvector phi with phi^T B ~ 0 on failure
    double witness_norm = 0.0;          //!< || phi^T B ||_2 for the witness
};

/// rank [lambda I - A | B] = n for every eigenvalue lambda of A.
PbhResult pbh_controllable(const LtiSystem& sys, const Tolerances& tol = {});

struct ConditionOutcome {
    std::string name;
    bool holds = false;
    std::string detail;
};

struct ControllabilityVerdict {
    Regime mode = Regime::non_repetitive;
    Verdict controllable = Verdict::undetermined;
    bool decided_by_conditions = false;  //!< false when the numeric rank fallback settled it
    std::vector<ConditionOutcome> reasons;
    int numeric_rank = 0;             //!< rank of the reachability matrix (non-repetitive) or H_b Bbar
    std::vector<double> singular_values;
    int h = 0;
    int b = 0;
    std::vector<std::string> warnings;
};

/// Sufficient conditions for controllability with distinct blocks:
/// (A, B) controllable, 1 not an eigenvalue, A^h with a simple spectrum. The
/// first two are also necessary. When only the spectral condition fails the
/// verdict falls back to the numeric rank of the n-block Gramian.
ControllabilityVerdict check_nonrepetitive_sufficient(const LtiSystem& sys, int h, const Tolerances& tol = {});

struct RatioOrder {
    int i = 0;
    int j = 0;
    Complex ratio;
    int order = 0;  //!< 0 when no order <= max_order was found
};

struct HSelection {
    int h = 2;
    std::vector<RatioOrder> ratios;  //!< unit-modulus eigenvalue ratios examined
    bool certified = false;          //!< A^h has pairwise distinct eigenvalues
    std::vector<std::string> warnings;
};

/// Smallest k in [1, max_order] with |r^k - 1| <= tol.root, provided
/// |r| is within tol.modulus of 1. Returns 0 otherwise.
int root_of_unity_order(Complex r, const Tolerances& tol = {});

/// Block length that keeps A^h's spectrum simple: lcm of the root-of-unity
/// orders of all eigenvalue ratios, plus one; 2 when no ratio is a root of unity.
/// Throws PreconditionError if A's eigenvalues are not distinct or 1 is one of them.
HSelection select_h(const LtiSystem& sys, const Tolerances& tol = {});

/// True when (A, B) is controllable, 1 is not an eigenvalue and every eigenvalue
/// is real and distinct; then h = 3 is certified.
bool check_real_spectrum_shortcut(const LtiSystem& sys, const Tolerances& tol = {});

struct HbInvertibility {
    bool invertible = false;          //!< spectral verdict
    bool numeric_invertible = false;  //!< sigma_min(H_b) > threshold * max(sigma_max(H_b), h_sum_scale)
    double sigma_ratio = 0.0;
    std::optional<Complex> offending_eigenvalue;
    std::optional<std::string> warning;  //!< set when the two verdicts disagree
};

/// H_b is singular exactly when some eigenvalue satisfies lambda^{hb} = 1 and lambda^h != 1.
HbInvertibility hb_invertible(const LtiSystem& sys, int h, int b, const Tolerances& tol = {});

/// Sufficient conditions for identical blocks with h = 2: no eigenvalue with
/// lambda^{2b} = 1 and lambda^2 != 1, 1 not an eigenvalue, rank(B) = n. If they
/// do not settle it (or h != 2) the verdict falls back to rank(H_b Bbar) at (h, b).
ControllabilityVerdict check_repetitive_sufficient(const LtiSystem& sys, int b, int h = 2,
                                                   const Tolerances& tol = {});

}  // namespace cbctl
