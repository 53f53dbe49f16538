#include "cbctl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cbctl/charge_balance.hpp"
#include "cbctl/lifting.hpp"
#include "cbctl/linalg.hpp"

namespace cbctl {

const char* to_string(Regime r) { return r == Regime::repetitive ? "repetitive" : "non-repetitive"; }

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::yes: return "yes";
        case Verdict::no: return "no";
        case Verdict::undetermined: return "undetermined";
    }
    return "undetermined";
}

namespace {

std::string fmt(Complex z) {
    std::ostringstream os;
    os.precision(6);
    os << z.real();
    if (z.imag() != 0.0) {
        os << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    }
    return os.str();
}

std::vector<Complex> eigenvalues_of(const Matrix& A) {
    Eigen::EigenSolver<Matrix> es(A, false);
    if (es.info() != Eigen::Success) {
        const Vector sv = singular_values(A);
        const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                     : std::numeric_limits<double>::infinity();
        std::ostringstream msg;
        msg << "eigensolver did not converge (condition estimate " << cond << ")";
        throw AnalysisError(msg.str());
    }
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

double spectral_radius(const std::vector<Complex>& ev) {
    double r = 0.0;
    for (const auto& z : ev) {
        r = std::max(r, std::abs(z));
    }
    return r;
}

bool pairwise_distinct(const std::vector<Complex>& ev, double sep) {
    const double scale = std::max(spectral_radius(ev), std::numeric_limits<double>::min());
    for (std::size_t i = 0; i < ev.size(); ++i) {
        for (std::size_t j = i + 1; j < ev.size(); ++j) {
            if (std::abs(ev[i] - ev[j]) <= sep * scale) {
                return false;
            }
        }
    }
    return true;
}

std::optional<Complex> unit_eigenvalue(const std::vector<Complex>& ev, const Tolerances& tol) {
    for (const auto& z : ev) {
        if (std::abs(z - 1.0) <= tol.eigen_unit) {
            return z;
        }
    }
    return std::nullopt;
}

// lambda with lambda^{hb} = 1 and lambda^h != 1
std::optional<Complex> hb_blocking_eigenvalue(const std::vector<Complex>& ev, int h, int b, const Tolerances& tol) {
    for (const auto& z : ev) {
        const Complex zh = std::pow(z, h);
        const Complex zhb = std::pow(zh, b);
        if (std::abs(zhb - 1.0) <= tol.root && std::abs(zh - 1.0) > tol.root) {
            return z;
        }
    }
    return std::nullopt;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

SpectralReport spectral_report(const LtiSystem& sys, int h, const Tolerances& tol) {
    SpectralReport rep;
    rep.h = h;
    rep.eigenvalues = eigenvalues_of(sys.A());
    rep.has_unit_eigenvalue = unit_eigenvalue(rep.eigenvalues, tol).has_value();
    rep.all_real = std::all_of(rep.eigenvalues.begin(), rep.eigenvalues.end(), [&](Complex z) {
        return std::abs(z.imag()) <= tol.eigen_unit * std::max(1.0, std::abs(z));
    });
    std::vector<Complex> powered;
    powered.reserve(rep.eigenvalues.size());
    for (const auto& z : rep.eigenvalues) {
        powered.push_back(std::pow(z, h));
    }
    rep.simple_spectrum_of_Ah = pairwise_distinct(powered, tol.separation);
    return rep;
}

PbhResult pbh_controllable(const LtiSystem& sys, const Tolerances& tol) {
    const int n = sys.n();
    const int m = sys.m();
    PbhResult out;
    out.controllable = true;
    const double cutoff = rank_threshold(n, n + m, tol.rank_slack);

    for (const Complex lambda : eigenvalues_of(sys.A())) {
        Eigen::MatrixXcd M(n, n + m);
        M.leftCols(n) = lambda * Eigen::MatrixXcd::Identity(n, n) - sys.A().cast<Complex>();
        M.rightCols(m) = sys.B().cast<Complex>();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullU);
        const auto& sv = svd.singularValues();
        if (sv(n - 1) <= cutoff * sv(0)) {
            // u^H M = sigma v^H, so phi = conj(u) gives phi^T M ~ 0
            const Eigen::VectorXcd phi = svd.matrixU().col(n - 1).conjugate();
            out.controllable = false;
            out.eigenvalue = lambda;
            out.witness = phi;
            out.witness_norm = (phi.transpose() * sys.B().cast<Complex>()).norm();
            return out;
        }
    }
    return out;
}

ControllabilityVerdict check_nonrepetitive_sufficient(const LtiSystem& sys, int h, const Tolerances& tol) {
    if (h < 2) {
        throw std::invalid_argument("block length must be at least 2 (h = " + std::to_string(h) + ")");
    }
    ControllabilityVerdict v;
    v.mode = Regime::non_repetitive;
    v.h = h;
    v.b = sys.n();

    const PbhResult pbh = pbh_controllable(sys, tol);
    const SpectralReport spec = spectral_report(sys, h, tol);
    const auto unit = unit_eigenvalue(spec.eigenvalues, tol);

    v.reasons.push_back({"pbh_controllable", pbh.controllable,
                         pbh.controllable ? "rank [lambda I - A | B] = n for every eigenvalue"
                                          : "uncontrollable mode at lambda = " + fmt(*pbh.eigenvalue)});
    v.reasons.push_back({"no_unit_eigenvalue", !unit,
                         unit ? "eigenvalue 1 present (" + fmt(*unit) + ")" : "1 is not an eigenvalue of A"});
    v.reasons.push_back({"simple_spectrum_of_Ah", spec.simple_spectrum_of_Ah,
                         spec.simple_spectrum_of_Ah ? "eigenvalues of A^h pairwise distinct"
                                                    : "A^h has a repeated eigenvalue"});

    const LiftedSystem lifted = lift(sys, build_scheme(h, sys.m()));
    const GramianBundle gram = reachability_matrix(lifted, sys.n());
    const Vector sv = singular_values(gram.Rb);
    v.singular_values = to_std(sv);
    v.numeric_rank = numeric_rank(gram.Rb, tol.rank_slack, gram.scale);
    const bool full = v.numeric_rank == sys.n();

    if (!pbh.controllable || unit) {
        v.controllable = Verdict::no;
        v.decided_by_conditions = true;
    } else if (spec.simple_spectrum_of_Ah) {
        v.controllable = Verdict::yes;
        v.decided_by_conditions = true;
    } else {
        v.controllable = full ? Verdict::yes : Verdict::no;
        v.decided_by_conditions = false;
        v.reasons.push_back({"numeric_rank_fallback", full,
                             "rank of the " + std::to_string(sys.n()) + "-block Gramian is " +
                                 std::to_string(v.numeric_rank)});
    }
    if (v.decided_by_conditions && (v.controllable == Verdict::yes) != full) {
        v.warnings.push_back("condition-based verdict disagrees with numeric Gramian rank " +
                             std::to_string(v.numeric_rank));
    }
    return v;
}

int root_of_unity_order(Complex r, const Tolerances& tol) {
    if (std::abs(std::abs(r) - 1.0) > tol.modulus) {
        return 0;
    }
    Complex p = 1.0;
    for (int k = 1; k <= tol.max_order; ++k) {
        p *= r;
        if (std::abs(p - 1.0) <= tol.root) {
            return k;
        }
    }
    return 0;
}

HSelection select_h(const LtiSystem& sys, const Tolerances& tol) {
    const std::vector<Complex> ev = eigenvalues_of(sys.A());
    if (!pairwise_distinct(ev, tol.separation)) {
        throw PreconditionError("select_h requires pairwise distinct eigenvalues of A");
    }
    if (const auto unit = unit_eigenvalue(ev, tol)) {
        throw PreconditionError("select_h requires 1 not to be an eigenvalue of A (found " + fmt(*unit) + ")");
    }
    const double zero_floor = tol.separation * std::max(spectral_radius(ev), std::numeric_limits<double>::min());

    HSelection out;
    long long l = 1;
    constexpr long long max_lcm = 1LL << 30;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        for (std::size_t j = i + 1; j < ev.size(); ++j) {
            if (std::abs(ev[i]) <= zero_floor || std::abs(ev[j]) <= zero_floor) {
                continue;
            }
            const Complex r = ev[i] / ev[j];
            if (std::abs(std::abs(r) - 1.0) > tol.modulus) {
                continue;
            }
            RatioOrder ro{static_cast<int>(i), static_cast<int>(j), r, root_of_unity_order(r, tol)};
            if (ro.order == 0) {
                out.warnings.push_back("ratio " + fmt(r) + " of eigenvalues " + fmt(ev[i]) + " and " +
                                       fmt(ev[j]) + " has unit modulus but no order <= " +
                                       std::to_string(tol.max_order) + "; pair skipped");
            } else {
                l = std::lcm(l, static_cast<long long>(ro.order));
                if (l > max_lcm) {
                    throw PreconditionError("least common multiple of root-of-unity orders overflows");
                }
            }
            out.ratios.push_back(ro);
        }
    }
    out.h = static_cast<int>(l) + 1;
    std::vector<Complex> powered;
    for (const auto& z : ev) {
        powered.push_back(std::pow(z, out.h));
    }
    out.certified = pairwise_distinct(powered, tol.separation);
    if (!out.certified) {
        out.warnings.push_back("A^" + std::to_string(out.h) + " still has a repeated eigenvalue");
    }
    return out;
}

bool check_real_spectrum_shortcut(const LtiSystem& sys, const Tolerances& tol) {
    const SpectralReport spec = spectral_report(sys, 1, tol);
    if (spec.has_unit_eigenvalue || !spec.all_real) {
        return false;
    }
    std::vector<Complex> re;
    for (const auto& z : spec.eigenvalues) {
        re.emplace_back(z.real(), 0.0);
    }
    if (!pairwise_distinct(re, tol.separation)) {
        return false;
    }
    return pbh_controllable(sys, tol).controllable;
}

HbInvertibility hb_invertible(const LtiSystem& sys, int h, int b, const Tolerances& tol) {
    if (h < 2 || b < 1) {
        throw std::invalid_argument("hb_invertible needs h >= 2 and b >= 1");
    }
    HbInvertibility out;
    const auto ev = eigenvalues_of(sys.A());
    out.offending_eigenvalue = hb_blocking_eigenvalue(ev, h, b, tol);
    out.invertible = !out.offending_eigenvalue.has_value();

    const LiftedSystem lifted = lift(sys, build_scheme(h, sys.m()));
    const Vector sv = singular_values(h_sum(lifted, b));
    const double ref = std::max(sv(0), h_sum_scale(lifted, b));
    out.sigma_ratio = sv(sv.size() - 1) / ref;
    out.numeric_invertible = out.sigma_ratio > rank_threshold(sys.n(), sys.n(), tol.rank_slack);
    if (out.invertible != out.numeric_invertible) {
        std::ostringstream msg;
        msg << "spectral test says H_b is " << (out.invertible ? "invertible" : "singular")
            << " but sigma_min/sigma_max = " << out.sigma_ratio;
        out.warning = msg.str();
    }
    return out;
}

ControllabilityVerdict check_repetitive_sufficient(const LtiSystem& sys, int b, int h, const Tolerances& tol) {
    if (b < 1) {
        throw std::invalid_argument("block horizon must be at least 1 (b = " + std::to_string(b) + ")");
    }
    if (h < 2) {
        throw std::invalid_argument("block length must be at least 2 (h = " + std::to_string(h) + ")");
    }
    ControllabilityVerdict v;
    v.mode = Regime::repetitive;
    v.h = h;
    v.b = b;

    const auto ev = eigenvalues_of(sys.A());
    const auto blocking = hb_blocking_eigenvalue(ev, 2, b, tol);
    const auto unit = unit_eigenvalue(ev, tol);
    const int rank_b = numeric_rank(sys.B(), tol.rank_slack);

    v.reasons.push_back({"hb_invertible_h2", !blocking,
                         blocking ? "eigenvalue " + fmt(*blocking) + " satisfies lambda^(2b) = 1, lambda^2 != 1"
                                  : "no eigenvalue with lambda^(2b) = 1 and lambda^2 != 1"});
    v.reasons.push_back({"no_unit_eigenvalue", !unit,
                         unit ? "eigenvalue 1 present (" + fmt(*unit) + ")" : "1 is not an eigenvalue of A"});
    v.reasons.push_back({"full_rank_B", rank_b == sys.n(),
                         "rank(B) = " + std::to_string(rank_b) + ", n = " + std::to_string(sys.n())});

    const LiftedSystem lifted = lift(sys, build_scheme(h, sys.m()));
    const Matrix M = h_sum(lifted, b) * lifted.Bbar;
    v.singular_values = to_std(singular_values(M));
    v.numeric_rank = numeric_rank(M, tol.rank_slack, h_sum_scale(lifted, b) * lifted.S.norm());
    const bool full = v.numeric_rank == sys.n();

    const bool conditions_hold = !blocking && !unit && rank_b == sys.n();
    if (unit) {
        v.controllable = Verdict::no;
        v.decided_by_conditions = true;
    } else if (conditions_hold && h == 2) {
        v.controllable = Verdict::yes;
        v.decided_by_conditions = true;
    } else {
        v.controllable = full ? Verdict::yes : Verdict::undetermined;
        v.decided_by_conditions = false;
        std::string detail = "rank(H_b Bbar) = " + std::to_string(v.numeric_rank) + " at h = " +
                             std::to_string(h) + ", b = " + std::to_string(b);
        if (conditions_hold) {
            detail += " (block-length-2 conditions hold but h != 2)";
        }
        v.reasons.push_back({"numeric_rank_fallback", full, detail});
    }
    if (v.decided_by_conditions && (v.controllable == Verdict::yes) != full) {
        v.warnings.push_back("condition-based verdict disagrees with numeric rank(H_b Bbar) = " +
                             std::to_string(v.numeric_rank));
    }
    return v;
}

}  // namespace cbctl
