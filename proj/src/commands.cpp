#include "cbctl/commands.hpp"

#include <fstream>
#include <ostream>

#include "cbctl/csv.hpp"
#include "cbctl/design.hpp"
#include "cbctl/linalg.hpp"

namespace cbctl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

struct ResolvedH {
    int h = 2;
    bool automatic = false;
    std::optional<HSelection> selection;
};

ResolvedH resolve_h(const ProblemFile& p, const LtiSystem& sys) {
    ResolvedH r;
    if (p.h) {
        r.h = *p.h;
        return r;
    }
    r.automatic = true;
    if (p.regime == Regime::repetitive) {
        // identical-block conditions are stated for h = 2
        r.h = 2;
    } else {
        r.selection = select_h(sys, p.tol);
        r.h = r.selection->h;
    }
    return r;
}

json h_json(const ResolvedH& r) {
    json j{{"h", r.h}, {"source", r.automatic ? "auto" : "given"}};
    if (r.selection) {
        json ratios = json::array();
        for (const auto& ro : r.selection->ratios) {
            ratios.push_back({{"i", ro.i}, {"j", ro.j}, {"ratio", complex_json(ro.ratio)}, {"order", ro.order}});
        }
        j["certificate"] = {{"simple_spectrum_of_Ah", r.selection->certified},
                            {"ratios", ratios},
                            {"warnings", r.selection->warnings}};
    }
    return j;
}

ControllabilityVerdict analyze(const ProblemFile& p, const LtiSystem& sys, int h) {
    return p.regime == Regime::repetitive ? check_repetitive_sufficient(sys, p.b, h, p.tol)
                                          : check_nonrepetitive_sufficient(sys, h, p.tol);
}

void verdict_lines(const ControllabilityVerdict& v, std::vector<std::string>& lines) {
    lines.push_back(std::string("regime: ") + to_string(v.mode) + ", h = " + std::to_string(v.h) +
                    (v.mode == Regime::repetitive ? ", b = " : ", rank test over b = ") + std::to_string(v.b) +
                    " blocks");
    for (const auto& r : v.reasons) {
        lines.push_back(std::string("  [") + (r.holds ? "true " : "false") + "] " + r.name + ": " + r.detail);
    }
    lines.push_back(std::string("controllable: ") + to_string(v.controllable) +
                    (v.decided_by_conditions ? " (sufficient/necessary conditions)" : " (numeric rank fallback)") +
                    ", numeric rank " + std::to_string(v.numeric_rank));
    for (const auto& w : v.warnings) {
        lines.push_back("warning: " + w);
    }
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << j.dump(2) << '\n';
}

void write_plot_script(const fs::path& path, const ProblemFile& p, int m) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    const auto n = p.A.rows();
    out << "# gnuplot script: state and input traces versus k, targets dashed\n"
        << "# usage: gnuplot -p plot.gp\n"
        << "set datafile separator ','\n"
        << "set key outside right\n"
        << "set grid\n"
        << "set multiplot layout 2,1\n"
        << "set title 'States'\n"
        << "set xlabel 'k'\n"
        << "plot ";
    for (Eigen::Index i = 0; i < n; ++i) {
        out << "'states.csv' using 1:" << i + 2 << " with linespoints lc " << i + 1 << " title 'x_" << i + 1
            << "', ";
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        out << format_double(p.xf(i)) << " with lines dashtype 2 lc " << i + 1 << " title 'x_" << i + 1
            << " target'" << (i + 1 < n ? ", " : "\n");
    }
    out << "set title 'Charge-balanced inputs'\n"
        << "plot ";
    for (int i = 0; i < m; ++i) {
        out << "'inputs.csv' using 1:" << i + 2 << " with steps lc " << i + 1 << " title 'u_" << i + 1 << "'"
            << (i + 1 < m ? ", " : "\n");
    }
    out << "unset multiplot\n";
}

}  // namespace

void apply_overrides(ProblemFile& p, const CommandOptions& opts) {
    if (opts.h) {
        if (*opts.h == "auto") {
            p.h.reset();
        } else {
            std::size_t used = 0;
            int h = 0;
            try {
                h = std::stoi(*opts.h, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != opts.h->size() || h < 2) {
                throw ParseError("--h expects an integer >= 2 or 'auto', got '" + *opts.h + "'", "--h");
            }
            p.h = h;
        }
    }
    if (opts.b) {
        if (*opts.b < 1) {
            throw ParseError("--b must be at least 1", "--b");
        }
        p.b = *opts.b;
    }
    if (opts.regime) p.regime = *opts.regime;
    if (opts.tol_term) p.tol.terminal = *opts.tol_term;
    if (opts.tol_cb) p.tol.charge_balance = *opts.tol_cb;
    if (opts.max_order) p.tol.max_order = *opts.max_order;
}

json to_json(const ControllabilityVerdict& v) {
    json reasons = json::array();
    for (const auto& r : v.reasons) {
        reasons.push_back({{"condition", r.name}, {"holds", r.holds}, {"detail", r.detail}});
    }
    return {{"mode", to_string(v.mode)},
            {"controllable", to_string(v.controllable)},
            {"decided_by", v.decided_by_conditions ? "conditions" : "numeric_rank"},
            {"reasons", reasons},
            {"numeric_rank", v.numeric_rank},
            {"singular_values", v.singular_values},
            {"h", v.h},
            {"b", v.b},
            {"warnings", v.warnings},
            {"tolerance_note", "root-of-unity and simple-spectrum tests are toleranced numeric surrogates"}};
}

RunReport cmd_analyze(const ProblemFile& p, const CommandOptions& opts) {
    const LtiSystem sys(p.A, p.B);
    const ResolvedH rh = resolve_h(p, sys);
    const ControllabilityVerdict v = analyze(p, sys, rh.h);

    RunReport rep;
    rep.body = {{"command", "analyze"}, {"block_length", h_json(rh)}, {"verdict", to_json(v)}};
    if (rh.automatic && rh.selection) {
        rep.lines.push_back("selected h = " + std::to_string(rh.h) +
                            (rh.selection->certified ? " (A^h has a simple spectrum)" : " (not certified)"));
    }
    verdict_lines(v, rep.lines);
    if (opts.write_report) {
        fs::create_directories(opts.out);
        const fs::path path = opts.out / "analysis.json";
        write_json(path, rep.body);
        rep.manifest.push_back(path);
    }
    return rep;
}

RunReport cmd_design(const ProblemFile& p, const CommandOptions& opts) {
    const LtiSystem sys(p.A, p.B);
    const ResolvedH rh = resolve_h(p, sys);
    const ControllabilityVerdict v = analyze(p, sys, rh.h);

    RunReport rep;
    rep.body = {{"command", "design"}, {"block_length", h_json(rh)}, {"verdict", to_json(v)}};
    verdict_lines(v, rep.lines);
    if (v.controllable == Verdict::no) {
        rep.exit_code = kExitPrecondition;
        rep.lines.push_back("design skipped: system is not controllable under charge-balanced inputs");
        return rep;
    }

    const BlockScheme scheme = build_scheme(rh.h, sys.m());
    const LiftedSystem lifted = lift(sys, scheme);
    const SteeringTask task{p.x0, p.xf, p.b, p.regime};
    const ControlPlan plan = design(lifted, task, p.tol);
    const PlanReport check = verify_plan(sys, scheme, task, plan, p.tol);

    std::vector<double> block_energy;
    for (const auto& U : plan.blocks) {
        block_energy.push_back(U.squaredNorm());
    }
    rep.body["design"] = {{"regime", to_string(plan.regime)},
                          {"h", plan.h},
                          {"b", plan.b},
                          {"steps", plan.h * plan.b},
                          {"energy", plan.energy},
                          {"residual", plan.residual},
                          {"terminal_error", check.terminal_error},
                          {"block_energies", block_energy},
                          {"max_imbalance", *std::max_element(check.imbalance.begin(), check.imbalance.end())},
                          {"terminal_state", vector_json(check.trajectory.states.back())},
                          {"pass", check.pass}};

    fs::create_directories(opts.out);
    const fs::path inputs = opts.out / "inputs.csv";
    const fs::path states = opts.out / "states.csv";
    const fs::path blocks = opts.out / "blocks.csv";
    write_csv(inputs, series_table(plan.flat_inputs, "u"));
    write_csv(states, series_table(check.trajectory.states, "x"));
    CsvTable bt;
    bt.header = {"p", "energy", "imbalance"};
    for (std::size_t i = 0; i < plan.blocks.size(); ++i) {
        bt.add_row({std::to_string(i), format_double(block_energy[i]), format_double(check.imbalance[i])});
    }
    write_csv(blocks, bt);
    rep.manifest = {inputs, states, blocks};
    if (opts.plot) {
        const fs::path plot = opts.out / "plot.gp";
        write_plot_script(plot, p, sys.m());
        rep.manifest.push_back(plot);
    }
    if (opts.write_report) {
        const fs::path report = opts.out / "report.json";
        rep.manifest.push_back(report);
        json manifest = json::array();
        for (const auto& f : rep.manifest) manifest.push_back(f.string());
        rep.body["manifest"] = manifest;
        write_json(report, rep.body);
    }

    rep.lines.push_back("plan: " + std::to_string(plan.b) + " blocks of " + std::to_string(plan.h) +
                        " steps, energy " + format_double(plan.energy) + ", terminal error " +
                        format_double(check.terminal_error));
    if (!check.pass) {
        rep.exit_code = kExitFailure;
        rep.lines.push_back("verification FAILED (terminal tolerance " + format_double(p.tol.terminal) +
                            ", charge tolerance " + format_double(p.tol.charge_balance) + ")");
    }
    return rep;
}

RunReport cmd_sweep_h(const ProblemFile& p, const CommandOptions& opts) {
    if (p.regime != Regime::non_repetitive) {
        throw PreconditionError("sweep-h applies to the non-repetitive regime");
    }
    if (opts.h_min < 2 || opts.h_max < opts.h_min) {
        throw ParseError("invalid h range [" + std::to_string(opts.h_min) + ", " + std::to_string(opts.h_max) + "]",
                         "--h-range");
    }
    const LtiSystem sys(p.A, p.B);
    CsvTable table;
    table.header = {"h",           "pbh_controllable", "no_unit_eigenvalue", "simple_spectrum_of_Ah",
                    "conditions_verdict", "gramian_rank", "bbar_rank",          "controllable",
                    "energy"};
    RunReport rep;
    json rows = json::array();
    for (int h = opts.h_min; h <= opts.h_max; ++h) {
        const ControllabilityVerdict v = check_nonrepetitive_sufficient(sys, h, p.tol);
        const bool c1 = v.reasons[0].holds;
        const bool c2 = v.reasons[1].holds;
        const bool c3 = v.reasons[2].holds;
        const char* by_conditions = !(c1 && c2) ? "no" : (c3 ? "yes" : "undetermined");
        const LiftedSystem lifted = lift(sys, build_scheme(h, sys.m()));
        const int bbar_rank = numeric_rank(lifted.Bbar, p.tol.rank_slack, lifted.S.norm());
        std::string energy;
        try {
            energy = format_double(design_nonrepetitive(lifted, {p.x0, p.xf, p.b, Regime::non_repetitive}, p.tol).energy);
        } catch (const ReachabilityError&) {
        }
        table.add_row({std::to_string(h), c1 ? "1" : "0", c2 ? "1" : "0", c3 ? "1" : "0", by_conditions,
                       std::to_string(v.numeric_rank), std::to_string(bbar_rank), to_string(v.controllable),
                       energy});
        rows.push_back({{"h", h},
                        {"conditions_verdict", by_conditions},
                        {"gramian_rank", v.numeric_rank},
                        {"bbar_rank", bbar_rank},
                        {"controllable", to_string(v.controllable)},
                        {"energy", energy.empty() ? json(nullptr) : json(std::stod(energy))}});
        rep.lines.push_back("h = " + std::to_string(h) + ": conditions " + by_conditions + ", Gramian rank " +
                            std::to_string(v.numeric_rank) + ", controllable " + to_string(v.controllable) +
                            (energy.empty() ? ", target unreachable" : ", energy " + energy));
    }
    rep.body = {{"command", "sweep-h"}, {"rows", rows}};
    fs::create_directories(opts.out);
    const fs::path sweep = opts.out / "sweep.csv";
    write_csv(sweep, table);
    rep.manifest.push_back(sweep);
    return rep;
}

RunReport cmd_simulate(const ProblemFile& p, const CommandOptions& opts) {
    if (!opts.inputs) {
        throw ParseError("simulate needs --inputs <csv>", "--inputs");
    }
    const LtiSystem sys(p.A, p.B);
    const std::vector<Vector> inputs = series_from_table(read_csv(*opts.inputs));
    const Trajectory traj = simulate(sys, p.x0, inputs);
    const double err = (traj.states.back() - p.xf).norm();

    RunReport rep;
    rep.body = {{"command", "simulate"},
                {"steps", inputs.size()},
                {"terminal_state", vector_json(traj.states.back())},
                {"terminal_error", err}};
    fs::create_directories(opts.out);
    const fs::path states = opts.out / "states.csv";
    write_csv(states, series_table(traj.states, "x"));
    rep.manifest.push_back(states);
    rep.lines.push_back("simulated " + std::to_string(inputs.size()) + " steps, terminal error " + format_double(err));
    return rep;
}

int run_command(const std::string& verb, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        ProblemFile p = load_problem(opts.problem);
        apply_overrides(p, opts);
        RunReport rep;
        if (verb == "analyze") {
            rep = cmd_analyze(p, opts);
        } else if (verb == "design") {
            rep = cmd_design(p, opts);
        } else if (verb == "sweep-h") {
            rep = cmd_sweep_h(p, opts);
        } else if (verb == "simulate") {
            rep = cmd_simulate(p, opts);
        } else {
            err << "unknown command '" << verb << "'\n";
            return kExitParse;
        }
        for (const auto& l : rep.lines) {
            out << l << '\n';
        }
        for (const auto& f : rep.manifest) {
            out << "wrote " << f.string() << '\n';
        }
        return rep.exit_code;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitParse;
    } catch (const ReachabilityError& e) {
        err << "unreachable: " << e.what() << '\n';
        return kExitUnreachable;
    } catch (const PreconditionError& e) {
        err << "precondition failed: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const AnalysisError& e) {
        err << "analysis error: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace cbctl
