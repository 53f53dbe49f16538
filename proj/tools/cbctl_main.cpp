#include <iostream>

#include <CLI11.hpp>

#include "cbctl/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Charge-balanced controllability analysis and minimum-energy design"};
    app.require_subcommand(1);

    cbctl::CommandOptions opts;
    std::string regime;

    auto add_common = [&](CLI::App* sub) {
        // --h names the block length, so help is long-form only
        sub->set_help_flag("--help", "Print this help message and exit");
        sub->add_option("--problem", opts.problem, "Problem file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opts.out, "Output directory");
        sub->add_option("--h", opts.h, "Block length (integer >= 2 or 'auto')");
        sub->add_option("--b", opts.b, "Number of blocks");
        sub->add_option("--regime", regime, "rep | nonrep");
        sub->add_option("--tol-term", opts.tol_term, "Terminal-state tolerance");
        sub->add_option("--tol-cb", opts.tol_cb, "Charge-balance tolerance");
        sub->add_option("--max-order", opts.max_order, "Largest root-of-unity order searched");
    };

    auto* analyze = app.add_subcommand("analyze", "Controllability verdict under charge-balanced inputs");
    add_common(analyze);

    auto* design = app.add_subcommand("design", "Minimum-energy plan, CSV traces and plot script");
    add_common(design);
    design->add_flag("--plot,!--no-plot", opts.plot, "Emit a gnuplot script (default on)");

    auto* sweep = app.add_subcommand("sweep-h", "Tabulate verdicts and energies over a range of block lengths");
    add_common(sweep);
    sweep->add_option("--h-min", opts.h_min, "Smallest block length")->capture_default_str();
    sweep->add_option("--h-max", opts.h_max, "Largest block length")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Replay a per-step input CSV through the plant");
    add_common(simulate);
    simulate->add_option("--inputs", opts.inputs, "Input CSV (k, u_1 ... u_m)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cbctl::kExitParse;
    }

    if (!regime.empty()) {
        try {
            opts.regime = cbctl::parse_regime(regime);
        } catch (const cbctl::ParseError& e) {
            std::cerr << "parse error: " << e.what() << '\n';
            return cbctl::kExitParse;
        }
    }
    const std::string verb = app.get_subcommands().front()->get_name();
    return cbctl::run_command(verb, opts, std::cout, std::cerr);
}
