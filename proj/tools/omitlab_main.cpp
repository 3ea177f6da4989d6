// omitlab — command-line front end.
//
// One subcommand per produced data set.  All subcommands share the same
// override flags; anything not overridden comes from the config file (or the
// bundled default apparatus description when --config is omitted).
//
// Exit codes: 0 success, 2 configuration error (bad flags, unparseable or
// invalid config), 3 numerical failure (singular solve, fit that did not
// converge), 4 precondition violation (aliased sampling, unresolved dip, ...),
// 1 anything unexpected.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "omitlab/commands.hpp"
#include "omitlab/config.hpp"
#include "omitlab/errors.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::string out_dir;
    std::string format;
    std::uint64_t seed = 0;
    std::size_t points = 0;
    bool quiet = false;

    bool have_config = false;
    bool have_out = false;
    bool have_format = false;
    bool have_seed = false;
    bool have_points = false;
};

void attach_common_flags(CLI::App* cmd, CliOverrides& o) {
    cmd->add_option("--config", o.config_path, "Config file (key = value sections)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out_dir, "Output directory (created if missing)");
    cmd->add_option("--seed", o.seed, "Master seed for all stochastic stages");
    cmd->add_option("--format", o.format, "Table output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--points", o.points, "Base number of sweep grid points")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--quiet", o.quiet, "Suppress progress notes on stdout");
}

omitlab::RunConfig assemble_config(const CliOverrides& o) {
    omitlab::RunConfig cfg = o.have_config
                                 ? omitlab::load_config(o.config_path)
                                 : omitlab::parse_config(omitlab::embedded_default_config());
    if (o.have_out) cfg.output.path = o.out_dir;
    if (o.have_format) cfg.output.format = o.format;
    if (o.have_seed) cfg.noise.seed = o.seed;
    if (o.have_points) cfg.sweep.points = o.points;
    omitlab::validate(cfg);
    return cfg;
}

int dispatch(const std::string& name, const CliOverrides& o) {
    using Runner = void (*)(const omitlab::RunConfig&, const omitlab::RunOptions&);
    Runner run = nullptr;
    if (name == "response-sweep") run = omitlab::cmd_response_sweep;
    else if (name == "linewidth-vs-power") run = omitlab::cmd_linewidth_vs_power;
    else if (name == "finesse-scan") run = omitlab::cmd_finesse_scan;
    else if (name == "ellipse") run = omitlab::cmd_ellipse;
    else if (name == "oracle-compare") run = omitlab::cmd_oracle_compare;
    else if (name == "design-check") run = omitlab::cmd_design_check;
    else if (name == "gas-damping") run = omitlab::cmd_gas_damping;
    if (run == nullptr) {
        std::fprintf(stderr, "omitlab: unknown command '%s'\n", name.c_str());
        return 2;
    }

    try {
        const omitlab::RunConfig cfg = assemble_config(o);
        omitlab::RunOptions opt;
        opt.quiet = o.quiet;
        run(cfg, opt);
        return 0;
    } catch (const omitlab::ParseError& e) {
        std::fprintf(stderr, "omitlab %s: config parse error: %s\n", name.c_str(), e.what());
        return 2;
    } catch (const omitlab::ValidationError& e) {
        std::fprintf(stderr, "omitlab %s: invalid config: %s\n", name.c_str(), e.what());
        return 2;
    } catch (const omitlab::SingularSystem& e) {
        std::fprintf(stderr, "omitlab %s: singular system (cond %.3e): %s\n", name.c_str(),
                     e.condition, e.what());
        return 3;
    } catch (const omitlab::NoConvergence& e) {
        std::fprintf(stderr,
                     "omitlab %s: fit did not converge after %d iterations "
                     "(last center %.6f Hz, fwhm %.6f Hz, depth %.6f): %s\n",
                     name.c_str(), e.iterations, e.center_hz, e.fwhm_hz, e.depth, e.what());
        return 3;
    } catch (const omitlab::DomainError& e) {
        std::fprintf(stderr, "omitlab %s: domain error: %s\n", name.c_str(), e.what());
        return 4;
    } catch (const omitlab::OutOfValidityRange& e) {
        std::fprintf(stderr, "omitlab %s: out of validity range: %s\n", name.c_str(), e.what());
        return 4;
    } catch (const omitlab::GridTooCoarse& e) {
        std::fprintf(stderr, "omitlab %s: grid too coarse: %s\n", name.c_str(), e.what());
        return 4;
    } catch (const omitlab::DipNotResolved& e) {
        std::fprintf(stderr, "omitlab %s: dip not resolved: %s\n", name.c_str(), e.what());
        return 4;
    } catch (const omitlab::AliasError& e) {
        std::fprintf(stderr, "omitlab %s: aliased sampling: %s\n", name.c_str(), e.what());
        return 4;
    } catch (const omitlab::WindowTooShort& e) {
        std::fprintf(stderr, "omitlab %s: window too short: %s\n", name.c_str(), e.what());
        return 4;
    } catch (const omitlab::DegenerateInput& e) {
        std::fprintf(stderr, "omitlab %s: degenerate input: %s\n", name.c_str(), e.what());
        return 4;
    } catch (const omitlab::OmitError& e) {
        std::fprintf(stderr, "omitlab %s: error: %s\n", name.c_str(), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "omitlab %s: unexpected error: %s\n", name.c_str(), e.what());
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"omitlab — membrane-in-the-middle filter cavity simulator"};
    app.require_subcommand(1);

    CliOverrides overrides;

    struct CommandSpec {
        const char* name;
        const char* help;
    };
    const CommandSpec specs[] = {
        {"response-sweep",
         "Sweep the narrow transparency window: |t|, phase, rotation angle, group delay"},
        {"linewidth-vs-power",
         "Transparency-window linewidth and dip depth vs control input power"},
        {"finesse-scan", "Coupled-cavity finesse vs membrane position over half a wavelength"},
        {"ellipse", "Noise-ellipse rotation across the window: Monte Carlo vs closed form"},
        {"oracle-compare",
         "Exact two-sideband solve vs sideband and closed-form approximations"},
        {"design-check", "Thermal-decoherence feasibility bound for the configured apparatus"},
        {"gas-damping", "Gas damping rate and quality factor vs background pressure"},
    };
    for (const CommandSpec& s : specs) {
        CLI::App* cmd = app.add_subcommand(s.name, s.help);
        attach_common_flags(cmd, overrides);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11's own exit codes are not part of this tool's contract: help and
        // version exit 0, every command-line usage error exits 2.
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    overrides.have_config = sub->count("--config") > 0;
    overrides.have_out = sub->count("--out") > 0;
    overrides.have_format = sub->count("--format") > 0;
    overrides.have_seed = sub->count("--seed") > 0;
    overrides.have_points = sub->count("--points") > 0;
    return dispatch(sub->get_name(), overrides);
}
