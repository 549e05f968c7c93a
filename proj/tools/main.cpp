#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "perispec/runner.hpp"

using namespace perispec;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    int workers = 1;
    bool no_cache = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_run_flags) {
    cmd->add_option("--config", args.config_path, "path to the JSON run configuration")
        ->required();
    if (with_run_flags) {
        cmd->add_option("--out", args.out_dir, "output directory (overrides the config)");
        cmd->add_option("--workers", args.workers, "worker threads for independent tasks");
        cmd->add_flag("--no-cache", args.no_cache, "bypass the artifact cache");
    }
}

int dispatch(const std::string& verb, const CommonArgs& args) {
    RunConfig cfg = parse_config_file(args.config_path);
    RunOptions opts;
    opts.workers = args.workers;
    opts.use_cache = !args.no_cache;
    opts.out_override = args.out_dir;

    if (verb == "validate") return cmd_validate(cfg, std::cout);
    if (verb == "bands") return cmd_bands(cfg, opts, std::cout);
    if (verb == "dispersion") return cmd_dispersion(cfg, opts, std::cout);
    if (verb == "spectrum") return cmd_spectrum(cfg, opts, std::cout);
    if (verb == "weyl") return cmd_weyl(cfg, opts, std::cout);
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perispec: essential spectra of periodic planes with open waveguides"};
    app.require_subcommand(1);

    CommonArgs args;
    const char* verbs[] = {"validate", "bands", "dispersion", "spectrum", "weyl"};
    const char* descs[] = {
        "check a configuration and report every violated invariant",
        "sample band functions and report bands, gaps, and sigma0",
        "sweep the strip family, certify trapped modes, report sigma#",
        "full run: bands + dispersion + essential-spectrum union",
        "residual decay study of localized Bloch or Floquet waves"};
    for (int i = 0; i < 5; ++i) {
        CLI::App* cmd = app.add_subcommand(verbs[i], descs[i]);
        add_common(cmd, args, std::string(verbs[i]) != "validate");
    }

    CLI11_PARSE(app, argc, argv);

    std::string verb = app.get_subcommands().front()->get_name();
    try {
        return dispatch(verb, args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
