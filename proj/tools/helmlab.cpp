#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "helmlab/cli.hpp"
#include "helmlab/errors.hpp"

namespace {

const char* kKinds[] = {"geometry-check", "constants", "identities", "sweep", "quasimode", "coercivity", "scatter"};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"helmlab: 2-D Helmholtz exterior scattering experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    std::optional<std::uint64_t> seed;

    for (const char* kind : kKinds) {
        auto* sub = app.add_subcommand(kind, std::string("run the ") + kind + " experiment");
        sub->add_option("--config", config_path, "experiment config file")->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides run.output)");
        sub->add_option("--threads", threads, "worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);
        sub->add_option("--seed", seed, "seed for randomized checks (overrides run.seed)");
    }
    auto* manifest = app.add_subcommand("plot-manifest", "write manifest.json for the plotting component");
    manifest->add_option("--out", out_dir, "results directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : helmlab::kExitConfig;
    }

    try {
        if (threads > 0) omp_set_num_threads(threads);
        if (manifest->parsed()) {
            std::vector<std::string> warnings;
            const std::string path = helmlab::emit_plot_inputs(out_dir, &warnings);
            for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
            std::cout << path << '\n';
            return helmlab::kExitOk;
        }
        const std::string kind = app.get_subcommands().front()->get_name();
        helmlab::ExperimentConfig cfg = config_path.empty() ? helmlab::ExperimentConfig{}
                                                            : helmlab::load_config(config_path);
        cfg.kind = helmlab::parse_kind(kind);
        if (!out_dir.empty()) cfg.output = out_dir;
        if (seed) cfg.seed = *seed;
        helmlab::run_experiment(cfg, std::cout);
        return helmlab::kExitOk;
    } catch (const helmlab::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return helmlab::kExitConfig;
    } catch (const helmlab::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return helmlab::kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
