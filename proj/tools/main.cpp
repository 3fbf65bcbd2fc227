#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "rollkit/commands.hpp"
#include "rollkit/version.hpp"

using namespace rollkit;

int main(int argc, char** argv) {
    CLI::App app{"rubber-rolling simulation and verification toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    double ell_override = 0.0;
    bool has_ell = false;
    std::string plot_kind;
    std::uint64_t seed = 12345;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "scene config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--ell", ell_override, "override the conserved level")
            ->each([&](const std::string&) { has_ell = true; });
        sub->add_option("--seed", seed, "seed for randomized verification grids");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "integrate and reconstruct");
    CLI::App* compare = app.add_subcommand("oracle-compare",
                                           "pipeline vs unreduced integrator");
    CLI::App* equilibria = app.add_subcommand("equilibria", "relative equilibria / scan");
    CLI::App* plot = app.add_subcommand("plot", "emit SVG figures");
    plot->add_option("--kind", plot_kind, "potential|phase|bifurcation|track");
    CLI::App* verify = app.add_subcommand("verify", "run the certification suites");
    for (CLI::App* sub : {simulate, compare, equilibria, plot, verify}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        cli::CommandContext ctx;
        ctx.config = SceneConfig::load(config_path);
        ctx.out_dir = out_dir;
        if (has_ell) ctx.ell_override = ell_override;
        if (!plot_kind.empty()) ctx.plot_kind = plot_kind;
        ctx.seed = seed;

        try {
            if (!std::filesystem::exists(ctx.out_dir))
                std::filesystem::create_directories(ctx.out_dir);
        } catch (const std::filesystem::filesystem_error& e) {
            throw IoError(std::string("cannot create output directory: ") + e.what());
        }

        if (simulate->parsed()) return cli::cmd_simulate(ctx);
        if (compare->parsed()) return cli::cmd_oracle_compare(ctx);
        if (equilibria->parsed()) return cli::cmd_equilibria(ctx);
        if (plot->parsed()) return cli::cmd_plot(ctx);
        if (verify->parsed()) return cli::cmd_verify(ctx);
        return cli::kExitConfig;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return cli::kExitConfig;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return cli::kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
