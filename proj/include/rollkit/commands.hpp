#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "rollkit/config.hpp"

namespace rollkit::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSingularity = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kExitVerification = 5;

struct CommandContext {
    SceneConfig config;
    std::filesystem::path out_dir = ".";
    std::optional<double> ell_override;
    std::optional<std::string> plot_kind; // overrides config.plot.kind
    std::uint64_t seed = 12345;
};

// Reduced + reconstructed trajectories plus a run summary. On a singularity
// abort the partial trajectories are still flushed and the summary carries
// the abort record.
int cmd_simulate(const CommandContext& ctx);

// Reduced+reconstructed pipeline against the unreduced multiplier integrator
// from matched initial data; writes a JSON comparison report.
int cmd_oracle_compare(const CommandContext& ctx);

// Relative equilibria at one level, or a bifurcation scan over a range.
int cmd_equilibria(const CommandContext& ctx);

// SVG emission: potential | phase | bifurcation | track.
int cmd_plot(const CommandContext& ctx);

// Runs every structural identity suite and writes the certification report.
int cmd_verify(const CommandContext& ctx);

} // namespace rollkit::cli
