#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rollkit/coefficients.hpp"
#include "rollkit/reduced.hpp"
#include "rollkit/reconstruction.hpp"

namespace rollkit {

// Scene description consumed by the CLI. Parsing is strict: unknown keys and
// malformed values are rejected before any computation starts.
struct SceneConfig {
    struct Surface {
        std::string kind; // "torus" | "general"
        double R = 0.0, r = 0.0;
        std::optional<double> h0, f0;
        bool override_standard_position = false;
        std::vector<std::array<double, 2>> curvature; // sampled (theta, r)
        std::optional<double> theta_min, theta_max;
    } surface;

    struct Body {
        double m = 1.0, g = 1.0;
        std::string preset; // "solid" | "hollow" | "" (explicit)
        std::optional<double> I1, I3;
    } body;

    struct Initial {
        double theta0 = 0.0;
        std::optional<double> p_theta0, ell;          // reduced style
        std::optional<double> theta_dot0, psi_dot0;   // rate style
        double psi0 = 0.0, phi0 = 0.0, x0 = 0.0, y0 = 0.0;
        bool present = false;
    } initial;

    struct Integrator {
        std::string method = "rk4";
        double dt = 1e-3;
        double t_end = 10.0;
        int output_every = 10;
        std::optional<double> oracle_dt; // default dt/10
    } integrator;

    struct Equilibria {
        std::optional<double> ell;
        std::optional<double> ell_min, ell_max;
        int samples = 400;
        bool present = false;
    } equilibria;

    struct Plot {
        std::string kind; // potential | phase | bifurcation | track
        std::optional<double> ell;
        std::vector<double> levels;
        std::optional<double> theta_min, theta_max, p_min, p_max;
        int n_theta = 200, n_p = 200;
        bool present = false;
    } plot;

    struct Verify {
        int grid = 1000;
        int random_samples = 1000;
    } verify;

    std::string output_prefix = "run";

    static SceneConfig from_json(const nlohmann::json& j);
    static SceneConfig load(const std::filesystem::path& path);

    nlohmann::json canonical_json() const;
    std::string hash() const;

    GeometryCache make_geometry() const;
    BodyParams make_body() const;
    IntegrateOptions make_integrate_options() const;
    // Resolves either initial-condition style against the coefficients.
    ReducedState make_reduced_state(const ReducedCoefficients& coeffs) const;
    PlanarInit make_planar_init() const;
};

} // namespace rollkit
