// Serial vs OpenMP timing for the grid-sweep kernels. Run manually:
//   ./build/bench/rollkit_bench

#include <chrono>
#include <cstdio>
#include <vector>

#include "rollkit/certify.hpp"
#include "rollkit/parallel.hpp"
#include "rollkit/reduced.hpp"

using namespace rollkit;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_of(const std::function<void()>& fn) {
    const auto t0 = clock_type::now();
    fn();
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void row(const char* name, double serial, double parallel) {
    std::printf("%-28s %9.3f s %9.3f s   x%.2f\n", name, serial, parallel,
                serial / parallel);
}

} // namespace

int main() {
    const GeometryCache geom(SurfaceProfile::torus(1.0, 0.5));
    const BodyParams body = BodyParams::solid_torus(1.0, 1.0, 0.5, 1.0);
    const ReducedCoefficients coeffs(geom, body);

    std::printf("threads: %d\n", par::max_threads());
    std::printf("%-28s %11s %11s\n", "kernel", "serial", "openmp");

    // Conserved-density residual over a dense grid.
    {
        const std::size_t n = 400000;
        const auto residual = [&](std::size_t i) {
            const double th = 0.01 + (kPi - 0.02) * i / (n - 1.0);
            return conformal_residual(coeffs, th, 1e-5);
        };
        double rs = 0.0, rp = 0.0;
        const double ts = seconds_of([&] { rs = par::max_over_serial(n, residual); });
        const double tp = seconds_of([&] { rp = par::max_over_parallel(n, residual); });
        row("nose residual grid", ts, tp);
        if (rs != rp) std::printf("  mismatch: %g vs %g\n", rs, rp);
    }

    // Equilibrium scan across levels.
    {
        double sa = 0.0, sb = 0.0;
        const double ts = seconds_of(
            [&] { sa = bifurcation_scan(coeffs, 0.01, 2.0, 1200, false).rows.size(); });
        const double tp = seconds_of(
            [&] { sb = bifurcation_scan(coeffs, 0.01, 2.0, 1200, true).rows.size(); });
        row("bifurcation scan", ts, tp);
        if (sa != sb) std::printf("  mismatch: %g vs %g rows\n", sa, sb);
    }

    // Phase-portrait energy grid and contour extraction.
    {
        PhasePortraitOptions po;
        po.theta_min = 0.05;
        po.theta_max = kPi - 0.05;
        po.p_min = -1.5;
        po.p_max = 1.5;
        po.n_theta = 700;
        po.n_p = 700;
        const std::vector<double> levels{0.45, 0.7, 1.0, 1.3, 1.8};
        std::size_t na = 0, nb = 0;
        po.parallel = false;
        const double ts = seconds_of(
            [&] { na = phase_portrait(coeffs, 0.1, levels, po)[0].segments.size(); });
        po.parallel = true;
        const double tp = seconds_of(
            [&] { nb = phase_portrait(coeffs, 0.1, levels, po)[0].segments.size(); });
        row("phase portrait grid", ts, tp);
        if (na != nb) std::printf("  mismatch: %zu vs %zu segments\n", na, nb);
    }

    return 0;
}
