#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "rollkit/trajectory.hpp"

// Fixed- and adaptive-step Runge-Kutta machinery shared by the reduced,
// reconstruction and unreduced integrators.
namespace rollkit::detail {

template <std::size_t N, class RHS>
std::array<double, N> rk4_step(const RHS& rhs, double t,
                               const std::array<double, N>& y, double dt) {
    using V = std::array<double, N>;
    const auto axpy = [](const V& a, double s, const V& b) {
        V r;
        for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    const V k1 = rhs(t, y);
    const V k2 = rhs(t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
    const V k3 = rhs(t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
    const V k4 = rhs(t + dt, axpy(y, dt, k3));
    V out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

template <std::size_t N>
struct Dp45Attempt {
    std::array<double, N> y;
    double err_norm; // scaled; accept when <= 1
};

// Dormand-Prince 5(4) embedded pair.
template <std::size_t N, class RHS>
Dp45Attempt<N> dp45_attempt(const RHS& rhs, double t, const std::array<double, N>& y,
                            double dt, double atol, double rtol) {
    using V = std::array<double, N>;
    const auto comb = [&](std::initializer_list<std::pair<double, const V*>> terms) {
        V r = y;
        for (const auto& [c, k] : terms)
            for (std::size_t i = 0; i < N; ++i) r[i] += dt * c * (*k)[i];
        return r;
    };
    const V k1 = rhs(t, y);
    const V k2 = rhs(t + dt / 5.0, comb({{1.0 / 5, &k1}}));
    const V k3 = rhs(t + 3.0 * dt / 10.0, comb({{3.0 / 40, &k1}, {9.0 / 40, &k2}}));
    const V k4 = rhs(t + 4.0 * dt / 5.0,
                     comb({{44.0 / 45, &k1}, {-56.0 / 15, &k2}, {32.0 / 9, &k3}}));
    const V k5 = rhs(t + 8.0 * dt / 9.0,
                     comb({{19372.0 / 6561, &k1},
                           {-25360.0 / 2187, &k2},
                           {64448.0 / 6561, &k3},
                           {-212.0 / 729, &k4}}));
    const V k6 = rhs(t + dt, comb({{9017.0 / 3168, &k1},
                                   {-355.0 / 33, &k2},
                                   {46732.0 / 5247, &k3},
                                   {49.0 / 176, &k4},
                                   {-5103.0 / 18656, &k5}}));
    const V y5 = comb({{35.0 / 384, &k1},
                       {500.0 / 1113, &k3},
                       {125.0 / 192, &k4},
                       {-2187.0 / 6784, &k5},
                       {11.0 / 84, &k6}});
    const V k7 = rhs(t + dt, y5);
    // 4th-order weights.
    constexpr double b4[7] = {5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
                              -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
    const V* ks[7] = {&k1, &k2, &k3, &k4, &k5, &k6, &k7};
    double err2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double y4i = y[i];
        for (int j = 0; j < 7; ++j) y4i += dt * b4[j] * (*ks[j])[i];
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        const double e = (y5[i] - y4i) / sc;
        err2 += e * e;
    }
    return {y5, std::sqrt(err2 / N)};
}

// Drives a state through [0, t_end], emitting rows at uniform output times
// t_k = k * dt * output_every. `guard(t, y)` returns an empty string while the
// state is admissible, otherwise the abort message. Domain errors thrown from
// stage evaluations also abort with status singularity.
template <std::size_t N, class RHS, class Emit, class Guard>
IntegrationStatus integrate_driver(const RHS& rhs, std::array<double, N> y,
                                   const IntegrateOptions& o, const Emit& emit,
                                   const Guard& guard, std::string* message) {
    emit(0.0, y);
    const double out_dt = o.dt * o.output_every;
    try {
        if (o.method == Method::rk4) {
            const long long total = std::llround(o.t_end / o.dt);
            for (long long k = 1; k <= total; ++k) {
                y = rk4_step<N>(rhs, (k - 1) * o.dt, y, o.dt);
                const double t = k * o.dt;
                if (auto why = guard(t, y); !why.empty()) {
                    *message = why;
                    return IntegrationStatus::singularity;
                }
                if (k % o.output_every == 0) emit(t, y);
            }
            return IntegrationStatus::ok;
        }
        // Adaptive: clamp steps so output times are hit exactly.
        double t = 0.0;
        double dt = o.dt;
        long long next_out = 1;
        while (t < o.t_end - 1e-14 * o.t_end) {
            const double t_target = std::min(next_out * out_dt, o.t_end);
            double step = std::min(dt, t_target - t);
            for (;;) {
                if (step < 1e-14 * std::max(1.0, std::abs(t))) {
                    *message = "adaptive step collapsed below minimum";
                    return IntegrationStatus::step_failure;
                }
                const auto att = dp45_attempt<N>(rhs, t, y, step, o.abs_tol, o.rel_tol);
                if (att.err_norm <= 1.0) {
                    y = att.y;
                    t += step;
                    const double grow = att.err_norm > 0.0
                                            ? 0.9 * std::pow(att.err_norm, -0.2)
                                            : 5.0;
                    dt = step * std::min(5.0, std::max(0.2, grow));
                    break;
                }
                step *= std::min(0.9, std::max(0.2, 0.9 * std::pow(att.err_norm, -0.2)));
            }
            if (auto why = guard(t, y); !why.empty()) {
                *message = why;
                return IntegrationStatus::singularity;
            }
            if (t >= t_target - 1e-12 * std::max(1.0, t_target) &&
                t_target == next_out * out_dt) {
                emit(t_target, y);
                ++next_out;
            }
        }
        return IntegrationStatus::ok;
    } catch (const std::domain_error& e) {
        *message = e.what();
        return IntegrationStatus::singularity;
    }
}

} // namespace rollkit::detail
