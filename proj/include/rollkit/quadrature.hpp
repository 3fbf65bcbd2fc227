#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace rollkit {

// Gauss-Kronrod 7/15 pair on [-1, 1] (QUADPACK abscissae/weights).
namespace gk15 {
inline constexpr double xk[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
inline constexpr double wk[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
// Gauss weights for the embedded 7-point rule (odd-index abscissae + center).
inline constexpr double wg[4] = {
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776};
} // namespace gk15

// One Kronrod-15 panel; returns {integral, |K15 - G7| error estimate}.
template <class F>
std::pair<double, double> kronrod15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = h * gk15::xk[i];
        const double fv = (i == 7) ? f(c) : f(c - dx) + f(c + dx);
        k += gk15::wk[i] * fv;
        if (i & 1) g += gk15::wg[i / 2] * fv; // Gauss nodes sit at odd indices
    }
    return {k * h, std::abs(k - g) * h};
}

// Adaptive bisection driven by the Kronrod error estimate. Absolute
// tolerance; depth-limited so a non-integrable input fails loudly instead
// of spinning.
template <class F>
double integrate_adaptive(const F& f, double a, double b, double abs_tol,
                          int max_depth = 40) {
    struct Seg { double a, b, tol; int depth; };
    double total = 0.0;
    Seg stack[128];
    int top = 0;
    stack[top++] = {a, b, abs_tol, 0};
    while (top > 0) {
        const Seg s = stack[--top];
        auto [val, err] = kronrod15(f, s.a, s.b);
        if (err <= s.tol || s.depth >= max_depth) {
            if (s.depth >= max_depth && err > s.tol)
                throw std::runtime_error("integrate_adaptive: max depth reached");
            total += val;
            continue;
        }
        const double m = 0.5 * (s.a + s.b);
        stack[top++] = {s.a, m, 0.5 * s.tol, s.depth + 1};
        stack[top++] = {m, s.b, 0.5 * s.tol, s.depth + 1};
    }
    return total;
}

} // namespace rollkit
