// Copyright 2026 The reluqubo Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <cmath>
#include <utility>

namespace reluqubo::detail {

template <class F>
double simpson_step(const F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson quadrature with Richardson correction.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-10, int max_depth = 48) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

/// Minimizer of a unimodal f on [a, b] by golden-section search.
template <class F>
double golden_section_minimize(const F& f, double a, double b, double tol = 1e-12) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (std::abs(b - a) > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

/// Root of an increasing function g on [a, b] with g(a) <= 0 <= g(b).
template <class G>
double bisect_increasing(const G& g, double a, double b, int iterations = 200) {
    for (int it = 0; it < iterations && b - a > 0.0; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        if (g(m) <= 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace reluqubo::detail
