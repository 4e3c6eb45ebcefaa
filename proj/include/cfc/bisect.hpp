#pragma once

// Bracketed bisection with on-demand bracket widening. Bisection over a
// faster method keeps convergence unconditional for the smooth, cheap
// functions tuned here.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "cfc/errors.hpp"

namespace cfc {

struct Bracket {
    double lo;
    double hi;
};

/// Expands [lo, hi] symmetrically about its center (doubling the half-width
/// each step, clamped to [min_x, max_x]) until f changes sign across it.
/// Throws NoRootInBracket after max_expansions failed expansions.
template <typename F>
Bracket find_sign_change(F&& f, double lo, double hi, int max_expansions, double min_x,
                         double max_x) {
    const double center = 0.5 * (lo + hi);
    double half = 0.5 * (hi - lo);
    for (int expansion = 0; expansion <= max_expansions; ++expansion) {
        double a = std::max(min_x, center - half);
        double b = std::min(max_x, center + half);
        if (std::signbit(f(a)) != std::signbit(f(b))) return {a, b};
        half *= 2.0;
        if (a <= min_x && b >= max_x) break;  // nothing left to widen into
    }
    throw NoRootInBracket("no sign change after widening the bracket");
}

/// Bisects a sign change down to |f(x)| <= f_tol. The bracket must straddle
/// a root; throws NoRootInBracket otherwise.
template <typename F>
double bisect(F&& f, double lo, double hi, double f_tol, int max_iterations = 200) {
    double flo = f(lo);
    if (std::abs(flo) <= f_tol) return lo;
    double fhi = f(hi);
    if (std::abs(fhi) <= f_tol) return hi;
    if (std::signbit(flo) == std::signbit(fhi))
        throw NoRootInBracket("bisect requires a sign change across the bracket");
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < max_iterations; ++i) {
        mid = 0.5 * (lo + hi);
        double fmid = f(mid);
        if (std::abs(fmid) <= f_tol) return mid;
        if (std::signbit(fmid) == std::signbit(flo)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
        if (hi - lo <= std::abs(mid) * 1e-17) break;  // interval exhausted at double precision
    }
    throw NoRootInBracket("bisection interval collapsed before reaching the f tolerance");
}

}  // namespace cfc
