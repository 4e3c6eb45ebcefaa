#pragma once

// Shared helpers for the test suites: seeded random states and the
// chi-squared acceptance threshold.

#include <cmath>
#include <vector>

#include "cfc/qstate.hpp"
#include "cfc/rng.hpp"

namespace testutil {

inline cfc::Complex random_amplitude(cfc::SplitMix64& rng) {
    return {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
}

inline cfc::StateVector random_state(cfc::SplitMix64& rng,
                                     const std::vector<cfc::ModeLabel>& modes,
                                     bool normalize = true) {
    std::vector<std::pair<cfc::ModeLabel, cfc::Complex>> entries;
    entries.reserve(modes.size());
    for (const auto& m : modes) entries.emplace_back(m, random_amplitude(rng));
    cfc::StateVector state = cfc::make_state(entries);
    return normalize ? state.normalized() : state;
}

/// 0.999 quantile of chi-squared with `dof` degrees of freedom via the
/// Wilson-Hilferty cube approximation (error well under 0.5 for dof >= 10,
/// negligible next to the stochastic spread of the statistic itself).
inline double chi2_quantile_999(double dof) {
    constexpr double z999 = 3.090232306167813;  // Phi^-1(0.999)
    double t = 2.0 / (9.0 * dof);
    double base = 1.0 - t + z999 * std::sqrt(t);
    return dof * base * base * base;
}

}  // namespace testutil
