#pragma once

// Cavity-based counterfactual computation: the single-outcome two-cavity
// protocol (L/R with the computer in R) and the chained three-cavity
// protocol (A/B/C with the computer in C), plus seeded Monte Carlo
// trajectories and the coupling-angle tuner.
//
// Absorption is modeled as amplitude transfer to orthogonal sink modes
// "abs:n", keeping the global state pure; conditional states are
// renormalized after each conditioning event while the unconditional
// event probabilities accumulate in the round log.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "cfc/bisect.hpp"
#include "cfc/errors.hpp"
#include "cfc/qstate.hpp"
#include "cfc/rng.hpp"

namespace cfc {

struct ProtocolParams {
    int n = 1;           // periods per sub-evolution and number of chained rounds
    double alpha = 0.0;  // per-period rotation angle, radians
    int outcome = 0;     // computation outcome, 0 or 1

    static double default_alpha(int n) { return std::numbers::pi / (2.0 * n); }

    static ProtocolParams with_default_alpha(int n, int outcome) {
        return {n, default_alpha(n), outcome};
    }

    void validate() const {
        if (n < 1) throw DomainError("protocol requires n >= 1");
        if (!(alpha > 0.0 && alpha < std::numbers::pi / 2.0))
            throw DomainError("protocol requires 0 < alpha < pi/2");
        if (outcome != 0 && outcome != 1) throw DomainError("outcome must be 0 or 1");
    }
};

struct RoundRecord {
    int round = 0;
    double p_absorbed = 0.0;  // unconditional probability of absorption in this round
    double p_c_detect = 0.0;  // unconditional probability of a C detection in this round

    bool operator==(const RoundRecord&) const = default;
};

struct ProtocolResult {
    StateVector final_state;  // conditional on no failure event
    double p_absorbed = 0.0;
    double p_c_detect = 0.0;
    std::map<std::string, double> terminal;  // unconditional final-measurement probabilities
    std::vector<RoundRecord> round_log;

    double terminal_total() const {
        double t = 0.0;
        for (const auto& [k, p] : terminal) t += p;
        return t;
    }
};

inline ModeLabel sink_label(int round) { return "abs:" + std::to_string(round); }

namespace detail {
inline bool is_sink(const ModeLabel& m) { return m.rfind("abs:", 0) == 0; }
}  // namespace detail

/// One period of the two-cavity evolution: the (L,R) rotation by alpha,
/// followed, when the outcome is 1, by transfer of the full R amplitude to
/// the fresh sink mode "abs:round".
inline StateVector jozsa_step(const StateVector& state, double alpha, int outcome, int round) {
    for (const auto& [m, a] : state.amplitudes())
        if (m != "L" && m != "R" && !detail::is_sink(m))
            throw DomainError("jozsa_step expects support on {L, R, abs:*}, got mode " + m);
    if (outcome != 0 && outcome != 1) throw DomainError("outcome must be 0 or 1");
    StateVector rotated = apply(LinearOperator::rotation("L", "R", alpha), state);
    if (outcome == 0) return rotated;
    const ModeLabel sink = sink_label(round);
    if (state.has_mode(sink))
        throw DomainError("sink mode " + sink + " already used in an earlier round");
    return apply(LinearOperator::swap_modes("R", sink), rotated);
}

/// Exact single-outcome protocol from |L>, N periods.
inline ProtocolResult run_jozsa(const ProtocolParams& params) {
    params.validate();
    ProtocolResult result;
    StateVector state = StateVector::basis("L");
    for (int round = 1; round <= params.n; ++round) {
        state = jozsa_step(state, params.alpha, params.outcome, round);
        double p_abs =
            params.outcome == 1 ? std::norm(state.amplitude(sink_label(round))) : 0.0;
        result.round_log.push_back({round, p_abs, 0.0});
        result.p_absorbed += p_abs;
    }
    result.terminal["found_L"] = std::norm(state.amplitude("L"));
    result.terminal["not_found"] = std::norm(state.amplitude("R"));
    StateVector surviving = state.restricted_to({"L", "R"});
    result.final_state =
        surviving.norm_sq() > 0.0 ? surviving.normalized() : StateVector();
    return result;
}

/// Large-N failure asymptote pi^2 / (4 N) for the single-outcome protocol.
inline double jozsa_failure_asymptote(int n) {
    if (n < 1) throw DomainError("asymptote requires n >= 1");
    return std::numbers::pi * std::numbers::pi / (4.0 * n);
}

struct SubroutineOutcome {
    StateVector pre_test_state;    // state just before the C test, sinks included
    StateVector conditional_state; // given no absorption and C empty, renormalized;
                                   // empty when that branch has zero probability
    double p_c_detect = 0.0;       // for this round, conditional on reaching it
    double p_absorbed = 0.0;
};

/// One chained-protocol round: an (A,B) bounce by alpha, N periods of the
/// (B,C) two-cavity evolution (with absorption from C when the outcome is 1),
/// then a projective test for the photon in C.
///
/// Accepts alpha up to and including pi/2; at the endpoint the surviving
/// branch can carry zero probability, in which case conditional_state is
/// left empty.
inline SubroutineOutcome hosten_subroutine(const StateVector& state,
                                           const ProtocolParams& params) {
    for (const auto& [m, a] : state.amplitudes())
        if (m != "A" && m != "B")
            throw DomainError("hosten_subroutine expects support on {A, B}, got mode " + m);
    if (!state.is_normalized())
        throw DomainError("hosten_subroutine requires a normalized input state");
    if (params.n < 1) throw DomainError("protocol requires n >= 1");
    if (!(params.alpha > 0.0 && params.alpha <= std::numbers::pi / 2.0))
        throw DomainError("subroutine requires 0 < alpha <= pi/2");
    if (params.outcome != 0 && params.outcome != 1)
        throw DomainError("outcome must be 0 or 1");

    StateVector current = apply(LinearOperator::rotation("A", "B", params.alpha), state);
    for (int period = 1; period <= params.n; ++period) {
        current = apply(LinearOperator::rotation("B", "C", params.alpha), current);
        if (params.outcome == 1)
            current = apply(LinearOperator::swap_modes("C", sink_label(period)), current);
    }

    SubroutineOutcome out;
    out.pre_test_state = current;
    out.p_c_detect = std::norm(current.amplitude("C"));
    for (const auto& [m, a] : current.amplitudes())
        if (detail::is_sink(m)) out.p_absorbed += std::norm(a);
    StateVector surviving = current.restricted_to({"A", "B"});
    if (surviving.norm_sq() > 0.0) out.conditional_state = surviving.normalized();
    return out;
}

/// Chains N subroutines from |A>; the final measurement distinguishes A vs B.
inline ProtocolResult run_hosten(const ProtocolParams& params) {
    params.validate();
    ProtocolResult result;
    StateVector state = StateVector::basis("A");
    double survival = 1.0;
    for (int round = 1; round <= params.n; ++round) {
        SubroutineOutcome sub = hosten_subroutine(state, params);
        result.round_log.push_back(
            {round, survival * sub.p_absorbed, survival * sub.p_c_detect});
        result.p_absorbed += survival * sub.p_absorbed;
        result.p_c_detect += survival * sub.p_c_detect;
        survival *= std::max(0.0, 1.0 - sub.p_absorbed - sub.p_c_detect);
        if (sub.conditional_state.amplitudes().empty())
            throw InvariantBreach("chained protocol branch died at round " +
                                  std::to_string(round));
        state = sub.conditional_state;
    }
    result.terminal["found_A"] = survival * std::norm(state.amplitude("A"));
    result.terminal["found_B"] = survival * std::norm(state.amplitude("B"));
    result.final_state = state;
    return result;
}

/// Conditional final A-amplitude of the outcome-1 chained protocol; the
/// quantity the tuner drives to zero. Real by construction.
inline double hosten_final_a_amplitude(int n, double alpha) {
    ProtocolResult r = run_hosten({n, alpha, 1});
    Complex a = r.final_state.amplitude("A");
    if (std::abs(a.imag()) > comparison_tolerance())
        throw InvariantBreach("final A-amplitude acquired an imaginary part");
    return a.real();
}

/// Searches for alpha* such that the outcome-1 conditional final state has
/// A-amplitude of magnitude below 1e-10, by bisection on
/// alpha -> <A|final(alpha)>. The initial bracket is
/// [pi/(2N) (1 - 1/N), pi/(2N) (1 + 1/N)], widened on demand up to ten
/// times within (0, pi/2). Throws NoRootInBracket when the amplitude never
/// changes sign; for this protocol family that is the generic situation,
/// because per-round absorption damps the B component and keeps the
/// A-amplitude strictly positive for every admissible alpha (at N = 2 the
/// unnormalized amplitude is exactly cos^4 alpha).
inline double tune_alpha(int n, int outcome_target = 1) {
    if (outcome_target != 1) throw DomainError("tuning targets outcome 1");
    if (n < 2) throw DomainError("tune_alpha requires n >= 2");
    auto f = [n](double alpha) { return hosten_final_a_amplitude(n, alpha); };
    const double center = ProtocolParams::default_alpha(n);
    const double half = center / n;
    constexpr double kAmplitudeTolerance = 1e-10;
    const double lo_limit = 1e-12;
    const double hi_limit = std::numbers::pi / 2.0 - 1e-12;
    Bracket bracket =
        find_sign_change(f, center - half, center + half, 10, lo_limit, hi_limit);
    return bisect(f, bracket.lo, bracket.hi, kAmplitudeTolerance);
}

struct TrajectoryHistogram {
    std::vector<std::uint64_t> absorbed_per_round;  // index by round, 1..n
    std::vector<std::uint64_t> c_detect_per_round;  // index by round, 1..n
    std::map<std::string, std::uint64_t> terminal;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;

    bool operator==(const TrajectoryHistogram&) const = default;

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto c : absorbed_per_round) t += c;
        for (auto c : c_detect_per_round) t += c;
        for (const auto& [k, c] : terminal) t += c;
        return t;
    }
};

enum class Protocol { jozsa, hosten };

/// Samples stochastic collapse at every absorption opportunity and C test.
/// Trial i draws from the derived stream derive_stream(seed, i), so the
/// histogram is independent of trial sharding and identical seeds give
/// identical histograms.
inline TrajectoryHistogram simulate_trajectories(const ProtocolParams& params,
                                                 Protocol protocol, std::uint64_t trials,
                                                 std::uint64_t seed) {
    params.validate();
    if (trials < 1) throw DomainError("trials must be >= 1");
    TrajectoryHistogram hist;
    hist.trials = trials;
    hist.seed = seed;
    hist.absorbed_per_round.assign(static_cast<std::size_t>(params.n) + 1, 0);
    hist.c_detect_per_round.assign(static_cast<std::size_t>(params.n) + 1, 0);
    const double c = std::cos(params.alpha), s = std::sin(params.alpha);

    if (protocol == Protocol::jozsa) {
        hist.terminal["found_L"] = 0;
        hist.terminal["not_found"] = 0;
        for (std::uint64_t i = 0; i < trials; ++i) {
            SplitMix64 rng(derive_stream(seed, i));
            double l = 1.0, r = 0.0;
            bool absorbed = false;
            for (int round = 1; round <= params.n && !absorbed; ++round) {
                double l2 = c * l - s * r, r2 = s * l + c * r;
                l = l2;
                r = r2;
                if (params.outcome == 1) {
                    if (rng.uniform() < r * r) {
                        ++hist.absorbed_per_round[static_cast<std::size_t>(round)];
                        absorbed = true;
                    } else {
                        // Conditioned on no absorption the state is exactly |L>.
                        l = 1.0;
                        r = 0.0;
                    }
                }
            }
            if (!absorbed) {
                if (rng.uniform() < l * l)
                    ++hist.terminal["found_L"];
                else
                    ++hist.terminal["not_found"];
            }
        }
        return hist;
    }

    hist.terminal["found_A"] = 0;
    hist.terminal["found_B"] = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        SplitMix64 rng(derive_stream(seed, i));
        double a = 1.0, b = 0.0;
        bool done = false;
        for (int round = 1; round <= params.n && !done; ++round) {
            double a2 = c * a - s * b, b2 = s * a + c * b;
            a = a2;
            b = b2;
            double cm = 0.0;
            for (int period = 1; period <= params.n && !done; ++period) {
                double b3 = c * b - s * cm, cm3 = s * b + c * cm;
                b = b3;
                cm = cm3;
                if (params.outcome == 1) {
                    if (rng.uniform() < cm * cm) {
                        ++hist.absorbed_per_round[static_cast<std::size_t>(round)];
                        done = true;
                    } else {
                        cm = 0.0;
                        double norm = std::sqrt(a * a + b * b);
                        a /= norm;
                        b /= norm;
                    }
                }
            }
            if (done) break;
            if (params.outcome == 0) {
                if (rng.uniform() < cm * cm) {
                    ++hist.c_detect_per_round[static_cast<std::size_t>(round)];
                    done = true;
                } else {
                    double norm = std::sqrt(a * a + b * b);
                    a /= norm;
                    b /= norm;
                }
            }
        }
        if (!done) {
            if (rng.uniform() < a * a)
                ++hist.terminal["found_A"];
            else
                ++hist.terminal["found_B"];
        }
    }
    return hist;
}

}  // namespace cfc
