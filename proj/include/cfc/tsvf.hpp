#pragma once

// Two-state-vector analyses: weak values, ABL conditional probabilities for
// intermediate ideal measurements, the three-box pair, a von Neumann
// pointer coupled through a network, and the measurement-strength / leaked
// flux scaling dichotomy.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "cfc/errors.hpp"
#include "cfc/interferometer.hpp"
#include "cfc/qstate.hpp"
#include "cfc/two_state.hpp"

namespace cfc {

/// <phi|Op|psi> / <phi|psi>.
inline Complex weak_value(const TwoStateVector& tsv, const LinearOperator& op) {
    Complex denom = overlap(tsv);
    if (std::abs(denom) <= comparison_tolerance())
        throw ZeroPostSelection("weak value undefined: vanishing pre/post overlap");
    return inner(tsv.backward, apply(op, tsv.forward)) / denom;
}

/// Probability that an intermediate ideal measurement of the projector finds
/// the system, given both the pre- and the post-selection:
/// |<phi|P|psi>|^2 / (|<phi|P|psi>|^2 + |<phi|(I-P)|psi>|^2).
inline double abl_probability(const TwoStateVector& tsv, const LinearOperator& proj) {
    if (!proj.is_projector()) throw DomainError("abl_probability requires a projector");
    Complex found = expectation(tsv.backward, proj, tsv.forward);
    Complex not_found = overlap(tsv) - found;
    double num = std::norm(found);
    double den = num + std::norm(not_found);
    if (den <= comparison_tolerance() * comparison_tolerance())
        throw UndefinedConditional("both conditional branches have zero amplitude");
    return num / den;
}

/// The canonical pre/post pair: (|A>+|B>+|C>)/sqrt(3) and (<A|+<B|-<C|)/sqrt(3).
inline TwoStateVector three_box() {
    const double r = 1.0 / std::sqrt(3.0);
    return {make_state({{"A", r}, {"B", r}, {"C", r}}),
            make_state({{"A", r}, {"B", r}, {"C", -r}})};
}

/// Gaussian pointer discretized on a symmetric grid; g is the conditional
/// shift. Only g/sigma matters physically, so sigma stays at 1 and the
/// grid half-width is wide enough that trapezoidal moments are exact to
/// well below 1e-10.
struct PointerConfig {
    double g = 0.0;
    double sigma = 1.0;
    double half_width = 8.0;
    int points = 256;

    void validate() const {
        if (!(sigma > 0.0)) throw DomainError("pointer sigma must be positive");
        if (points < 64) throw DomainError("pointer grid requires at least 64 points");
        if (!(half_width >= 6.0 * sigma + std::abs(g)))
            throw GridTooNarrow("pointer grid half-width must be >= 6 sigma + |g|");
    }
};

struct PointerResult {
    double mean_shift = 0.0;
    double p_postselect = 0.0;
    double leaked_flux = 0.0;
};

namespace detail {

struct PointerGrid {
    std::vector<double> x;
    std::vector<double> w;  // trapezoidal weights

    explicit PointerGrid(const PointerConfig& cfg) {
        const int m = cfg.points;
        const double dx = 2.0 * cfg.half_width / (m - 1);
        x.resize(m);
        w.resize(m);
        for (int j = 0; j < m; ++j) {
            x[j] = -cfg.half_width + j * dx;
            w[j] = (j == 0 || j == m - 1) ? 0.5 * dx : dx;
        }
    }
};

inline double gaussian_packet(double x, double sigma) {
    // Position wavefunction with |G|^2 a normal density of std dev sigma.
    const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
    return norm * std::exp(-x * x / (4.0 * sigma * sigma));
}

inline PointerResult pointer_moments(const PointerGrid& grid, const std::vector<Complex>& chi) {
    PointerResult out;
    double first = 0.0;
    for (std::size_t j = 0; j < chi.size(); ++j) {
        const double density = std::norm(chi[j]) * grid.w[j];
        out.p_postselect += density;
        first += grid.x[j] * density;
    }
    if (out.p_postselect <= 1e-300)
        throw ZeroPostSelection("pointer post-selection probability is zero");
    out.mean_shift = first / out.p_postselect;
    return out;
}

}  // namespace detail

/// Couples the pointer to the projector on `probe` via the standard shift
/// interaction, evolves photon (x) pointer through the rest of the network,
/// post-selects the detector, and reports the pointer mean, the
/// post-selection probability, and the leaked flux: the probability that an
/// ideal nondemolition test at probe F during the coupled (not
/// post-selected) run finds the photon.
inline PointerResult pointer_measurement(const Network& net, const std::string& detector,
                                         const std::string& probe, const PointerConfig& cfg) {
    cfg.validate();
    const Probe* coupled = net.find_probe(probe);
    if (!coupled) throw DomainError("unknown probe: " + probe);
    auto det = net.detectors.find(detector);
    if (det == net.detectors.end()) throw DomainError("unknown detector: " + detector);
    const Probe* flux_probe = net.find_probe("F");

    auto plain = forward_stages(net);
    const StateVector& at_coupling = plain[coupled->stage];
    detail::PointerGrid grid(cfg);
    const int m = cfg.points;

    std::vector<Complex> chi(m);
    std::vector<Complex> flux_amp(m, Complex(0.0, 0.0));
    const bool flux_after_coupling = flux_probe && flux_probe->stage > coupled->stage;
    for (int j = 0; j < m; ++j) {
        // Photon branch amplitudes carrying this grid point's pointer value:
        // the branch through the coupled probe is shifted by g.
        std::map<ModeLabel, Complex> slice;
        for (const auto& [mode, amp] : at_coupling.amplitudes()) {
            const double shift = (mode == coupled->mode) ? cfg.g : 0.0;
            slice[mode] = amp * detail::gaussian_packet(grid.x[j] - shift, cfg.sigma);
        }
        StateVector branch{std::move(slice)};
        for (std::size_t k = coupled->stage; k < net.elements.size(); ++k) {
            branch = apply(net.elements[k].to_operator(), branch);
            if (flux_after_coupling && flux_probe->stage == k + 1)
                flux_amp[j] = branch.amplitude(flux_probe->mode);
        }
        chi[j] = branch.amplitude(det->second);
    }

    PointerResult out = detail::pointer_moments(grid, chi);
    if (flux_probe) {
        if (flux_after_coupling) {
            for (int j = 0; j < m; ++j) out.leaked_flux += std::norm(flux_amp[j]) * grid.w[j];
        } else {
            // Coupling acts downstream of F and cannot influence it.
            out.leaked_flux = std::norm(plain[flux_probe->stage].amplitude(flux_probe->mode));
        }
    }
    return out;
}

/// Pointer coupling on a bare two-state vector. With no path structure the
/// reported leaked flux is the occupation of the coupled probe in the
/// normalized forward state.
inline PointerResult pointer_measurement(const TwoStateVector& tsv, const ModeLabel& probe,
                                         const PointerConfig& cfg) {
    cfg.validate();
    const Complex total = overlap(tsv);
    const Complex through = std::conj(tsv.backward.amplitude(probe)) * tsv.forward.amplitude(probe);
    detail::PointerGrid grid(cfg);
    std::vector<Complex> chi(cfg.points);
    for (int j = 0; j < cfg.points; ++j) {
        chi[j] = (total - through) * detail::gaussian_packet(grid.x[j], cfg.sigma) +
                 through * detail::gaussian_packet(grid.x[j] - cfg.g, cfg.sigma);
    }
    PointerResult out = detail::pointer_moments(grid, chi);
    double fwd_norm = tsv.forward.norm_sq();
    if (fwd_norm > 0.0) out.leaked_flux = std::norm(tsv.forward.amplitude(probe)) / fwd_norm;
    return out;
}

enum class FluxRegime { per_photon, collective };

struct FluxScalingResult {
    double expected_photons = 0.0;   // N_photons x per-photon leaked flux at F
    double coupling = 0.0;           // the per-photon coupling strength used
    double per_photon_flux = 0.0;
};

/// Measurement-strength dichotomy on the transparent-computer network,
/// probe B, post-selection D1: one pointer per photon needs g = 1/sqrt(N),
/// a single collectively coupled pointer only g = 1/N. The reporting
/// constant c = 1; only the N-scaling is meaningful.
inline FluxScalingResult flux_scaling(std::int64_t n_photons, FluxRegime regime) {
    if (n_photons < 1) throw DomainError("flux_scaling requires n_photons >= 1");
    const double n = static_cast<double>(n_photons);
    const double g = regime == FluxRegime::per_photon ? 1.0 / std::sqrt(n) : 1.0 / n;
    PointerConfig cfg;
    cfg.g = g;
    PointerResult pm = pointer_measurement(build_nested_mzi(0), "D1", "B", cfg);
    return {n * pm.leaked_flux, g, pm.leaked_flux};
}

struct DisturbanceResult {
    Complex weak_value{0.0, 0.0};
    double found_probability = 0.0;  // of the inserted strong measurement
};

namespace detail {

struct CutLocation {
    std::size_t stage = 0;
    ModeLabel mode;
};

inline CutLocation resolve_location(const Network& net, const std::string& name) {
    if (const Probe* p = net.find_probe(name)) return {p->stage, p->mode};
    auto det = net.detectors.find(name);
    if (det != net.detectors.end()) return {net.stage_count(), det->second};
    // Raw internal modes (e.g. the absorber sink) are measured at the final cut.
    for (const auto& e : net.elements)
        if (e.port_a == name || e.port_b == name) return {net.stage_count(), name};
    if (net.input == name) return {net.stage_count(), name};
    throw DomainError("unknown measurement location: " + name);
}

/// I - |mode><mode|: the not-found Kraus operator of an ideal test at mode.
inline LinearOperator complement_projector(const ModeLabel& mode) {
    return LinearOperator::from_entries({{mode, mode, Complex(0.0, 0.0)}}, true);
}

}  // namespace detail

/// Inserts an ideal projective measurement at `measure_at`, keeps the
/// not-found branch, recomputes the two-state vector conditioned on the
/// detector, and returns the weak value at `weak_at` along with the
/// found-probability of the inserted measurement. A strong test on the
/// lead-out F leaves the forward state at B untouched but nullifies the
/// backward one, driving the B weak value to zero.
inline DisturbanceResult strong_measurement_disturbance(const Network& net,
                                                        const std::string& measure_at,
                                                        const std::string& weak_at,
                                                        const std::string& detector = "D1") {
    const detail::CutLocation cut = detail::resolve_location(net, measure_at);
    const Probe* weak_probe = net.find_probe(weak_at);
    if (!weak_probe) throw DomainError("unknown probe: " + weak_at);
    auto det = net.detectors.find(detector);
    if (det == net.detectors.end()) throw DomainError("unknown detector: " + detector);

    DisturbanceResult out;
    out.found_probability = std::norm(forward_stages(net)[cut.stage].amplitude(cut.mode));

    std::vector<StagedOperator> conditioning{{cut.stage, detail::complement_projector(cut.mode)}};
    auto fwd = forward_stages(net, conditioning);
    auto bwd = backward_stages(net, detector, conditioning);
    Complex post_amp = fwd.back().amplitude(det->second);
    if (std::abs(post_amp) <= comparison_tolerance())
        throw ZeroPostSelection("conditioning removed all amplitude at detector " + detector);
    out.weak_value = std::conj(bwd[weak_probe->stage].amplitude(weak_probe->mode)) *
                     fwd[weak_probe->stage].amplitude(weak_probe->mode) / post_amp;
    return out;
}

}  // namespace cfc
