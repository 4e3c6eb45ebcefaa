#pragma once

// Scenario dispatch over the protocol modules, plus parameter sweeps.
// Reports are deterministic: identical scenario + seed gives byte-identical
// serialized output.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfc/errors.hpp"
#include "cfc/interferometer.hpp"
#include "cfc/report.hpp"
#include "cfc/scenario.hpp"
#include "cfc/tsvf.hpp"
#include "cfc/version.hpp"
#include "cfc/zeno.hpp"

namespace cfc {

namespace detail {

inline void put_complex(std::map<std::string, JsonValue>& results, const std::string& stem,
                        Complex value) {
    results[stem + "_re"] = JsonValue(value.real());
    results[stem + "_im"] = JsonValue(value.imag());
}

inline JsonValue round_log_table(const ProtocolResult& result) {
    JsonValue::Array rows;
    for (const auto& record : result.round_log) {
        JsonValue::Object row;
        row["round"] = JsonValue(record.round);
        row["p_absorbed"] = JsonValue(record.p_absorbed);
        row["p_c_detect"] = JsonValue(record.p_c_detect);
        rows.push_back(JsonValue(std::move(row)));
    }
    return JsonValue(std::move(rows));
}

inline JsonValue histogram_table(const TrajectoryHistogram& hist) {
    JsonValue::Array rows;
    auto add = [&rows](const std::string& event, std::uint64_t count) {
        JsonValue::Object row;
        row["count"] = JsonValue(count);
        row["event"] = JsonValue(event);
        rows.push_back(JsonValue(std::move(row)));
    };
    for (std::size_t n = 1; n < hist.absorbed_per_round.size(); ++n)
        add("absorbed:" + std::to_string(n), hist.absorbed_per_round[n]);
    for (std::size_t n = 1; n < hist.c_detect_per_round.size(); ++n)
        add("c_detect:" + std::to_string(n), hist.c_detect_per_round[n]);
    for (const auto& [event, count] : hist.terminal) add(event, count);
    return JsonValue(std::move(rows));
}

inline void fill_zeno_results(Report& report, const Scenario& scenario,
                              const ProtocolParams& params, Protocol protocol) {
    ProtocolResult result = protocol == Protocol::jozsa ? run_jozsa(params) : run_hosten(params);
    auto& results = report.results;
    results["alpha"] = JsonValue(params.alpha);
    results["p_absorbed"] = JsonValue(result.p_absorbed);
    results["p_c_detect"] = JsonValue(result.p_c_detect);
    for (const auto& [name, p] : result.terminal) results["p_" + name] = JsonValue(p);
    for (const auto& [mode, amp] : result.final_state.amplitudes())
        put_complex(results, "final_" + mode, amp);
    if (protocol == Protocol::jozsa) {
        double asymptote = jozsa_failure_asymptote(params.n);
        results["failure_asymptote"] = JsonValue(asymptote);
        if (params.outcome == 1)
            results["ratio_to_asymptote"] = JsonValue(result.p_absorbed / asymptote);
    } else {
        results["fidelity_A"] = JsonValue(std::norm(result.final_state.amplitude("A")));
        results["fidelity_B"] = JsonValue(std::norm(result.final_state.amplitude("B")));
    }
    report.tables["round_log"] = round_log_table(result);

    const std::int64_t trials = get_int(scenario, "trials", 0);
    if (trials > 0) {
        TrajectoryHistogram hist = simulate_trajectories(
            params, protocol, static_cast<std::uint64_t>(trials), report.seed);
        report.tables["histogram"] = histogram_table(hist);
    }
}

inline ProtocolParams zeno_params(const Scenario& scenario, std::uint64_t /*seed*/) {
    ProtocolParams params;
    params.n = static_cast<int>(get_int(scenario, "N", 1));
    params.outcome = static_cast<int>(get_int(scenario, "outcome", 0));
    if (get_text(scenario, "alpha", "") == "auto") {
        params.alpha = tune_alpha(params.n);
    } else if (auto alpha = get_real(scenario, "alpha")) {
        params.alpha = *alpha;
    } else {
        params.alpha = ProtocolParams::default_alpha(params.n);
    }
    return params;
}

inline void fill_nested_mzi_results(Report& report, const Scenario& scenario) {
    const int outcome = static_cast<int>(get_int(scenario, "outcome", 0));
    const std::string detector = get_text(scenario, "detector", "D1");
    Network net = build_nested_mzi(outcome);
    auto& results = report.results;
    auto amps = propagate_forward(net);
    for (const auto& [name, amp] : amps) {
        put_complex(results, "amp_" + name, amp);
        if (net.detectors.count(name)) results["p_" + name] = JsonValue(std::norm(amp));
    }
    results["p_absorbed"] = JsonValue(std::norm(forward_stages(net).back().amplitude("sink")));
    if (std::abs(amps.at(detector)) > comparison_tolerance()) {
        for (const auto& [name, amp] : propagate_backward(net, detector))
            put_complex(results, "back_" + name, amp);
    }
}

inline void fill_three_box_results(Report& report) {
    TwoStateVector tsv = three_box();
    auto& results = report.results;
    put_complex(results, "overlap", overlap(tsv));
    for (const std::string box : {"A", "B", "C"}) {
        LinearOperator proj = LinearOperator::projector({box});
        put_complex(results, "wv_" + box, weak_value(tsv, proj));
        results["abl_" + box] = JsonValue(abl_probability(tsv, proj));
    }
}

inline void fill_pointer_results(Report& report, const Scenario& scenario) {
    const int outcome = static_cast<int>(get_int(scenario, "outcome", 0));
    const std::string detector = get_text(scenario, "detector", "D1");
    const std::string probe = get_text(scenario, "probe", "B");
    PointerConfig cfg;
    cfg.g = get_real(scenario, "g").value();
    Network net = build_nested_mzi(outcome);
    PointerResult pm = pointer_measurement(net, detector, probe, cfg);
    auto& results = report.results;
    results["g"] = JsonValue(cfg.g);
    results["mean_shift"] = JsonValue(pm.mean_shift);
    results["p_postselect"] = JsonValue(pm.p_postselect);
    results["leaked_flux"] = JsonValue(pm.leaked_flux);
    if (cfg.g > 0.0) results["mean_shift_over_g"] = JsonValue(pm.mean_shift / cfg.g);
    put_complex(results, "weak_value",
                weak_value(extract_two_state_vector(net, detector),
                           LinearOperator::projector({probe})));
}

inline void fill_flux_scaling_results(Report& report, const Scenario& scenario) {
    const std::int64_t n_photons = get_int(scenario, "N_photons", 1);
    const std::string regime_text = get_text(scenario, "regime", "per_photon");
    FluxRegime regime =
        regime_text == "per_photon" ? FluxRegime::per_photon : FluxRegime::collective;
    FluxScalingResult fs = flux_scaling(n_photons, regime);
    auto& results = report.results;
    results["regime"] = JsonValue(regime_text);
    results["coupling_g"] = JsonValue(fs.coupling);
    results["per_photon_flux"] = JsonValue(fs.per_photon_flux);
    results["expected_photons_through_F"] = JsonValue(fs.expected_photons);
}

inline void apply_output_filter(Report& report, const Scenario& scenario) {
    auto it = scenario.params.find("outputs");
    if (it == scenario.params.end()) return;
    std::map<std::string, JsonValue> filtered;
    const std::string& list = it->second.s;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        std::size_t comma = list.find(',', pos);
        std::string name = list.substr(pos, comma == std::string::npos ? comma : comma - pos);
        while (!name.empty() && name.front() == ' ') name.erase(name.begin());
        while (!name.empty() && name.back() == ' ') name.pop_back();
        if (!name.empty()) {
            auto found = report.results.find(name);
            if (found == report.results.end()) {
                std::string valid;
                for (const auto& [k, v] : report.results) valid += (valid.empty() ? "" : ", ") + k;
                throw DomainError("unknown output field '" + name + "' (available: " + valid + ")");
            }
            filtered.emplace(*found);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    report.results = std::move(filtered);
}

}  // namespace detail

/// Runs one scenario. The effective seed is the override when given, else
/// the scenario's "seed" key, else 1; it is echoed in the provenance block.
inline Report run_scenario(const Scenario& scenario,
                           std::optional<std::uint64_t> seed_override = std::nullopt) {
    Report report;
    report.scenario = scenario;
    report.version = version();
    report.tolerance = comparison_tolerance();
    report.seed = seed_override.value_or(static_cast<std::uint64_t>(get_int(scenario, "seed", 1)));

    if (scenario.kind == "jozsa") {
        detail::fill_zeno_results(report, scenario, detail::zeno_params(scenario, report.seed),
                                  Protocol::jozsa);
    } else if (scenario.kind == "hosten") {
        detail::fill_zeno_results(report, scenario, detail::zeno_params(scenario, report.seed),
                                  Protocol::hosten);
    } else if (scenario.kind == "nested_mzi") {
        detail::fill_nested_mzi_results(report, scenario);
    } else if (scenario.kind == "three_box") {
        detail::fill_three_box_results(report);
    } else if (scenario.kind == "pointer") {
        detail::fill_pointer_results(report, scenario);
    } else if (scenario.kind == "flux_scaling") {
        detail::fill_flux_scaling_results(report, scenario);
    } else {
        throw DomainError("unknown scenario kind: " + scenario.kind);
    }
    detail::apply_output_filter(report, scenario);
    validate_report(report);
    return report;
}

/// One report row per value, swept over a numeric scenario parameter.
/// Output order follows input order.
inline SweepTable sweep(const Scenario& base, const std::string& key,
                        const std::vector<std::string>& values,
                        std::optional<std::uint64_t> seed_override = std::nullopt) {
    const auto& schemas = scenario_schemas();
    auto schema_it = schemas.find(base.kind);
    if (schema_it == schemas.end()) throw DomainError("unknown scenario kind: " + base.kind);
    auto spec_it = schema_it->second.find(key);
    if (spec_it == schema_it->second.end())
        throw DomainError("unknown sweep key '" + key + "' for kind '" + base.kind + "'");
    if (spec_it->second.type == ValueType::text)
        throw DomainError("sweep key must be a numeric scenario parameter: " + key);

    SweepTable table;
    table.header = {key};
    for (const auto& raw : values) {
        ScenarioValue value;
        try {
            value = detail::parse_value(key, spec_it->second, raw, 0, 0);
        } catch (const ParseError& e) {
            throw DomainError("invalid sweep value '" + raw + "' for key '" + key + "'");
        }
        Scenario scenario = base;
        scenario.params[key] = value;
        Report report = run_scenario(scenario, seed_override);
        if (table.rows.empty()) {
            for (const auto& [name, v] : report.results) table.header.push_back(name);
        }
        std::vector<std::string> row{value.to_string()};
        std::size_t column = 1;
        for (const auto& [name, v] : report.results) {
            if (column >= table.header.size() || table.header[column] != name)
                throw InvariantBreach("sweep rows produced inconsistent result fields");
            row.push_back(v.scalar_string());
            ++column;
        }
        if (row.size() != table.header.size())
            throw InvariantBreach("sweep rows produced inconsistent result fields");
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace cfc
