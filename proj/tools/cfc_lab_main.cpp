// cfc-lab: scenario runner, parameter sweeps, and coupling-angle tuning for
// the counterfactual-computation simulation library.
//
// Exit codes: 0 success, 2 parse error, 3 domain error, 4 internal
// invariant breach. CFC_LAB_TOLERANCE overrides the default 1e-12
// comparison tolerance.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfc/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParseError = 2;
constexpr int kExitDomainError = 3;
constexpr int kExitInvariantBreach = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cfc::DomainError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_output(const std::string& out_path, const std::string& payload) {
    if (out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw cfc::DomainError("cannot open output file: " + out_path);
    out << payload;
}

std::vector<std::string> split_values(const std::string& csv) {
    std::vector<std::string> out;
    if (csv.empty()) return out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t comma = csv.find(',', pos);
        std::string item = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && item.back() == ' ') item.pop_back();
        out.push_back(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

void apply_tolerance_env() {
    const char* raw = std::getenv("CFC_LAB_TOLERANCE");
    if (!raw) return;
    char* end = nullptr;
    double tol = std::strtod(raw, &end);
    if (end == raw || *end != '\0' || !(tol > 0.0))
        throw cfc::DomainError("CFC_LAB_TOLERANCE must be a positive number, got: " +
                               std::string(raw));
    cfc::set_comparison_tolerance(tol);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"counterfactual-computation lab"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_path;
    std::string format = "json";
    std::uint64_t seed = 0;
    bool seed_given = false;

    CLI::App* run_cmd = app.add_subcommand("run", "run one scenario file and report JSON");
    run_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
    run_cmd->add_option("--seed", seed, "override the scenario seed")
        ->each([&seed_given](const std::string&) { seed_given = true; });
    run_cmd->add_option("--out", out_path, "write the report here instead of stdout");
    run_cmd->add_option("--format", format, "output format")->check(CLI::IsMember({"json"}));

    std::string sweep_key;
    std::string sweep_values;
    std::string sweep_format = "csv";
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a scenario across parameter values");
    sweep_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
    sweep_cmd->add_option("--key", sweep_key, "numeric scenario parameter to vary")->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep_cmd->add_option("--seed", seed, "override the scenario seed")
        ->each([&seed_given](const std::string&) { seed_given = true; });
    sweep_cmd->add_option("--out", out_path, "write the table here instead of stdout");
    sweep_cmd->add_option("--format", sweep_format, "output format")
        ->check(CLI::IsMember({"csv"}));

    int tune_n = 0;
    CLI::App* tune_cmd =
        app.add_subcommand("tune", "search the coupling angle for the chained protocol");
    tune_cmd->add_option("--N", tune_n, "rounds / periods per round")->required();
    tune_cmd->add_option("--out", out_path, "write the result here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParseError;
    }

    try {
        apply_tolerance_env();
        std::optional<std::uint64_t> seed_override;
        if (seed_given) seed_override = seed;

        if (run_cmd->parsed()) {
            cfc::Scenario scenario = cfc::parse_scenario(read_file(scenario_path));
            cfc::Report report = cfc::run_scenario(scenario, seed_override);
            write_output(out_path, cfc::report_to_json(report));
        } else if (sweep_cmd->parsed()) {
            cfc::Scenario scenario = cfc::parse_scenario(read_file(scenario_path));
            cfc::SweepTable table =
                cfc::sweep(scenario, sweep_key, split_values(sweep_values), seed_override);
            write_output(out_path, cfc::sweep_to_csv(table));
        } else if (tune_cmd->parsed()) {
            double alpha_star = cfc::tune_alpha(tune_n);
            cfc::JsonValue::Object result;
            result["N"] = cfc::JsonValue(static_cast<std::int64_t>(tune_n));
            result["alpha_star"] = cfc::JsonValue(alpha_star);
            write_output(out_path, cfc::to_json(cfc::JsonValue(std::move(result))));
        }
        return kExitOk;
    } catch (const cfc::ParseError& e) {
        std::cerr << scenario_path << ":" << e.what() << "\n";
        return kExitParseError;
    } catch (const cfc::InvariantBreach& e) {
        std::cerr << "internal invariant breach: " << e.what() << "\n";
        return kExitInvariantBreach;
    } catch (const cfc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomainError;
    } catch (const std::exception& e) {
        std::cerr << "internal invariant breach: " << e.what() << "\n";
        return kExitInvariantBreach;
    }
}
