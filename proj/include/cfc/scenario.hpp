#pragma once

// Line-oriented "key = value" scenario files with "#" comments. The format
// is deliberately trivial so any implementation parses it identically;
// parse(print(s)) == s for every valid scenario.

#include <charconv>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfc/errors.hpp"

namespace cfc {

enum class ValueType { integer, real, text };

struct ScenarioValue {
    ValueType type = ValueType::integer;
    std::int64_t i = 0;
    double d = 0.0;
    std::string s;

    static ScenarioValue of_int(std::int64_t v) {
        ScenarioValue out;
        out.type = ValueType::integer;
        out.i = v;
        return out;
    }
    static ScenarioValue of_real(double v) {
        ScenarioValue out;
        out.type = ValueType::real;
        out.d = v;
        return out;
    }
    static ScenarioValue of_text(std::string v) {
        ScenarioValue out;
        out.type = ValueType::text;
        out.s = std::move(v);
        return out;
    }

    std::string to_string() const {
        switch (type) {
            case ValueType::integer:
                return std::to_string(i);
            case ValueType::real: {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.17g", d);
                return buf;
            }
            case ValueType::text:
                return s;
        }
        return {};
    }

    bool operator==(const ScenarioValue&) const = default;
};

struct Scenario {
    std::string kind;
    std::map<std::string, ScenarioValue> params;

    bool operator==(const Scenario&) const = default;
};

/// Per-key schema entry: expected type, range, and whether "auto" is legal.
struct KeySpec {
    ValueType type = ValueType::integer;
    bool required = false;
    bool allow_auto = false;
    std::int64_t min_i = 0, max_i = 0;
    double min_d = 0.0, max_d = 0.0;
    bool strict_bounds = false;              // exclusive real bounds
    std::vector<std::string> allowed_text;   // empty means free text
};

using KindSchema = std::map<std::string, KeySpec>;

inline const std::map<std::string, KindSchema>& scenario_schemas() {
    static const double half_pi = std::numbers::pi / 2.0;
    static const std::map<std::string, KindSchema> schemas = {
        {"jozsa",
         {{"N", {.type = ValueType::integer, .required = true, .min_i = 1, .max_i = 1000000}},
          {"alpha",
           {.type = ValueType::real, .min_d = 0.0, .max_d = half_pi, .strict_bounds = true}},
          {"outcome", {.type = ValueType::integer, .min_i = 0, .max_i = 1}},
          {"trials", {.type = ValueType::integer, .min_i = 0, .max_i = 100000000}},
          {"seed", {.type = ValueType::integer, .min_i = 0, .max_i = INT64_MAX}},
          {"outputs", {.type = ValueType::text}}}},
        {"hosten",
         {{"N", {.type = ValueType::integer, .required = true, .min_i = 1, .max_i = 100000}},
          {"alpha",
           {.type = ValueType::real,
            .allow_auto = true,
            .min_d = 0.0,
            .max_d = half_pi,
            .strict_bounds = true}},
          {"outcome", {.type = ValueType::integer, .min_i = 0, .max_i = 1}},
          {"trials", {.type = ValueType::integer, .min_i = 0, .max_i = 100000000}},
          {"seed", {.type = ValueType::integer, .min_i = 0, .max_i = INT64_MAX}},
          {"outputs", {.type = ValueType::text}}}},
        {"nested_mzi",
         {{"outcome", {.type = ValueType::integer, .min_i = 0, .max_i = 1}},
          {"detector", {.type = ValueType::text, .allowed_text = {"D1", "D2"}}},
          {"outputs", {.type = ValueType::text}}}},
        {"three_box", {{"outputs", {.type = ValueType::text}}}},
        {"pointer",
         {{"g", {.type = ValueType::real, .required = true, .min_d = 0.0, .max_d = 2.0}},
          {"probe", {.type = ValueType::text, .allowed_text = {"A", "B", "C", "E", "F"}}},
          {"detector", {.type = ValueType::text, .allowed_text = {"D1", "D2"}}},
          {"outcome", {.type = ValueType::integer, .min_i = 0, .max_i = 1}},
          {"outputs", {.type = ValueType::text}}}},
        {"flux_scaling",
         {{"N_photons",
           {.type = ValueType::integer, .required = true, .min_i = 1, .max_i = 1000000000}},
          {"regime",
           {.type = ValueType::text,
            .required = true,
            .allowed_text = {"per_photon", "collective"}}},
          {"outputs", {.type = ValueType::text}}}},
    };
    return schemas;
}

namespace detail {

inline bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto head = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
    if (!head(s[0])) return false;
    for (char c : s.substr(1))
        if (!tail(c)) return false;
    return true;
}

inline std::string_view trim(std::string_view s, std::size_t& lead) {
    lead = 0;
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
        ++lead;
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

/// Validates and converts one raw token against a key spec.
inline ScenarioValue parse_value(const std::string& key, const KeySpec& spec,
                                 std::string_view token, int line, int column) {
    if (spec.allow_auto && token == "auto") return ScenarioValue::of_text("auto");
    switch (spec.type) {
        case ValueType::integer: {
            std::int64_t v = 0;
            auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
            if (ec != std::errc() || end != token.data() + token.size())
                throw ParseError(line, column, "expected an integer for key '" + key + "'");
            if (v < spec.min_i || v > spec.max_i)
                throw ParseError(line, column,
                                 "value out of range for key '" + key + "' [" +
                                     std::to_string(spec.min_i) + ", " +
                                     std::to_string(spec.max_i) + "]");
            return ScenarioValue::of_int(v);
        }
        case ValueType::real: {
            double v = 0.0;
            auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
            if (ec != std::errc() || end != token.data() + token.size())
                throw ParseError(line, column, "expected a number for key '" + key + "'");
            bool below = spec.strict_bounds ? !(v > spec.min_d) : v < spec.min_d;
            bool above = spec.strict_bounds ? !(v < spec.max_d) : v > spec.max_d;
            if (below || above)
                throw ParseError(line, column, "value out of range for key '" + key + "'");
            return ScenarioValue::of_real(v);
        }
        case ValueType::text: {
            if (!spec.allowed_text.empty()) {
                for (const auto& allowed : spec.allowed_text)
                    if (token == allowed) return ScenarioValue::of_text(std::string(token));
                std::string expect;
                for (const auto& allowed : spec.allowed_text)
                    expect += (expect.empty() ? "" : "|") + allowed;
                throw ParseError(line, column,
                                 "invalid value for key '" + key + "', expected " + expect);
            }
            for (char c : token)
                if (static_cast<unsigned char>(c) < 0x20 || c == '#')
                    throw ParseError(line, column, "invalid character in value for key '" + key + "'");
            return ScenarioValue::of_text(std::string(token));
        }
    }
    throw ParseError(line, column, "unsupported value type");
}

}  // namespace detail

/// Parses a scenario file; throws ParseError with a 1-based line and column
/// on the first offending input.
inline Scenario parse_scenario(std::string_view text) {
    struct RawEntry {
        std::string value;
        int line;
        int value_column;
        int key_column;
    };
    std::map<std::string, RawEntry> raw;
    std::vector<std::string> order;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        std::size_t lead = 0;
        std::string_view body = detail::trim(line, lead);
        if (body.empty()) continue;

        std::size_t eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(line_no, static_cast<int>(lead) + 1, "expected 'key = value'");
        std::size_t key_lead = 0;
        std::string_view key = detail::trim(body.substr(0, eq), key_lead);
        const int key_col = static_cast<int>(lead + key_lead) + 1;
        if (key.empty()) throw ParseError(line_no, key_col, "missing key before '='");
        if (!detail::is_identifier(key))
            throw ParseError(line_no, key_col, "invalid key '" + std::string(key) + "'");
        std::size_t val_lead = 0;
        std::string_view value = detail::trim(body.substr(eq + 1), val_lead);
        const int val_col = static_cast<int>(lead + eq + 1 + val_lead) + 1;
        if (value.empty()) throw ParseError(line_no, val_col, "missing value for key '" + std::string(key) + "'");
        auto [it, inserted] = raw.emplace(
            std::string(key), RawEntry{std::string(value), line_no, val_col, key_col});
        if (!inserted) throw ParseError(line_no, key_col, "duplicate key '" + std::string(key) + "'");
        order.push_back(std::string(key));
    }

    auto kind_it = raw.find("kind");
    if (kind_it == raw.end()) throw ParseError(1, 1, "missing required key 'kind'");
    const auto& schemas = scenario_schemas();
    auto schema_it = schemas.find(kind_it->second.value);
    if (schema_it == schemas.end())
        throw ParseError(kind_it->second.line, kind_it->second.value_column,
                         "unknown kind '" + kind_it->second.value + "'");
    const KindSchema& schema = schema_it->second;

    Scenario scenario;
    scenario.kind = kind_it->second.value;
    for (const auto& [key, entry] : raw) {
        if (key == "kind") continue;
        auto spec_it = schema.find(key);
        if (spec_it == schema.end())
            throw ParseError(entry.line, entry.key_column,
                             "unknown key '" + key + "' for kind '" + scenario.kind + "'");
        scenario.params[key] =
            detail::parse_value(key, spec_it->second, entry.value, entry.line, entry.value_column);
    }
    for (const auto& [key, spec] : schema) {
        if (spec.required && !scenario.params.count(key))
            throw ParseError(1, 1, "missing required key '" + key + "' for kind '" + scenario.kind + "'");
    }
    return scenario;
}

/// Canonical text form: the kind line first, then parameters sorted by key.
inline std::string print_scenario(const Scenario& scenario) {
    std::string out = "kind = " + scenario.kind + "\n";
    for (const auto& [key, value] : scenario.params)
        out += key + " = " + value.to_string() + "\n";
    return out;
}

inline std::int64_t get_int(const Scenario& s, const std::string& key, std::int64_t fallback) {
    auto it = s.params.find(key);
    return it == s.params.end() ? fallback : it->second.i;
}

inline std::optional<double> get_real(const Scenario& s, const std::string& key) {
    auto it = s.params.find(key);
    if (it == s.params.end() || it->second.type != ValueType::real) return std::nullopt;
    return it->second.d;
}

inline std::string get_text(const Scenario& s, const std::string& key, const std::string& fallback) {
    auto it = s.params.find(key);
    return it == s.params.end() ? fallback : it->second.s;
}

}  // namespace cfc
