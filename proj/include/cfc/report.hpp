#pragma once

// Machine-readable reporting. JSON objects carry lexicographically sorted
// keys and floats printed with 17 significant digits, so a report is
// byte-reproducible for a fixed scenario and seed and diffs cleanly.
// Sweep tables are CSV with RFC-4180 quoting.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "cfc/errors.hpp"
#include "cfc/scenario.hpp"

namespace cfc {

class JsonValue {
  public:
    using Array = std::vector<JsonValue>;
    using Object = std::map<std::string, JsonValue>;

    JsonValue() : value_(nullptr) {}
    JsonValue(bool v) : value_(v) {}
    JsonValue(std::int64_t v) : value_(v) {}
    JsonValue(std::uint64_t v) : value_(v) {}
    JsonValue(int v) : value_(static_cast<std::int64_t>(v)) {}
    JsonValue(double v) : value_(v) {}
    JsonValue(const char* v) : value_(std::string(v)) {}
    JsonValue(std::string v) : value_(std::move(v)) {}
    JsonValue(Array v) : value_(std::move(v)) {}
    JsonValue(Object v) : value_(std::move(v)) {}

    bool is_double() const { return std::holds_alternative<double>(value_); }
    bool is_string() const { return std::holds_alternative<std::string>(value_); }

    double as_double() const {
        if (auto* d = std::get_if<double>(&value_)) return *d;
        if (auto* i = std::get_if<std::int64_t>(&value_)) return static_cast<double>(*i);
        if (auto* u = std::get_if<std::uint64_t>(&value_)) return static_cast<double>(*u);
        throw InvariantBreach("json value is not numeric");
    }

    /// Plain scalar rendering (no quoting) for CSV cells.
    std::string scalar_string() const;

    void serialize(std::string& out) const;

  private:
    std::variant<std::nullptr_t, bool, std::int64_t, std::uint64_t, double, std::string, Array,
                 Object>
        value_;
};

namespace detail {

inline std::string format_double(double v) {
    if (!std::isfinite(v)) throw InvariantBreach("attempted to serialize a non-finite number");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void json_escape(const std::string& s, std::string& out) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
}

}  // namespace detail

inline std::string JsonValue::scalar_string() const {
    if (auto* d = std::get_if<double>(&value_)) return detail::format_double(*d);
    if (auto* i = std::get_if<std::int64_t>(&value_)) return std::to_string(*i);
    if (auto* u = std::get_if<std::uint64_t>(&value_)) return std::to_string(*u);
    if (auto* s = std::get_if<std::string>(&value_)) return *s;
    if (auto* b = std::get_if<bool>(&value_)) return *b ? "true" : "false";
    throw InvariantBreach("json value is not a scalar");
}

inline void JsonValue::serialize(std::string& out) const {
    if (std::holds_alternative<std::nullptr_t>(value_)) {
        out += "null";
    } else if (auto* b = std::get_if<bool>(&value_)) {
        out += *b ? "true" : "false";
    } else if (auto* i = std::get_if<std::int64_t>(&value_)) {
        out += std::to_string(*i);
    } else if (auto* u = std::get_if<std::uint64_t>(&value_)) {
        out += std::to_string(*u);
    } else if (auto* d = std::get_if<double>(&value_)) {
        out += detail::format_double(*d);
    } else if (auto* s = std::get_if<std::string>(&value_)) {
        detail::json_escape(*s, out);
    } else if (auto* a = std::get_if<Array>(&value_)) {
        out += '[';
        bool first = true;
        for (const auto& v : *a) {
            if (!first) out += ',';
            first = false;
            v.serialize(out);
        }
        out += ']';
    } else if (auto* o = std::get_if<Object>(&value_)) {
        out += '{';
        bool first = true;
        for (const auto& [k, v] : *o) {  // std::map keeps keys sorted
            if (!first) out += ',';
            first = false;
            detail::json_escape(k, out);
            out += ':';
            v.serialize(out);
        }
        out += '}';
    }
}

inline std::string to_json(const JsonValue& v) {
    std::string out;
    v.serialize(out);
    out += '\n';
    return out;
}

struct Report {
    Scenario scenario;
    std::map<std::string, JsonValue> results;
    std::map<std::string, JsonValue> tables;
    std::uint64_t seed = 1;
    double tolerance = 1e-12;
    std::string version;
};

/// Every probability-valued result must land in [0, 1].
inline void validate_report(const Report& report) {
    auto is_probability_key = [](const std::string& k) {
        return k.rfind("p_", 0) == 0 || k.rfind("abl_", 0) == 0 || k.rfind("fidelity_", 0) == 0 ||
               k == "leaked_flux" || k == "per_photon_flux";
    };
    for (const auto& [key, value] : report.results) {
        if (!is_probability_key(key)) continue;
        double p = value.as_double();
        if (!(p >= -1e-12 && p <= 1.0 + 1e-12))
            throw InvariantBreach("probability field out of range: " + key + " = " +
                                  detail::format_double(p));
    }
}

inline std::string report_to_json(const Report& report) {
    validate_report(report);
    JsonValue::Object scenario_obj;
    scenario_obj["kind"] = JsonValue(report.scenario.kind);
    for (const auto& [key, value] : report.scenario.params) {
        switch (value.type) {
            case ValueType::integer: scenario_obj[key] = JsonValue(value.i); break;
            case ValueType::real: scenario_obj[key] = JsonValue(value.d); break;
            case ValueType::text: scenario_obj[key] = JsonValue(value.s); break;
        }
    }
    JsonValue::Object provenance;
    provenance["seed"] = JsonValue(report.seed);
    provenance["tolerance"] = JsonValue(report.tolerance);
    provenance["version"] = JsonValue(report.version);

    JsonValue::Object root;
    root["provenance"] = JsonValue(std::move(provenance));
    root["results"] = JsonValue(JsonValue::Object(report.results.begin(), report.results.end()));
    root["scenario"] = JsonValue(std::move(scenario_obj));
    root["tables"] = JsonValue(JsonValue::Object(report.tables.begin(), report.tables.end()));
    return to_json(JsonValue(std::move(root)));
}

struct SweepTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::string csv_escape(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string sweep_to_csv(const SweepTable& table) {
    std::string out;
    auto emit_row = [&out](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_escape(row[i]);
        }
        out += '\n';
    };
    emit_row(table.header);
    for (const auto& row : table.rows) emit_row(row);
    return out;
}

}  // namespace cfc
