#pragma once

// Instance JSON format (the file format the CLI consumes):
//
//   {"n": 4,
//    "vars": ["a","b","c","d"],                       // optional
//    "constraints": [
//      {"X": [], "Y": ["a","b"], "c": 1},
//      {"X": ["a"], "Y": ["a","d"], "c": "1/2"}]}
//
// Variables are referenced by name (when "vars" is present) or by 1-based
// index. `c` is a JSON integer or a string holding an integer, "p/q", or a
// finite decimal; unquoted JSON floats are rejected so values stay exact.

#include "polybound/errors.hpp"
#include "polybound/instance.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace polybound {

namespace detail {

inline int resolve_var(const nlohmann::json& ref, const Instance& partial,
                       const std::string& where) {
    if (ref.is_number_integer()) {
        long v = ref.get<long>();
        if (v < 1 || v > partial.n)
            throw ParseError(where + ": variable index " + std::to_string(v) + " out of range");
        return int(v);
    }
    if (ref.is_string()) {
        const std::string name = ref.get<std::string>();
        for (int v = 1; v <= partial.n; ++v)
            if (!partial.names.empty() && partial.names[v - 1] == name)
                return v;
        throw ParseError(where + ": unknown variable name \"" + name + "\"");
    }
    throw ParseError(where + ": variable references must be names or 1-based indices");
}

inline VarSet resolve_varset(const nlohmann::json& arr, const Instance& partial,
                             const std::string& where) {
    if (!arr.is_array())
        throw ParseError(where + ": expected an array of variables");
    VarSet s;
    for (const auto& ref : arr)
        s = s.with(resolve_var(ref, partial, where));
    return s;
}

inline Rational resolve_rational(const nlohmann::json& v, const std::string& where) {
    if (v.is_number_integer()) {
        long x = v.get<long>();
        return Rational(x);
    }
    if (v.is_number_float())
        throw ParseError(where + ": floating-point literals are inexact; quote the value "
                                 "as a string (\"p/q\", integer, or finite decimal)");
    if (v.is_string()) {
        auto r = parse_rational(v.get<std::string>());
        if (!r)
            throw ParseError(where + ": cannot parse \"" + v.get<std::string>() +
                             "\" as a rational");
        return *r;
    }
    throw ParseError(where + ": expected an integer or a rational string");
}

}  // namespace detail

inline Instance parse_instance_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("instance: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("constraints"))
        throw ParseError("instance: expected {\"n\": ..., \"constraints\": [...]}");
    if (!doc["n"].is_number_integer())
        throw ParseError("instance: n must be an integer");

    Instance partial;
    partial.n = doc["n"].get<int>();
    if (partial.n < 1 || partial.n > kMaxVariables)
        throw ParseError("instance: n must be between 1 and " + std::to_string(kMaxVariables));
    if (doc.contains("vars")) {
        if (!doc["vars"].is_array())
            throw ParseError("instance: vars must be an array of names");
        for (const auto& name : doc["vars"]) {
            if (!name.is_string())
                throw ParseError("instance: vars entries must be strings");
            partial.names.push_back(name.get<std::string>());
        }
        if (int(partial.names.size()) != partial.n)
            throw ParseError("instance: vars list must have exactly n entries");
    }

    if (!doc["constraints"].is_array())
        throw ParseError("instance: constraints must be an array");
    std::vector<DegreeConstraint> dcs;
    int index = 1;
    for (const auto& entry : doc["constraints"]) {
        std::string where = "constraint " + std::to_string(index++);
        if (!entry.is_object() || !entry.contains("X") || !entry.contains("Y") ||
            !entry.contains("c"))
            throw ParseError(where + ": expected {\"X\": [...], \"Y\": [...], \"c\": ...}");
        DegreeConstraint dc;
        dc.X = detail::resolve_varset(entry["X"], partial, where + ".X");
        dc.Y = detail::resolve_varset(entry["Y"], partial, where + ".Y");
        dc.c = detail::resolve_rational(entry["c"], where + ".c");
        dcs.push_back(dc);
    }
    return make_instance(partial.n, std::move(dcs), std::move(partial.names));
}

inline nlohmann::json varset_to_json(const Instance& inst, VarSet s) {
    nlohmann::json arr = nlohmann::json::array();
    for (int v : s.members()) {
        if (!inst.names.empty())
            arr.push_back(inst.names[v - 1]);
        else
            arr.push_back(v);
    }
    return arr;
}

inline nlohmann::json instance_to_json(const Instance& inst) {
    nlohmann::json doc;
    doc["n"] = inst.n;
    if (!inst.names.empty())
        doc["vars"] = inst.names;
    doc["constraints"] = nlohmann::json::array();
    for (const auto& dc : inst.constraints) {
        nlohmann::json entry;
        entry["X"] = varset_to_json(inst, dc.X);
        entry["Y"] = varset_to_json(inst, dc.Y);
        entry["c"] = to_string(dc.c);
        doc["constraints"].push_back(entry);
    }
    return doc;
}

}  // namespace polybound
