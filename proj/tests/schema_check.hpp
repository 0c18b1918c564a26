#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

// Minimal JSON Schema checker covering the keywords used by the envelope
// schema: type, enum, required, properties, additionalProperties, items.
namespace schema_check {

using nlohmann::json;

inline bool has_type(const json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    return false;
}

inline void validate(const json& schema, const json& v, const std::string& path, std::vector<std::string>& errors) {
    if (schema.contains("type")) {
        const json& t = schema["type"];
        bool ok = false;
        if (t.is_string()) ok = has_type(v, t.get<std::string>());
        else
            for (const auto& s : t) ok = ok || has_type(v, s.get<std::string>());
        if (!ok) {
            errors.push_back(path + ": wrong type");
            return;
        }
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& e : schema["enum"]) found = found || e == v;
        if (!found) errors.push_back(path + ": value not in enum");
    }
    if (v.is_object()) {
        if (schema.contains("required"))
            for (const auto& k : schema["required"])
                if (!v.contains(k.get<std::string>())) errors.push_back(path + ": missing " + k.get<std::string>());
        const json props = schema.value("properties", json::object());
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (props.contains(it.key())) validate(props[it.key()], it.value(), path + "/" + it.key(), errors);
            else if (schema.contains("additionalProperties") && schema["additionalProperties"] == false)
                errors.push_back(path + ": unexpected key " + it.key());
        }
    }
    if (v.is_array() && schema.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i) validate(schema["items"], v[i], path + "/" + std::to_string(i), errors);
}

inline std::vector<std::string> validate(const json& schema, const json& v) {
    std::vector<std::string> errors;
    validate(schema, v, "", errors);
    return errors;
}

inline json load(const std::string& path) {
    std::ifstream in(path);
    return json::parse(in);
}

}  // namespace schema_check
