#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace varidual {

// Minimal TOML subset: [dotted.sections], key = value with strings,
// booleans, integers, floats and flat arrays (optionally nested one level
// for arrays of arrays). Comments with '#'. Enough for experiment configs;
// parse errors are collected, not thrown.
struct TomlValue {
    enum class Type { boolean, integer, floating, string, array };
    Type type = Type::integer;
    bool b = false;
    std::int64_t i = 0;
    double d = 0.0;
    std::string s;
    std::vector<TomlValue> arr;

    bool is_number() const { return type == Type::integer || type == Type::floating; }
    double as_double() const { return type == Type::integer ? static_cast<double>(i) : d; }
};

struct TomlDoc {
    std::map<std::string, TomlValue> entries;  // "section.key" -> value
    std::vector<std::string> errors;           // with line numbers
};

TomlDoc parse_toml(const std::string& text);

}  // namespace varidual
