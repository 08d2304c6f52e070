#include "varidual/toml_lite.hpp"

#include <cctype>
#include <sstream>

namespace varidual {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Strips a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

struct Parser {
    TomlDoc* doc;
    int line_no = 0;

    void error(const std::string& msg) {
        std::ostringstream os;
        os << "line " << line_no << ": " << msg;
        doc->errors.push_back(os.str());
    }

    bool parse_scalar(const std::string& text, TomlValue* out) {
        std::string t = trim(text);
        if (t.empty()) {
            error("empty value");
            return false;
        }
        if (t.front() == '"') {
            if (t.size() < 2 || t.back() != '"') {
                error("unterminated string");
                return false;
            }
            out->type = TomlValue::Type::string;
            out->s = t.substr(1, t.size() - 2);
            return true;
        }
        if (t == "true" || t == "false") {
            out->type = TomlValue::Type::boolean;
            out->b = t == "true";
            return true;
        }
        // integer or float
        bool looks_float = t.find_first_of(".eE") != std::string::npos || t == "inf" || t == "-inf";
        try {
            std::size_t pos = 0;
            if (!looks_float) {
                long long v = std::stoll(t, &pos);
                if (pos == t.size()) {
                    out->type = TomlValue::Type::integer;
                    out->i = v;
                    return true;
                }
            }
            pos = 0;
            double v = std::stod(t, &pos);
            if (pos != t.size()) {
                error("cannot parse value '" + t + "'");
                return false;
            }
            out->type = TomlValue::Type::floating;
            out->d = v;
            return true;
        } catch (const std::exception&) {
            error("cannot parse value '" + t + "'");
            return false;
        }
    }

    // Splits a bracketed array body on top-level commas.
    bool parse_array(const std::string& body, TomlValue* out) {
        out->type = TomlValue::Type::array;
        int depth = 0;
        std::string cur;
        std::vector<std::string> parts;
        bool in_str = false;
        for (char ch : body) {
            if (ch == '"') in_str = !in_str;
            if (!in_str) {
                if (ch == '[') {
                    ++depth;
                    if (depth == 1) continue;
                }
                if (ch == ']') {
                    --depth;
                    if (depth == 0) continue;
                }
                if (ch == ',' && depth == 1) {
                    parts.push_back(cur);
                    cur.clear();
                    continue;
                }
            }
            if (depth >= 1) cur += ch;
        }
        if (depth != 0) {
            error("unbalanced brackets");
            return false;
        }
        if (!trim(cur).empty()) parts.push_back(cur);
        for (const std::string& p : parts) {
            TomlValue v;
            std::string t = trim(p);
            if (!t.empty() && t.front() == '[') {
                if (!parse_array(t, &v)) return false;
            } else {
                if (!parse_scalar(t, &v)) return false;
            }
            out->arr.push_back(std::move(v));
        }
        return true;
    }
};

}  // namespace

TomlDoc parse_toml(const std::string& text) {
    TomlDoc doc;
    Parser p;
    p.doc = &doc;

    std::istringstream is(text);
    std::string raw;
    std::string section;
    while (std::getline(is, raw)) {
        ++p.line_no;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                p.error("malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) p.error("empty section name");
            continue;
        }

        std::size_t eq = std::string::npos;
        bool in_str = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_str = !in_str;
            if (line[i] == '=' && !in_str) {
                eq = i;
                break;
            }
        }
        if (eq == std::string::npos) {
            p.error("expected key = value");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) {
            p.error("empty key");
            continue;
        }
        TomlValue v;
        bool ok = !val.empty() && val.front() == '[' ? p.parse_array(val, &v) : p.parse_scalar(val, &v);
        if (!ok) continue;
        std::string path = section.empty() ? key : section + "." + key;
        if (doc.entries.count(path)) {
            p.error("duplicate key '" + path + "'");
            continue;
        }
        doc.entries.emplace(std::move(path), std::move(v));
    }
    return doc;
}

}  // namespace varidual
