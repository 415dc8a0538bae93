#pragma once

// Flat `key=value` configuration: one assignment per line, `#` starts a
// comment, blank lines ignored. Values are typed on parse (integer, real or
// text) and checked against a per-experiment schema on resolve.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

namespace autoliq::config {

using Value = std::variant<std::int64_t, double, std::string>;
using ConfigMap = std::map<std::string, Value, std::less<>>;

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::string key = {}, std::size_t line = 0)
        : std::runtime_error(what), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string key_;
    std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline bool valid_key(std::string_view key) {
    if (key.empty()) return false;
    for (char c : key)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
    return true;
}

}  // namespace detail

/// Integer if the whole token is an integer literal, else real if it is a
/// finite floating literal, else text.
inline Value parse_value(std::string_view text) {
    text = detail::trim(text);
    const char* b = text.data();
    const char* e = b + text.size();
    std::int64_t i{};
    if (auto [p, ec] = std::from_chars(b, e, i); ec == std::errc{} && p == e && !text.empty()) return i;
    double d{};
    if (auto [p, ec] = std::from_chars(b, e, d); ec == std::errc{} && p == e && !text.empty() &&
                                                 std::isfinite(d))
        return d;
    return std::string(text);
}

/// Splits `key=value`; throws ConfigError on malformed input.
inline std::pair<std::string, Value> parse_assignment(std::string_view text, std::size_t line = 0) {
    const auto eq = text.find('=');
    const std::string where = line ? " on line " + std::to_string(line) : std::string();
    if (eq == std::string_view::npos)
        throw ConfigError("malformed entry" + where + ": expected key=value", {}, line);
    const auto key = detail::trim(text.substr(0, eq));
    const auto value = detail::trim(text.substr(eq + 1));
    if (!detail::valid_key(key)) throw ConfigError("malformed key" + where, std::string(key), line);
    if (value.empty()) throw ConfigError("empty value for '" + std::string(key) + "'" + where, std::string(key), line);
    return {std::string(key), parse_value(value)};
}

inline ConfigMap parse_config(std::string_view text) {
    ConfigMap out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto [key, value] = parse_assignment(line, line_no);
        if (out.contains(key))
            throw ConfigError("duplicate key '" + key + "' on line " + std::to_string(line_no), key, line_no);
        out.emplace(std::move(key), std::move(value));
    }
    return out;
}

inline std::string to_text(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&v)) {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, *d, std::chars_format::general, 17);
        return std::string(buf, res.ptr);
    }
    return std::get<std::string>(v);
}

// -- schema -------------------------------------------------------------------

enum class Kind { Integer, Real, Text, RealList };

struct KeySpec {
    std::string name;
    Kind kind;
    std::string default_value;  ///< parsed like a file value
    std::string domain;         ///< human-readable expected domain
    std::function<bool(const Value&)> accepts = nullptr;
};

/// Resolved, type-checked settings for one experiment.
class Settings {
public:
    double real(std::string_view key) const {
        const Value& v = at(key);
        if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
        return std::get<double>(v);
    }
    std::int64_t integer(std::string_view key) const { return std::get<std::int64_t>(at(key)); }
    const std::string& text(std::string_view key) const { return std::get<std::string>(at(key)); }
    std::vector<double> reals(std::string_view key) const;

    const ConfigMap& values() const noexcept { return values_; }

private:
    friend Settings resolve(const std::vector<KeySpec>&, const ConfigMap&, const ConfigMap&);
    const Value& at(std::string_view key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("unknown setting '" + std::string(key) + "'", std::string(key));
        return it->second;
    }
    ConfigMap values_;
};

inline std::vector<double> parse_real_list(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return {static_cast<double>(*i)};
    if (const auto* d = std::get_if<double>(&v)) return {*d};
    std::vector<double> out;
    std::string_view s = std::get<std::string>(v);
    while (true) {
        const auto comma = s.find(',');
        const auto item = parse_value(s.substr(0, comma));
        if (const auto* i = std::get_if<std::int64_t>(&item)) out.push_back(static_cast<double>(*i));
        else if (const auto* d = std::get_if<double>(&item)) out.push_back(*d);
        else throw ConfigError("not a number list: '" + std::get<std::string>(v) + "'");
        if (comma == std::string_view::npos) break;
        s = s.substr(comma + 1);
    }
    return out;
}

inline std::vector<double> Settings::reals(std::string_view key) const { return parse_real_list(at(key)); }

namespace detail {

inline bool kind_matches(Kind kind, const Value& v) {
    switch (kind) {
        case Kind::Integer: return std::holds_alternative<std::int64_t>(v);
        case Kind::Real: return !std::holds_alternative<std::string>(v);
        case Kind::Text: return true;
        case Kind::RealList:
            try {
                parse_real_list(v);
                return true;
            } catch (const ConfigError&) {
                return false;
            }
    }
    return false;
}

inline const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Integer: return "integer";
        case Kind::Real: return "real";
        case Kind::Text: return "text";
        case Kind::RealList: return "comma-separated reals";
    }
    return "?";
}

}  // namespace detail

/// Defaults, then file values, then overrides. Unknown keys, type
/// mismatches and out-of-domain values raise ConfigError naming the key.
inline Settings resolve(const std::vector<KeySpec>& schema, const ConfigMap& file_values,
                        const ConfigMap& overrides) {
    Settings s;
    for (const auto& spec : schema) s.values_[spec.name] = parse_value(spec.default_value);

    auto apply = [&](const ConfigMap& layer) {
        for (const auto& [key, value] : layer) {
            auto it = std::find_if(schema.begin(), schema.end(), [&](const KeySpec& k) { return k.name == key; });
            if (it == schema.end()) throw ConfigError("unknown key '" + key + "'", key);
            s.values_[key] = value;
        }
    };
    apply(file_values);
    apply(overrides);

    for (const auto& spec : schema) {
        Value& v = s.values_[spec.name];
        if (!detail::kind_matches(spec.kind, v))
            throw ConfigError("key '" + spec.name + "': expected " + detail::kind_name(spec.kind) + ", got '" +
                                  to_text(v) + "'",
                              spec.name);
        if (spec.kind == Kind::Real)
            if (const auto* i = std::get_if<std::int64_t>(&v)) v = static_cast<double>(*i);
        if (spec.kind == Kind::Text) v = to_text(v);
        if (spec.accepts && !spec.accepts(v))
            throw ConfigError("key '" + spec.name + "': value " + to_text(v) + " outside domain " + spec.domain,
                              spec.name);
    }
    return s;
}

}  // namespace autoliq::config
