#pragma once

// Minimal TOML reader covering the subset used by experiment configs:
// comments, [table] and [[array-of-tables]] headers (dotted paths), bare and
// quoted keys, strings, integers, floats, booleans, arrays (multi-line), and
// inline tables. Parses into nlohmann::json so the config layer has a single
// in-memory representation for both TOML and JSON inputs.

#include <string>

#include <nlohmann/json.hpp>

namespace mixest::toml {

// Parses TOML text. Throws ConfigError with a line number on malformed input.
nlohmann::json parse(const std::string& text);

// Reads and parses a file. Throws ConfigError if unreadable.
nlohmann::json parse_file(const std::string& path);

}  // namespace mixest::toml
