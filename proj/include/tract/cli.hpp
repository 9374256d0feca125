#pragma once

// Command-line front end: JSON config ingestion, subcommand dispatch and
// report emission. tools/tract.cpp is a thin wrapper around run().

#include "tract/classifier.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tract::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;       // validation failure or failed check
inline constexpr int kConfigError = 2;  // unusable config or arguments

struct OutputSpec {
    std::string format = "json";  // json | csv
    std::optional<std::string> path;
};

struct RunConfig {
    EigenModel model;
    Criterion criterion = Criterion::Abs;
    Limits limits;
    OutputSpec output;
    std::string analysis;  // subcommand parameters as compact JSON ("{}" when absent)
};

// Parses a config document. Unknown keys anywhere are rejected; errors name
// the source, and the line and column for syntax errors.
Result<RunConfig> parse_config(const std::string& text, const std::string& source = "config");

// args excludes the program name. Emits to `out` unless an output path is
// configured; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& data);

}  // namespace tract::cli
