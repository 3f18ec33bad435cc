#pragma once

// Strict reading of JSON configuration documents: every key must be known,
// required keys must be present and numbers must lie in their ranges.
// Problems are reported as ConfigError with the dotted field path.

#include <set>
#include <string>

#include <json.hpp>

#include "errors.hpp"

namespace ccplan::io {

using Json = nlohmann::json;

/// Parses text; syntax errors name the line and column.
Json parse_json_text(const std::string& text, const std::string& source);
/// Reads and parses a file; unreadable files are config errors.
Json read_json_file(const std::string& path);

class ObjectReader
{
public:
    ObjectReader(const Json& j, std::string path);

    bool has(const std::string& key) const;
    const Json& raw(const std::string& key);
    ObjectReader object(const std::string& key);

    double number(const std::string& key);
    /// lo <= value <= hi.
    double number_in(const std::string& key, double lo, double hi);
    double positive(const std::string& key);
    double nonnegative(const std::string& key);
    long long integer(const std::string& key, long long lo, long long hi);
    std::string string(const std::string& key);
    bool boolean(const std::string& key);

    std::string field(const std::string& key) const;
    [[noreturn]] void fail(const std::string& key, const std::string& what) const;

    /// Throws on any key that was never read.
    void finish() const;

private:
    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace ccplan::io
