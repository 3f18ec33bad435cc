#include "io/json_reader.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ccplan::io {

namespace {

std::string line_col(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

Json parse_json_text(const std::string& text, const std::string& source)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(source + ":" + line_col(text, e.byte), "malformed JSON");
    }
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(path, "cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

ObjectReader::ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path))
{
    if (!j_.is_object())
        throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
}

std::string ObjectReader::field(const std::string& key) const
{
    return path_.empty() ? key : path_ + "." + key;
}

void ObjectReader::fail(const std::string& key, const std::string& what) const
{
    throw ConfigError(field(key), what);
}

bool ObjectReader::has(const std::string& key) const { return j_.contains(key); }

const Json& ObjectReader::raw(const std::string& key)
{
    const auto it = j_.find(key);
    if (it == j_.end())
        fail(key, "missing required field");
    seen_.insert(key);
    return *it;
}

ObjectReader ObjectReader::object(const std::string& key) { return {raw(key), field(key)}; }

double ObjectReader::number(const std::string& key)
{
    const Json& v = raw(key);
    if (!v.is_number())
        fail(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        fail(key, "expected a finite number");
    return d;
}

double ObjectReader::number_in(const std::string& key, double lo, double hi)
{
    const double d = number(key);
    if (d < lo || d > hi) {
        std::ostringstream ss;
        ss << "value " << d << " outside [" << lo << ", " << hi << "]";
        fail(key, ss.str());
    }
    return d;
}

double ObjectReader::positive(const std::string& key)
{
    const double d = number(key);
    if (!(d > 0.0))
        fail(key, "must be positive");
    return d;
}

double ObjectReader::nonnegative(const std::string& key)
{
    const double d = number(key);
    if (d < 0.0)
        fail(key, "must be non-negative");
    return d;
}

long long ObjectReader::integer(const std::string& key, long long lo, long long hi)
{
    const Json& v = raw(key);
    if (!v.is_number_integer())
        fail(key, "expected an integer");
    long long x = 0;
    if (v.is_number_unsigned()) {
        const auto u = v.get<unsigned long long>();
        if (u > static_cast<unsigned long long>(hi))
            fail(key, "integer out of range");
        x = static_cast<long long>(u);
    } else {
        x = v.get<long long>();
    }
    if (x < lo || x > hi)
        fail(key, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
    return x;
}

std::string ObjectReader::string(const std::string& key)
{
    const Json& v = raw(key);
    if (!v.is_string())
        fail(key, "expected a string");
    return v.get<std::string>();
}

bool ObjectReader::boolean(const std::string& key)
{
    const Json& v = raw(key);
    if (!v.is_boolean())
        fail(key, "expected true or false");
    return v.get<bool>();
}

void ObjectReader::finish() const
{
    for (auto it = j_.begin(); it != j_.end(); ++it)
        if (!seen_.count(it.key()))
            fail(it.key(), "unknown field");
}

}  // namespace ccplan::io
