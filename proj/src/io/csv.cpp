#include "io/csv.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ccplan::io {

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (v == 0.0)
        return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> header)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), width_(header.size())
{
    if (!out_)
        throw std::runtime_error("cannot write " + path);
    row_ = std::move(header);
    end_row();
}

CsvWriter& CsvWriter::add(double v)
{
    row_.push_back(format_double(v));
    return *this;
}

CsvWriter& CsvWriter::add(long long v)
{
    row_.push_back(std::to_string(v));
    return *this;
}

CsvWriter& CsvWriter::add(const std::string& v)
{
    row_.push_back(v);
    return *this;
}

void CsvWriter::end_row()
{
    if (row_.size() != width_)
        throw std::logic_error("CSV row width mismatch in " + path_);
    for (std::size_t i = 0; i < row_.size(); ++i) {
        if (i)
            out_ << ',';
        out_ << row_[i];
    }
    out_ << '\n';
    row_.clear();
}

void CsvWriter::close()
{
    out_.close();
    if (!out_)
        throw std::runtime_error("failed writing " + path_);
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
    out.close();
    if (!out)
        throw std::runtime_error("failed writing " + path);
}

}  // namespace ccplan::io
