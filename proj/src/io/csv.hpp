#pragma once

// Headered CSV with a fixed column count; doubles use 17 significant digits.

#include <fstream>
#include <string>
#include <vector>

namespace ccplan::io {

std::string format_double(double v);

class CsvWriter
{
public:
    CsvWriter(const std::string& path, std::vector<std::string> header);

    CsvWriter& add(double v);
    CsvWriter& add(long long v);
    CsvWriter& add(int v) { return add(static_cast<long long>(v)); }
    CsvWriter& add(std::size_t v) { return add(static_cast<long long>(v)); }
    CsvWriter& add(const std::string& v);
    /// Writes the pending row; throws if its width differs from the header.
    void end_row();
    void close();

private:
    std::ofstream out_;
    std::string path_;
    std::size_t width_;
    std::vector<std::string> row_;
};

/// Writes text to a file in binary mode, replacing it.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ccplan::io
