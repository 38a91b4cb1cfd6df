#pragma once

#include "larn/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace larn {

/// Shortest decimal form that parses back to the same double ("nan", "inf", "-inf" otherwise).
std::string format_double(double v);

struct CsvMatrix {
    std::vector<std::string> header;
    Matrix values;
};

/// Comma separated, first line a header, every other line numeric. Errors name
/// the file and the 1-based line.
CsvMatrix read_matrix_csv(const std::filesystem::path& path);
CsvMatrix parse_matrix_csv(const std::string& text, const std::string& source = "<string>");

/// Header defaults to column indices "0", "1", ... when empty.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& M, std::vector<std::string> header = {});
std::string matrix_csv_string(const Matrix& M, std::vector<std::string> header = {});

} // namespace larn
