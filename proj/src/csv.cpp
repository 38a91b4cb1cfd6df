#include "larn/csv.hpp"

#include "larn/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace larn {

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& raw, const std::string& source, std::size_t line)
{
    const std::string s = trim(raw);
    double v = 0.0;
    const char* begin = s.data();
    if (!s.empty() && *begin == '+') ++begin;
    const auto res = std::from_chars(begin, s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw IoError(source + ":" + std::to_string(line) + ": non-numeric cell '" + s + "'");
    }
    return v;
}

} // namespace

CsvMatrix parse_matrix_csv(const std::string& text, const std::string& source)
{
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    CsvMatrix out;
    bool have_header = false;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split(trim(line));
        if (!have_header) {
            for (auto& c : cells) out.header.push_back(trim(c));
            have_header = true;
            continue;
        }
        if (cells.size() != out.header.size()) {
            throw IoError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(out.header.size())
                          + " cells, found " + std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_cell(c, source, line_no));
        rows.push_back(std::move(row));
    }
    if (!have_header) throw IoError(source + ": empty file");
    out.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(out.header.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            out.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return out;
}

CsvMatrix read_matrix_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_matrix_csv(buf.str(), path.string());
}

std::string matrix_csv_string(const Matrix& M, std::vector<std::string> header)
{
    if (header.empty()) {
        for (Index j = 0; j < M.cols(); ++j) header.push_back(std::to_string(j));
    }
    if (static_cast<Index>(header.size()) != M.cols()) throw ConfigError("csv header length differs from column count");
    std::string out;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) out += ',';
        out += header[j];
    }
    out += '\n';
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) {
            if (j) out += ',';
            out += format_double(M(i, j));
        }
        out += '\n';
    }
    return out;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& M, std::vector<std::string> header)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << matrix_csv_string(M, std::move(header));
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace larn
