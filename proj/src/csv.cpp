#include "freqdyn/csv.hpp"

#include <charconv>
#include <fstream>

namespace freqdyn::csv {

RowError::RowError(const std::filesystem::path& file, std::size_t line, const std::string& what)
    : std::runtime_error(file.string() + ": row " + std::to_string(line) + ": " + what), line_(line) {}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

void for_each_row(const std::filesystem::path& file, std::string_view expected_header,
                  const std::function<void(std::size_t, const std::vector<std::string_view>&)>& row_fn) {
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot open " + file.string());
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line))
        throw RowError(file, 1, "missing header");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_header)
        throw RowError(file, 1, "bad header '" + line + "', expected '" + std::string(expected_header) + "'");
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        row_fn(lineno, split_fields(line));
    }
}

double parse_double(std::string_view field, const std::filesystem::path& file, std::size_t line) {
    double v = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw RowError(file, line, "not a number: '" + std::string(field) + "'");
    return v;
}

std::int64_t parse_int(std::string_view field, const std::filesystem::path& file, std::size_t line) {
    std::int64_t v = 0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw RowError(file, line, "not an integer: '" + std::string(field) + "'");
    return v;
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace freqdyn::csv
