#ifndef FREQDYN_CSV_HPP
#define FREQDYN_CSV_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace freqdyn::csv {

/// Error carrying the 1-based line number of the offending row.
class RowError : public std::runtime_error {
public:
    RowError(const std::filesystem::path& file, std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

std::vector<std::string_view> split_fields(std::string_view line);

/// Streams a CSV file. The header line must match `expected_header` exactly;
/// row_fn receives the 1-based line number and the split fields.
void for_each_row(const std::filesystem::path& file, std::string_view expected_header,
                  const std::function<void(std::size_t, const std::vector<std::string_view>&)>& row_fn);

double parse_double(std::string_view field, const std::filesystem::path& file, std::size_t line);
std::int64_t parse_int(std::string_view field, const std::filesystem::path& file, std::size_t line);

/// Shortest round-trip decimal form of v (std::to_chars).
std::string format_double(double v);

} // namespace freqdyn::csv

#endif
