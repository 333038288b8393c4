#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace dcrp {

using Cell = std::variant<std::int64_t, double, std::string, bool>;

/// Column-named rows; CSV is the reference rendering and JSONL mirrors it row for row.
struct DataTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    explicit DataTable(std::vector<std::string> cols = {}) : columns(std::move(cols)) {}
    void add(std::vector<Cell> row);
};

enum class Format { Csv, Jsonl };

Format parse_format(const std::string& s);
const char* extension(Format f);

/// Shortest round-trip decimal; nan, inf and -inf are spelled out.
std::string format_double(double x);

void write_csv(std::ostream& os, const DataTable& t);
/// Non-finite doubles become null.
void write_jsonl(std::ostream& os, const DataTable& t);
void write_table(std::ostream& os, const DataTable& t, Format f);

} // namespace dcrp
