#include "dcrp/table.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "json.hpp"

#include "dcrp/error.hpp"

namespace dcrp {

void DataTable::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw Error(ErrorKind::Domain, "row width does not match the header");
    rows.push_back(std::move(row));
}

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "jsonl") return Format::Jsonl;
    throw Error(ErrorKind::Parse, "unknown format '" + s + "' (expected csv or jsonl)");
}

const char* extension(Format f) { return f == Format::Csv ? "csv" : "jsonl"; }

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) return format_double(v);
            else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>) {
                if (v.find_first_of(",\"\n") == std::string::npos) return v;
                std::string q = "\"";
                for (char ch : v) {
                    if (ch == '"') q += '"';
                    q += ch;
                }
                return q + '"';
            } else return std::to_string(v);
        },
        c);
}

nlohmann::ordered_json json_field(const Cell& c) {
    return std::visit(
        [](const auto& v) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(v)) return nullptr;
            }
            return v;
        },
        c);
}

} // namespace

void write_csv(std::ostream& os, const DataTable& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
        os << '\n';
    }
}

void write_jsonl(std::ostream& os, const DataTable& t) {
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = json_field(row[i]);
        os << obj.dump() << '\n';
    }
}

void write_table(std::ostream& os, const DataTable& t, Format f) {
    if (f == Format::Csv) write_csv(os, t);
    else write_jsonl(os, t);
}

} // namespace dcrp
