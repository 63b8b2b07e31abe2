#pragma once
//
// Result tables: one row per case, absent cells stay empty (CSV) or null
// (JSON). Non-finite doubles are written as absent.
//

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace hbie_cli {

using Cell = std::variant<std::monostate, double, std::int64_t, bool, std::string>;

struct Table {
    std::string command;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    // Written after the rows: "# key=value" lines in CSV, "summary" in JSON.
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();

    // Row of empty cells; fill with set().
    std::vector<Cell>& add_row();
    void set(std::vector<Cell>& row, const std::string& column, Cell value) const;
    int column_index(const std::string& column) const;
};

std::string format_double(double v);

void write_csv(std::ostream& os, const Table& t);
void write_json(std::ostream& os, const Table& t);

// Fitted exponent for each listed column over rows where both the column and
// "k" hold positive finite values; columns with fewer than 3 such rows are
// skipped.
nlohmann::ordered_json fit_columns(const Table& t, const std::vector<std::string>& columns);

} // namespace hbie_cli
