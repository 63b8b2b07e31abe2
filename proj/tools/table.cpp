#include "table.hpp"

#include "hbie/errors.hpp"
#include "hbie/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace hbie_cli {

std::vector<Cell>& Table::add_row()
{
    rows.emplace_back(columns.size());
    return rows.back();
}

int Table::column_index(const std::string& column) const
{
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == column)
            return static_cast<int>(i);
    return -1;
}

void Table::set(std::vector<Cell>& row, const std::string& column, Cell value) const
{
    const int i = column_index(column);
    if (i < 0)
        throw std::logic_error("no column " + column);
    if (const double* d = std::get_if<double>(&value); d && !std::isfinite(*d))
        value = std::monostate{};
    row[static_cast<std::size_t>(i)] = std::move(value);
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

namespace {

std::string csv_quote(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

std::string csv_cell(const Cell& c)
{
    struct V {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(const std::string& s) const { return csv_quote(s); }
    };
    return std::visit(V{}, c);
}

nlohmann::ordered_json json_cell(const Cell& c)
{
    struct V {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(double d) const { return d; }
        nlohmann::ordered_json operator()(std::int64_t i) const { return i; }
        nlohmann::ordered_json operator()(bool b) const { return b; }
        nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    };
    return std::visit(V{}, c);
}

void flatten(std::ostream& os, const std::string& prefix, const nlohmann::ordered_json& j)
{
    if (j.is_object()) {
        for (const auto& [key, value] : j.items())
            flatten(os, prefix.empty() ? key : prefix + "." + key, value);
        return;
    }
    os << "# " << prefix << '=';
    if (j.is_number_float())
        os << format_double(j.get<double>());
    else if (j.is_string())
        os << j.get<std::string>();
    else
        os << j.dump();
    os << '\n';
}

} // namespace

void write_csv(std::ostream& os, const Table& t)
{
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << csv_cell(row[i]);
        os << '\n';
    }
    flatten(os, "", t.summary);
}

void write_json(std::ostream& os, const Table& t)
{
    nlohmann::ordered_json out;
    out["command"] = t.command;
    out["columns"] = t.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i)
            r[t.columns[i]] = json_cell(row[i]);
        rows.push_back(std::move(r));
    }
    out["rows"] = std::move(rows);
    out["summary"] = t.summary;
    os << out.dump(2) << '\n';
}

nlohmann::ordered_json fit_columns(const Table& t, const std::vector<std::string>& columns)
{
    nlohmann::ordered_json fits = nlohmann::ordered_json::object();
    const int ik = t.column_index("k");
    for (const auto& c : columns) {
        const int ic = t.column_index(c);
        std::vector<std::pair<double, double>> pairs;
        for (const auto& row : t.rows) {
            const double* k = std::get_if<double>(&row[ik]);
            double v = 0.0;
            if (const double* d = std::get_if<double>(&row[ic]))
                v = *d;
            else if (const std::int64_t* i = std::get_if<std::int64_t>(&row[ic]))
                v = static_cast<double>(*i);
            if (k && *k > 0 && v > 0 && std::isfinite(v))
                pairs.emplace_back(*k, v);
        }
        if (pairs.size() < 3)
            continue;
        try {
            const hbie::FitResult f = hbie::fit_power_law(pairs);
            fits[c] = {{"exponent", f.exponent}, {"log_prefactor", f.log_prefactor},
                       {"r_squared", f.r_squared}, {"points", static_cast<int>(pairs.size())}};
        } catch (const hbie::InvalidParameter&) {
        }
    }
    return fits;
}

} // namespace hbie_cli
