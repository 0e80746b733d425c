#include <boost/tokenizer.hpp>

#include <fstream>
#include <unordered_map>

#include "cosmo/error.hpp"
#include "cosmo/eventlog/io.hpp"

namespace cosmo::eventlog {
namespace {

std::vector<std::string> split_row(const std::string& line, char sep) {
    // '\0' as escape character: backslashes in data stay literal.
    boost::escaped_list_separator<char> fields('\0', sep, '"');
    boost::tokenizer<boost::escaped_list_separator<char>> tok(line, fields);
    return {tok.begin(), tok.end()};
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw SchemaError("CSV has no column '" + name + "'");
}

} // namespace

EventLog parse_csv(std::istream& in, const CsvMapping& mapping, const std::string& source_name) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("CSV '" + source_name + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_row(line, mapping.separator);
    auto case_ix = column_index(header, mapping.case_col);
    auto act_ix = column_index(header, mapping.activity_col);
    auto time_ix = column_index(header, mapping.timestamp_col);

    std::vector<Trace> traces;
    std::unordered_map<std::string, std::size_t> by_case;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        std::vector<std::string> cells;
        try {
            cells = split_row(line, mapping.separator);
        } catch (const boost::escaped_list_error& e) {
            throw ParseError("CSV '" + source_name + "' row " + std::to_string(row) + ": " + e.what(),
                             static_cast<long>(row + 1));
        }
        if (cells.size() != header.size())
            throw ParseError("CSV '" + source_name + "' row " + std::to_string(row) + " has " +
                                 std::to_string(cells.size()) + " fields, expected " + std::to_string(header.size()),
                             static_cast<long>(row + 1));
        auto ts = parse_timestamp(cells[time_ix], mapping.timestamp_format);
        if (!ts)
            throw DataError("CSV '" + source_name + "' row " + std::to_string(row) + ": cannot parse timestamp '" +
                            cells[time_ix] + "' with format '" + mapping.timestamp_format + "'");
        Event ev;
        ev.activity = cells[act_ix];
        ev.timestamp = *ts;
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (i != case_ix && i != act_ix && i != time_ix) ev.attributes.emplace_back(header[i], cells[i]);
        auto [it, inserted] = by_case.try_emplace(cells[case_ix], traces.size());
        if (inserted) traces.push_back(Trace{cells[case_ix], {}});
        traces[it->second].events.push_back(std::move(ev));
    }
    return make_log(std::move(traces), source_name, "csv");
}

EventLog parse_csv(const std::filesystem::path& path, const CsvMapping& mapping) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV file '" + path.string() + "'");
    return parse_csv(in, mapping, path.string());
}

} // namespace cosmo::eventlog
