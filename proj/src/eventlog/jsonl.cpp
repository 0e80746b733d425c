#include <json.hpp>

#include <fstream>
#include <sstream>

#include "cosmo/error.hpp"
#include "cosmo/eventlog/io.hpp"

namespace cosmo::eventlog {

using nlohmann::json;

std::string to_jsonl(const EventLog& log) {
    std::string out;
    for (const auto& t : log.traces) {
        json events = json::array();
        for (const auto& e : t.events) events.push_back({{"activity", e.activity}, {"timestamp_ms", e.timestamp}});
        out += json{{"case_id", t.case_id}, {"events", std::move(events)}}.dump();
        out += '\n';
    }
    return out;
}

void write_jsonl(const EventLog& log, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << to_jsonl(log);
}

EventLog parse_jsonl(std::istream& in, const std::string& source_name) {
    std::vector<Trace> traces;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError("malformed JSON line in '" + source_name + "': " + e.what(), line_no);
        }
        try {
            Trace t;
            const auto& id = j.at("case_id");
            t.case_id = id.is_string() ? id.get<std::string>() : id.dump();
            for (const auto& ev : j.at("events")) {
                Event e;
                e.activity = ev.at("activity").get<std::string>();
                e.timestamp = ev.at("timestamp_ms").get<TimestampMs>();
                t.events.push_back(std::move(e));
            }
            if (!t.events.empty()) traces.push_back(std::move(t));
        } catch (const json::exception& e) {
            throw SchemaError("'" + source_name + "' line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return make_log(std::move(traces), source_name, "jsonl");
}

EventLog read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return parse_jsonl(in, path.string());
}

EventLog read_log(const std::filesystem::path& path, const CsvMapping& mapping) {
    auto ext = path.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".xes") return parse_xes(path);
    if (ext == ".csv") return parse_csv(path, mapping);
    if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") return read_jsonl(path);
    throw DataError("unrecognised log extension '" + ext + "' (expected .xes, .csv or .jsonl)");
}

} // namespace cosmo::eventlog
