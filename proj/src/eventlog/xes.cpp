#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cstdlib>
#include <fstream>

#include "cosmo/error.hpp"
#include "cosmo/eventlog/io.hpp"

namespace cosmo::eventlog {
namespace {

namespace pt = boost::property_tree;

struct XesAttribute {
    std::string type;
    std::string key;
    std::string value;
};

std::optional<XesAttribute> as_attribute(const std::string& tag, const pt::ptree& node) {
    static const char* const kTypes[] = {"string", "date", "int", "float", "boolean", "id"};
    for (const char* t : kTypes) {
        if (tag == t) {
            return XesAttribute{tag, node.get<std::string>("<xmlattr>.key", ""),
                                node.get<std::string>("<xmlattr>.value", "")};
        }
    }
    return std::nullopt;
}

AttributeValue to_value(const XesAttribute& a) {
    if (a.type == "int" || a.type == "float") {
        char* end = nullptr;
        double v = std::strtod(a.value.c_str(), &end);
        if (end != a.value.c_str() && *end == '\0') return v;
    }
    return a.value;
}

} // namespace

EventLog parse_xes(std::istream& in, const std::string& source_name) {
    pt::ptree tree;
    try {
        pt::read_xml(in, tree, pt::xml_parser::no_comments);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError("malformed XES '" + source_name + "': " + e.message(), static_cast<long>(e.line()));
    }
    auto root = tree.get_child_optional("log");
    if (!root) throw SchemaError("XES '" + source_name + "' has no <log> root element");

    std::vector<Trace> traces;
    std::size_t trace_index = 0;
    std::size_t dropped_empty = 0;
    for (const auto& [tag, trace_node] : *root) {
        if (tag != "trace") continue;
        Trace trace;
        trace.case_id = std::to_string(trace_index);
        std::size_t event_index = 0;
        for (const auto& [ttag, child] : trace_node) {
            if (auto attr = as_attribute(ttag, child)) {
                if (attr->key == "concept:name") trace.case_id = attr->value;
                continue;
            }
            if (ttag != "event") continue;
            Event ev;
            bool has_name = false;
            bool has_time = false;
            for (const auto& [etag, enode] : child) {
                auto attr = as_attribute(etag, enode);
                if (!attr) continue;
                if (attr->key == "concept:name") {
                    ev.activity = attr->value;
                    has_name = true;
                } else if (attr->key == "time:timestamp") {
                    auto ts = parse_iso8601(attr->value);
                    if (!ts)
                        throw SchemaError("XES '" + source_name + "': unparseable time:timestamp '" + attr->value +
                                          "' at trace " + std::to_string(trace_index) + ", event " +
                                          std::to_string(event_index));
                    ev.timestamp = *ts;
                    has_time = true;
                } else {
                    ev.attributes.emplace_back(attr->key, to_value(*attr));
                }
            }
            auto where = "trace " + std::to_string(trace_index) + ", event " + std::to_string(event_index);
            if (!has_name) throw SchemaError("XES '" + source_name + "': missing concept:name at " + where);
            if (!has_time) throw SchemaError("XES '" + source_name + "': missing time:timestamp at " + where);
            trace.events.push_back(std::move(ev));
            ++event_index;
        }
        if (trace.events.empty())
            ++dropped_empty;
        else
            traces.push_back(std::move(trace));
        ++trace_index;
    }
    auto log = make_log(std::move(traces), source_name, "xes");
    if (dropped_empty > 0) log.provenance.steps.push_back("dropped_empty_traces=" + std::to_string(dropped_empty));
    return log;
}

EventLog parse_xes(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open XES file '" + path.string() + "'");
    return parse_xes(in, path.string());
}

} // namespace cosmo::eventlog
