#include "cosmo/declare/templates.hpp"

#include <cctype>
#include <string>

namespace cosmo::declare {

std::string_view name(Template t) {
    switch (t) {
    case Template::Existence: return "Existence";
    case Template::Absence: return "Absence";
    case Template::Exactly1: return "Exactly1";
    case Template::Choice: return "Choice";
    case Template::ExclusiveChoice: return "ExclusiveChoice";
    case Template::Response: return "Response";
    case Template::Precedence: return "Precedence";
    case Template::AlternateResponse: return "AlternateResponse";
    case Template::ChainResponse: return "ChainResponse";
    case Template::NotCoExistence: return "NotCoExistence";
    case Template::NotSuccession: return "NotSuccession";
    case Template::NotChainSuccession: return "NotChainSuccession";
    }
    return "?";
}

std::string_view name(Group g) {
    switch (g) {
    case Group::E: return "E";
    case Group::C: return "C";
    case Group::PR: return "PR";
    case Group::NR: return "NR";
    }
    return "?";
}

int arity(Template t) {
    switch (t) {
    case Template::Existence:
    case Template::Absence:
    case Template::Exactly1: return 1;
    default: return 2;
    }
}

Group group(Template t) {
    switch (t) {
    case Template::Existence:
    case Template::Absence:
    case Template::Exactly1: return Group::E;
    case Template::Choice:
    case Template::ExclusiveChoice: return Group::C;
    case Template::Response:
    case Template::Precedence:
    case Template::AlternateResponse:
    case Template::ChainResponse: return Group::PR;
    default: return Group::NR;
    }
}

bool symmetric(Template t) {
    return t == Template::Choice || t == Template::ExclusiveChoice || t == Template::NotCoExistence;
}

namespace {
std::string squash(std::string_view text) {
    std::string out;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)) && c != '_' && c != '-')
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}
} // namespace

std::optional<Template> parse_template(std::string_view text) {
    auto key = squash(text);
    if (key == "exactly" || key == "exactly(1" || key == "exactly1") return Template::Exactly1;
    for (auto t : kAllTemplates)
        if (squash(name(t)) == key) return t;
    return std::nullopt;
}

std::optional<Group> parse_group(std::string_view text) {
    auto key = squash(text);
    if (key == "e" || key == "existence") return Group::E;
    if (key == "c" || key == "choice") return Group::C;
    if (key == "pr" || key == "positiverelations") return Group::PR;
    if (key == "nr" || key == "negativerelations") return Group::NR;
    return std::nullopt;
}

} // namespace cosmo::declare
