#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace cosmo::declare {

enum class Template {
    Existence,
    Absence,
    Exactly1,
    Choice,
    ExclusiveChoice,
    Response,
    Precedence,
    AlternateResponse,
    ChainResponse,
    NotCoExistence,
    NotSuccession,
    NotChainSuccession,
};

// Existence, Choice, Positive Relations, Negative Relations.
enum class Group { E, C, PR, NR };

inline constexpr std::array<Template, 12> kAllTemplates = {
    Template::Existence,      Template::Absence,       Template::Exactly1,          Template::Choice,
    Template::ExclusiveChoice, Template::Response,     Template::Precedence,        Template::AlternateResponse,
    Template::ChainResponse,  Template::NotCoExistence, Template::NotSuccession,    Template::NotChainSuccession,
};

inline constexpr std::array<Group, 4> kAllGroups = {Group::E, Group::C, Group::PR, Group::NR};

std::string_view name(Template t);
std::string_view name(Group g);
int arity(Template t);
Group group(Template t);
// Symmetric binary templates are grounded once per unordered pair.
bool symmetric(Template t);

// Accepts canonical names case-insensitively, ignoring spaces, '_' and '-'
// ("chain_response", "Chain Response"); "Exactly", "Exactly(1" style
// prefixes map to Exactly1.
std::optional<Template> parse_template(std::string_view text);
std::optional<Group> parse_group(std::string_view text);

} // namespace cosmo::declare
