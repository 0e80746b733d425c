#pragma once

#include <algorithm>
#include <istream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace cosmo::tools {

// Reads --config files written as a flat JSON object whose keys name long
// options ("learning_rate" or "learning-rate" for --learning-rate) of the
// subcommand being run. Options given on the command line win.
class JsonConfig : public CLI::Config {
public:
    explicit JsonConfig(const CLI::App* root) : root_(root) {}

    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        nlohmann::json out = nlohmann::json::object();
        for (const CLI::Option* opt : app->get_options()) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const auto& name = opt->get_lnames().front();
            if (opt->count() > 0) {
                auto values = opt->results();
                if (opt->get_expected_max() > 1) out[name] = values;
                else if (!values.empty()) out[name] = values.back();
            } else if (default_also && !opt->get_default_str().empty()) {
                out[name] = opt->get_default_str();
            }
        }
        return out.dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(input);
        } catch (const nlohmann::json::exception& e) {
            throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
        std::vector<std::string> parents;
        auto active = root_->get_subcommands();
        if (!active.empty()) parents.push_back(active.front()->get_name());
        std::vector<CLI::ConfigItem> items;
        collect(j, parents, items);
        return items;
    }

private:
    const CLI::App* root_;

    static std::string text(const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    static void collect(const nlohmann::json& j, const std::vector<std::string>& parents,
                        std::vector<CLI::ConfigItem>& items) {
        for (const auto& [key, value] : j.items()) {
            std::string name = key;
            std::replace(name.begin(), name.end(), '_', '-');
            if (value.is_null()) continue;
            if (value.is_object()) {
                auto nested = parents;
                nested.push_back(key);
                collect(value, nested, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = name;
            if (value.is_array())
                for (const auto& e : value) item.inputs.push_back(text(e));
            else
                item.inputs.push_back(text(value));
            items.push_back(std::move(item));
        }
    }
};

} // namespace cosmo::tools
